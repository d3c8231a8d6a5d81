//! Nonnegative remainder functionals: the convexity remainder R_p and the
//! modulus/imaginary-part terms that appear on the right-hand sides of the
//! L^p identities.
//!
//! Complex points of vanishing modulus are handled by the continuous
//! extension |ξ|^{p−2}ξ := 0, and the polar forms ρ^p(θ')² and
//! ρ^{p−2}(ρ' + cρ/r)² avoid the 0/0 of |f|^{p−4} at zeros of f.

use num_complex::Complex64;

use crate::error::HrError;
use crate::Result;

/// R_p(ξ,η) = |η|^p/p + (p−1)|ξ|^p/p − Re(|ξ|^{p−2} ξ η̄).
pub fn rp(p: f64, xi: Complex64, eta: Complex64) -> f64 {
    let nxi = xi.norm();
    let neta = eta.norm();
    let cross = if nxi == 0.0 {
        0.0
    } else {
        nxi.powf(p - 2.0) * (xi * eta.conj()).re
    };
    neta.powf(p) / p + (p - 1.0) / p * nxi.powf(p) - cross
}

/// |f|^{p−4}(Im(f · conj(Rf)))² for a polar jet f = ρe^{iθ}, evaluated as
/// ρ^p (θ')²; zero when ρ = 0.
pub fn im_term(p: f64, rho: f64, theta_prime: f64) -> f64 {
    if rho == 0.0 {
        0.0
    } else {
        rho.powf(p) * theta_prime * theta_prime
    }
}

/// |f|^{p−2} |R|f| + (c/r)|f||² for a polar jet, evaluated as
/// ρ^{p−2}(ρ' + cρ/r)².
pub fn modulus_deriv_term(p: f64, c: f64, rho: f64, rho_prime: f64, r: f64) -> Result<f64> {
    if rho == 0.0 {
        if p >= 2.0 || rho_prime == 0.0 {
            return Ok(0.0);
        }
        return Err(HrError::SingularSample { p, r });
    }
    let inner = rho_prime + c * rho / r;
    Ok(rho.powf(p - 2.0) * inner * inner)
}

/// Same as [`im_term`] but from a complex jet (g, g') of a derived
/// quantity: |g|^{p−4} (Im(g·conj(g')))².
pub fn im_term_jet(p: f64, g: Complex64, gp: Complex64) -> f64 {
    let m = g.norm();
    if m == 0.0 {
        return 0.0;
    }
    let im = (g * gp.conj()).im;
    m.powf(p - 4.0) * im * im
}

/// Same as [`modulus_deriv_term`] but from a complex jet: uses
/// R|g| = Re(ḡ g')/|g|.
pub fn modulus_deriv_term_jet(p: f64, c: f64, g: Complex64, gp: Complex64, r: f64) -> Result<f64> {
    let m = g.norm();
    if m == 0.0 {
        if p >= 2.0 || gp.norm() == 0.0 {
            return Ok(0.0);
        }
        return Err(HrError::SingularSample { p, r });
    }
    let dm = (g.conj() * gp).re / m;
    let inner = dm + c * m / r;
    Ok(m.powf(p - 2.0) * inner * inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rp_examples() {
        // p = 2 reduces to |ξ−η|²/2
        assert!((rp(2.0, z(1.0, 0.0), z(0.0, 0.0)) - 0.5).abs() < 1e-15);
        // ξ = η vanishes for any p
        for p in [1.1, 1.5, 2.0, 3.0, 4.7] {
            assert!(rp(p, z(0.3, -0.8), z(0.3, -0.8)).abs() < 1e-15);
        }
        // p = 3, ξ = 1, η = −1: 1/3 + 2/3 + 1 = 2
        assert!((rp(3.0, z(1.0, 0.0), z(-1.0, 0.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rp_nonnegative_and_vanishing_only_on_diagonal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for p in [1.1, 1.5, 2.0, 3.0, 4.7] {
            for _ in 0..10_000 {
                let xi = z(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let eta = z(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let v = rp(p, xi, eta);
                assert!(v >= 0.0, "rp negative: p={p} xi={xi} eta={eta} -> {v}");
                if v <= 1e-12 {
                    assert!(
                        (xi - eta).norm() <= 1e-7 * (xi.norm() + eta.norm()).max(1e-12),
                        "rp ~ 0 away from diagonal: p={p} xi={xi} eta={eta}"
                    );
                }
            }
        }
    }

    #[test]
    fn rp_p2_closed_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let xi = z(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let eta = z(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let v = rp(2.0, xi, eta);
            let expect = (xi - eta).norm_sqr() / 2.0;
            assert!((v - expect).abs() <= 1e-14 * expect.max(1.0));
        }
    }

    #[test]
    fn im_term_cases() {
        assert_eq!(im_term(3.0, 1.0, 0.0), 0.0);
        assert!((im_term(3.0, 1.0, 2.0) - 4.0).abs() < 1e-15);
        assert_eq!(im_term(1.5, 0.0, 7.0), 0.0);
    }

    #[test]
    fn im_term_matches_direct_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let p: f64 = rng.gen_range(1.1..5.0);
            let rho: f64 = rng.gen_range(0.1..3.0);
            let rho_p: f64 = rng.gen_range(-2.0..2.0);
            let th: f64 = rng.gen_range(-3.0..3.0);
            let th_p: f64 = rng.gen_range(-2.0..2.0);
            let f = rho * Complex64::new(0.0, th).exp();
            let fp = (Complex64::new(rho_p, 0.0) + Complex64::new(0.0, rho * th_p))
                * Complex64::new(0.0, th).exp();
            let direct = f.norm().powf(p - 4.0) * (f * fp.conj()).im.powi(2);
            let polar = im_term(p, rho, th_p);
            assert!((direct - polar).abs() <= 1e-12 * direct.abs().max(1e-12));
            let jet = im_term_jet(p, f, fp);
            assert!((direct - jet).abs() <= 1e-12 * direct.abs().max(1e-12));
        }
    }

    #[test]
    fn modulus_deriv_cases() {
        // f = r^{-c} annihilates exactly
        for (c, r) in [(1.5f64, 0.7f64), (2.0, 3.0), (0.25, 1.0)] {
            let rho = r.powf(-c);
            let rho_p = -c * r.powf(-c - 1.0);
            let v = modulus_deriv_term(2.5, c, rho, rho_p, r).unwrap();
            assert!(v.abs() < 1e-25);
        }
        // real positive f equals |f|^{p-2}(f' + c f/r)^2
        let (p, c, r) = (3.0, 1.2, 1.7);
        let (f, fp) = (0.8, -0.3);
        let v = modulus_deriv_term(p, c, f, fp, r).unwrap();
        let expect = f.powf(p - 2.0) * (fp + c * f / r) * (fp + c * f / r);
        assert!((v - expect).abs() < 1e-15);
        // singular flag
        assert!(modulus_deriv_term(1.5, 1.0, 0.0, 1.0, 1.0).is_err());
        assert_eq!(modulus_deriv_term(1.5, 1.0, 0.0, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn modulus_deriv_matches_direct_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..500 {
            let p: f64 = rng.gen_range(1.1..5.0);
            let c: f64 = rng.gen_range(-3.0..3.0);
            let r: f64 = rng.gen_range(0.2..4.0);
            let rho: f64 = rng.gen_range(0.05..2.0);
            let rho_p: f64 = rng.gen_range(-2.0..2.0);
            let th: f64 = rng.gen_range(-3.0..3.0);
            let th_p: f64 = rng.gen_range(-2.0..2.0);
            let f = rho * Complex64::new(0.0, th).exp();
            let fp = (Complex64::new(rho_p, 0.0) + Complex64::new(0.0, rho * th_p))
                * Complex64::new(0.0, th).exp();
            let polar = modulus_deriv_term(p, c, rho, rho_p, r).unwrap();
            let jet = modulus_deriv_term_jet(p, c, f, fp, r).unwrap();
            assert!((polar - jet).abs() <= 1e-12 * polar.abs().max(1e-12));
        }
    }
}
