//! Radial differential operators acting on jets: the radial derivative R,
//! the radial Laplacian R₂ = R² + (Q−1)/r · R, their iterates and mixed
//! compositions, weighted conjugations r^a ∂_r (r^b ·), and the Euler
//! operator check.

use num_complex::Complex64;

use crate::error::HrError;
use crate::jet::{binom, power_derivs, Jet};
use crate::profile::RadialProfile;
use crate::Result;

/// The only trace of the group: homogeneous dimension Q and the total mass
/// of the unit quasi-sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupContext {
    pub q: f64,
    pub sphere_mass: f64,
}

impl GroupContext {
    pub fn new(q: f64) -> Result<Self> {
        Self::with_sphere_mass(q, 1.0)
    }

    pub fn with_sphere_mass(q: f64, sphere_mass: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(HrError::InvalidParam(format!("Q must be > 0, got {q}")));
        }
        if !(sphere_mass > 0.0) {
            return Err(HrError::InvalidParam(format!(
                "sphere_mass must be > 0, got {sphere_mass}"
            )));
        }
        Ok(GroupContext { q, sphere_mass })
    }
}

/// Radial derivative: shifts the jet by one order.
pub fn apply_r(jet: &Jet) -> Result<Jet> {
    if jet.order() < 1 {
        return Err(HrError::Domain("apply_r needs jet order >= 1".into()));
    }
    Ok(Jet::from_raw(jet.radius(), jet.derivs()[1..].to_vec()))
}

/// R₂ f = f'' + (Q−1)/r · f'; the output jet loses two orders.
pub fn apply_r2(ctx: &GroupContext, jet: &Jet) -> Result<Jet> {
    if jet.order() < 2 {
        return Err(HrError::Domain("apply_r2 needs jet order >= 2".into()));
    }
    let r = jet.radius();
    let d = jet.derivs();
    let out_ord = jet.order() - 2;
    let rinv = power_derivs(-1.0, r, out_ord);
    let mut out = Vec::with_capacity(out_ord + 1);
    for dd in 0..=out_ord {
        // d-th derivative of f'' plus (Q-1) times d-th derivative of f'/r
        let mut s = d[dd + 2];
        let mut leib = Complex64::new(0.0, 0.0);
        for m in 0..=dd {
            leib += binom(dd, m) * d[m + 1] * rinv[dd - m];
        }
        s += (ctx.q - 1.0) * leib;
        out.push(s);
    }
    Ok(Jet::from_raw(r, out))
}

/// R₂ applied k times, then R once when `mixed`.
pub fn apply_iterate(ctx: &GroupContext, jet: &Jet, k: usize, mixed: bool) -> Result<Jet> {
    let need = 2 * k + usize::from(mixed);
    if jet.order() < need {
        return Err(HrError::Domain(format!(
            "apply_iterate k={k} mixed={mixed} needs jet order >= {need}, got {}",
            jet.order()
        )));
    }
    let mut j = jet.clone();
    for _ in 0..k {
        j = apply_r2(ctx, &j)?;
    }
    if mixed {
        j = apply_r(&j)?;
    }
    Ok(j)
}

/// Value of r^a · d/dr (r^b f(r)) = r^{a+b−1} (b f + r f').
pub fn apply_conj(jet: &Jet, a: f64, b: f64) -> Result<Complex64> {
    if jet.order() < 1 {
        return Err(HrError::Domain("apply_conj needs jet order >= 1".into()));
    }
    let r = jet.radius();
    Ok(r.powf(a + b - 1.0) * (b * jet.value() + r * jet.deriv(1)))
}

/// A finite composition of R and R₂ factors, applied left to right
/// (`[R2, R2, R]` means R·R₂²).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpAtom {
    R,
    R2,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpChain(pub Vec<OpAtom>);

impl OpChain {
    pub fn identity() -> Self {
        OpChain(Vec::new())
    }

    /// R₂^k
    pub fn r2k(k: usize) -> Self {
        OpChain(vec![OpAtom::R2; k])
    }

    /// R·R₂^k
    pub fn r_r2k(k: usize) -> Self {
        let mut v = vec![OpAtom::R2; k];
        v.push(OpAtom::R);
        OpChain(v)
    }

    /// R²·R₂^k
    pub fn rr_r2k(k: usize) -> Self {
        let mut v = vec![OpAtom::R2; k];
        v.push(OpAtom::R);
        v.push(OpAtom::R);
        OpChain(v)
    }

    /// Jet order consumed by the chain.
    pub fn required_order(&self) -> usize {
        self.0
            .iter()
            .map(|a| match a {
                OpAtom::R => 1,
                OpAtom::R2 => 2,
            })
            .sum()
    }

    pub fn apply(&self, ctx: &GroupContext, jet: &Jet) -> Result<Jet> {
        let mut j = jet.clone();
        for atom in &self.0 {
            j = match atom {
                OpAtom::R => apply_r(&j)?,
                OpAtom::R2 => apply_r2(ctx, &j)?,
            };
        }
        Ok(j)
    }

    /// Compact serialized form: ``, `R`, `R2^k`, `R.R2^k`, `R^2.R2^k`.
    pub fn label(&self) -> String {
        let k = self.0.iter().filter(|a| **a == OpAtom::R2).count();
        let r = self.0.iter().filter(|a| **a == OpAtom::R).count();
        match (r, k) {
            (0, 0) => "id".into(),
            (0, _) => format!("R2^{k}"),
            (1, 0) => "R".into(),
            (1, _) => format!("R.R2^{k}"),
            (_, 0) => format!("R^{r}"),
            _ => format!("R^{r}.R2^{k}"),
        }
    }
}

/// True iff r f'(r) ≈ ν f(r) at every sample radius, i.e. f behaves as
/// a positively homogeneous function of order ν along the samples.
pub fn euler_check(f: &RadialProfile, nu: f64, radii: &[f64], tol: f64) -> Result<bool> {
    for &r in radii {
        let j = f.eval_jet(r, 1)?;
        let lhs = r * j.deriv(1);
        let rhs = nu * j.value();
        if (lhs - rhs).norm() > tol * (rhs.norm() + 1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::CutoffSpec;

    fn jet_of(p: &RadialProfile, r: f64, ord: usize) -> Jet {
        p.eval_jet(r, ord).unwrap()
    }

    #[test]
    fn r_shifts() {
        let p = RadialProfile::power(3.0);
        let j = apply_r(&jet_of(&p, 2.0, 3)).unwrap();
        assert_eq!(j.value().re, 12.0);
        let c = RadialProfile::power(0.0);
        let j = apply_r(&jet_of(&c, 5.0, 2)).unwrap();
        assert_eq!(j.value().re, 0.0);
        let lg = RadialProfile::log_power(7.0, 1.0).unwrap();
        let j = apply_r(&jet_of(&lg, 2.0, 1)).unwrap();
        assert!((j.value().re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn r2_power_rule_spot() {
        let ctx = GroupContext::new(6.0).unwrap();
        let p = RadialProfile::power(2.0);
        let j = apply_r2(&ctx, &jet_of(&p, 3.7, 2)).unwrap();
        assert!((j.value().re - 12.0).abs() < 1e-12);

        // a = 2 - Q annihilates
        let ctx = GroupContext::new(7.5).unwrap();
        let p = RadialProfile::power(2.0 - 7.5);
        let j = apply_r2(&ctx, &jet_of(&p, 1.3, 2)).unwrap();
        assert!(j.value().norm() < 1e-13);

        let ctx = GroupContext::new(9.0).unwrap();
        let p = RadialProfile::power(-2.5);
        let j = apply_r2(&ctx, &jet_of(&p, 1.0, 2)).unwrap();
        assert!((j.value().re - (-11.25)).abs() < 1e-12);
    }

    #[test]
    fn r2_power_rule_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let a: f64 = rng.gen_range(-4.0..4.0);
            let q: f64 = rng.gen_range(2.0..15.0);
            let r: f64 = rng.gen_range(0.3..5.0);
            let ctx = GroupContext::new(q).unwrap();
            let p = RadialProfile::power(a);
            let j = apply_r2(&ctx, &p.eval_jet(r, 2).unwrap()).unwrap();
            let expect = a * (a + q - 2.0) * r.powf(a - 2.0);
            assert!(
                (j.value().re - expect).abs() <= 1e-12 * expect.abs().max(1e-300),
                "a={a} q={q} r={r}"
            );
        }
    }

    #[test]
    fn iterate_matches_composition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let ctx = GroupContext::new(8.3).unwrap();
        let f = RadialProfile::cutoff(CutoffSpec::new(1.0, 2.0).unwrap())
            .mul(RadialProfile::power(-0.7));
        for _ in 0..50 {
            let r: f64 = rng.gen_range(1.01..1.99);
            let j = f.eval_jet(r, 4).unwrap();
            let it = apply_iterate(&ctx, &j, 2, false).unwrap();
            let manual = apply_r2(&ctx, &apply_r2(&ctx, &j).unwrap()).unwrap();
            assert!((it.value() - manual.value()).norm() <= 1e-12 * manual.value().norm().max(1.0));
        }
        // k=1 not mixed is apply_r2; k=0 mixed is apply_r
        let j = f.eval_jet(1.5, 3).unwrap();
        assert_eq!(
            apply_iterate(&ctx, &j, 1, false).unwrap().value(),
            apply_r2(&ctx, &j).unwrap().value()
        );
        assert_eq!(
            apply_iterate(&ctx, &j, 0, true).unwrap().value(),
            apply_r(&j).unwrap().value()
        );
    }

    #[test]
    fn r_power_rule_random_a_q() {
        // power rule for r^a, and a(a+Q-2) r^{a-2} for 200 random triples
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a: f64 = rng.gen_range(-3.0..3.0);
            let q: f64 = rng.gen_range(3.0..14.0);
            let r: f64 = rng.gen_range(0.5..3.0);
            let ctx = GroupContext::new(q).unwrap();
            let jet = RadialProfile::power(a).eval_jet(r, 3).unwrap();
            let rj = apply_r(&jet).unwrap();
            assert!((rj.value().re - a * r.powf(a - 1.0)).abs() <= 1e-12 * (a * r.powf(a - 1.0)).abs().max(1e-12));
            let r2j = apply_r2(&ctx, &jet).unwrap();
            let expect = a * (a + q - 2.0) * r.powf(a - 2.0);
            assert!((r2j.value().re - expect).abs() <= 1e-12 * expect.abs().max(1e-12));
        }
    }

    #[test]
    fn dilation_commutation() {
        // R is homogeneous of order −1: (R f)(λr)·λ = R(f(λ·))(r)
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = RadialProfile::cutoff(CutoffSpec::new(1.0, 2.0).unwrap())
            .mul(RadialProfile::power(1.3));
        for _ in 0..50 {
            let lambda: f64 = rng.gen_range(0.2..4.0);
            let r: f64 = rng.gen_range(0.5..3.0);
            if !(lambda * r > 1.001 && lambda * r < 1.999) {
                continue;
            }
            let dil = f.clone().dilate(lambda).unwrap();
            let lhs = lambda * apply_r(&f.eval_jet(lambda * r, 2).unwrap()).unwrap().value();
            let rhs = apply_r(&dil.eval_jet(r, 2).unwrap()).unwrap().value();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-12));
        }
    }

    #[test]
    fn conj_examples() {
        let q = 9.0;
        // b = Q/2-1 with f = r^{1-Q/2} makes r^b f constant
        let f = RadialProfile::power(1.0 - q / 2.0);
        let j = f.eval_jet(1.7, 1).unwrap();
        let v = apply_conj(&j, 1.0 - q / 2.0, q / 2.0 - 1.0).unwrap();
        assert!(v.norm() < 1e-12);

        // b = 0 reduces to r^a f'
        let g = RadialProfile::power(2.0);
        let j = g.eval_jet(2.0, 1).unwrap();
        let v = apply_conj(&j, 3.0, 0.0).unwrap();
        assert!((v.re - 2.0f64.powi(3) * 4.0).abs() < 1e-12);

        // a=0, b=1, f=1 -> d/dr r = 1
        let one = RadialProfile::power(0.0);
        let j = one.eval_jet(0.9, 1).unwrap();
        let v = apply_conj(&j, 0.0, 1.0).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn euler_operator() {
        let radii = [0.5, 1.0, 7.0];
        let f = RadialProfile::power(2.5);
        assert!(euler_check(&f, 2.5, &radii, 1e-10).unwrap());
        let g = RadialProfile::power(-1.2);
        assert!(euler_check(&g, -1.2, &radii, 1e-10).unwrap());
        // bump is not homogeneous at its transition radii
        let b = RadialProfile::cutoff(CutoffSpec::new(1.0, 2.0).unwrap());
        assert!(!euler_check(&b, 1.0, &[1.5], 1e-10).unwrap());
    }
}
