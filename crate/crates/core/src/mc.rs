//! Order-3 forward jets in n variables and the importance-sampled Monte
//! Carlo oracle for the Euclidean mode identities.
//!
//! The oracle treats f = g(|x|)·Y(x/|x|) as a plain n-variable function,
//! differentiates it with the multivariate jets (never with the radial
//! reduction formulas), and estimates each identity term by Gaussian
//! importance sampling with antithetic pairs and per-block seeds derived
//! from the master seed. It is the independence gate for the mode
//! reductions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::HrError;
use crate::euclid::{mode_term_layout, ModeIdentity, ModeSpec};
use crate::profile::RadialProfile;
use crate::quadrature::{integrate, Integrand};
use crate::Result;

/// Value, gradient, symmetric Hessian and symmetric third-derivative
/// tensor of a scalar function of n variables.
#[derive(Debug, Clone)]
pub struct NJet {
    pub n: usize,
    pub v: f64,
    pub g: Vec<f64>,
    /// packed i ≤ j
    pub h: Vec<f64>,
    /// packed i ≤ j ≤ k
    pub t: Vec<f64>,
}

#[inline]
fn hidx(n: usize, mut i: usize, mut j: usize) -> usize {
    if i > j {
        std::mem::swap(&mut i, &mut j);
    }
    i * n - i * (i + 1) / 2 + j
}

/// Offsets for the packed symmetric triple index.
#[derive(Debug, Clone)]
pub struct TripleIndex {
    n: usize,
    offsets: Vec<usize>,
}

impl TripleIndex {
    pub fn new(n: usize) -> Self {
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        for a in 0..=n {
            offsets.push(acc);
            if a < n {
                let m = n - a;
                acc += m * (m + 1) / 2;
            }
        }
        TripleIndex { n, offsets }
    }

    pub fn len(&self) -> usize {
        self.offsets[self.n]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, mut i: usize, mut j: usize, mut k: usize) -> usize {
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        if j > k {
            std::mem::swap(&mut j, &mut k);
        }
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        self.offsets[i] + hidx(self.n - i, j - i, k - i)
    }
}

impl NJet {
    pub fn zero(n: usize, tri: &TripleIndex) -> Self {
        NJet {
            n,
            v: 0.0,
            g: vec![0.0; n],
            h: vec![0.0; n * (n + 1) / 2],
            t: vec![0.0; tri.len()],
        }
    }

    pub fn constant(n: usize, tri: &TripleIndex, v: f64) -> Self {
        let mut j = Self::zero(n, tri);
        j.v = v;
        j
    }

    pub fn coord(n: usize, tri: &TripleIndex, i: usize, x: f64) -> Self {
        let mut j = Self::zero(n, tri);
        j.v = x;
        j.g[i] = 1.0;
        j
    }

    /// |x|² seeded directly.
    pub fn radius_sq(n: usize, tri: &TripleIndex, x: &[f64]) -> Self {
        let mut j = Self::zero(n, tri);
        j.v = x.iter().map(|a| a * a).sum();
        for i in 0..n {
            j.g[i] = 2.0 * x[i];
            j.h[hidx(n, i, i)] = 2.0;
        }
        j
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.h[hidx(self.n, i, j)]
    }

    pub fn third(&self, tri: &TripleIndex, i: usize, j: usize, k: usize) -> f64 {
        self.t[tri.idx(i, j, k)]
    }

    /// Product rule through third order.
    pub fn mul(&self, other: &NJet, tri: &TripleIndex) -> NJet {
        let n = self.n;
        let mut out = NJet::zero(n, tri);
        out.v = self.v * other.v;
        for i in 0..n {
            out.g[i] = self.g[i] * other.v + self.v * other.g[i];
        }
        for i in 0..n {
            for j in i..n {
                out.h[hidx(n, i, j)] = self.hess(i, j) * other.v
                    + self.g[i] * other.g[j]
                    + self.g[j] * other.g[i]
                    + self.v * other.hess(i, j);
            }
        }
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = self.third(tri, i, j, k) * other.v
                        + self.hess(i, j) * other.g[k]
                        + self.hess(i, k) * other.g[j]
                        + self.hess(j, k) * other.g[i]
                        + self.g[i] * other.hess(j, k)
                        + self.g[j] * other.hess(i, k)
                        + self.g[k] * other.hess(i, j)
                        + self.v * other.third(tri, i, j, k);
                    out.t[tri.idx(i, j, k)] = v;
                }
            }
        }
        out
    }

    /// Chain rule for φ(u) given φ, φ', φ'', φ''' at u.v.
    pub fn chain(&self, d: [f64; 4], tri: &TripleIndex) -> NJet {
        let n = self.n;
        let mut out = NJet::zero(n, tri);
        out.v = d[0];
        for i in 0..n {
            out.g[i] = d[1] * self.g[i];
        }
        for i in 0..n {
            for j in i..n {
                out.h[hidx(n, i, j)] = d[2] * self.g[i] * self.g[j] + d[1] * self.hess(i, j);
            }
        }
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = d[3] * self.g[i] * self.g[j] * self.g[k]
                        + d[2]
                            * (self.hess(i, j) * self.g[k]
                                + self.hess(i, k) * self.g[j]
                                + self.hess(j, k) * self.g[i])
                        + d[1] * self.third(tri, i, j, k);
                    out.t[tri.idx(i, j, k)] = v;
                }
            }
        }
        out
    }

    pub fn recip(&self, tri: &TripleIndex) -> NJet {
        let v = self.v;
        self.chain(
            [
                1.0 / v,
                -1.0 / (v * v),
                2.0 / (v * v * v),
                -6.0 / (v * v * v * v),
            ],
            tri,
        )
    }

    pub fn sqrt(&self, tri: &TripleIndex) -> NJet {
        let s = self.v.sqrt();
        self.chain(
            [s, 0.5 / s, -0.25 / (s * self.v), 0.375 / (s * self.v * self.v)],
            tri,
        )
    }
}

/// f = g(|x|)·Y(x) with its full derivative tensor at x; Y is one of the
/// explicit harmonics 1, x₁/|x|, x₁x₂/|x|².
pub fn eval_separable(
    g: &RadialProfile,
    mode: &ModeSpec,
    x: &[f64],
    tri: &TripleIndex,
) -> Result<NJet> {
    let n = x.len();
    let r2 = NJet::radius_sq(n, tri, x);
    let r = r2.sqrt(tri);
    let jet = g.eval_jet(r.v, 3)?;
    if jet.derivs().iter().any(|z| z.im != 0.0) {
        return Err(HrError::InvalidParam(
            "the Monte Carlo oracle needs a real-valued profile".into(),
        ));
    }
    let gr = r.chain(
        [
            jet.deriv(0).re,
            jet.deriv(1).re,
            jet.deriv(2).re,
            jet.deriv(3).re,
        ],
        tri,
    );
    let y = match mode.ell {
        0 => NJet::constant(n, tri, 1.0),
        1 => NJet::coord(n, tri, 0, x[0]).mul(&r.recip(tri), tri),
        2 => NJet::coord(n, tri, 0, x[0])
            .mul(&NJet::coord(n, tri, 1, x[1]), tri)
            .mul(&r2.recip(tri), tri),
        other => {
            return Err(HrError::InvalidParam(format!(
                "unsupported spherical-harmonic degree {other}"
            )))
        }
    };
    Ok(gr.mul(&y, tri))
}

/// Per-sample values of every term integrand of the identity, in the
/// layout of [`mode_term_layout`] (coefficients included).
pub fn term_integrands(
    identity: ModeIdentity,
    mode: &ModeSpec,
    f: &NJet,
    x: &[f64],
    tri: &TripleIndex,
) -> Vec<f64> {
    let n = x.len();
    let nf = n as f64;
    let _ = mode;
    let r2: f64 = x.iter().map(|a| a * a).sum();
    let r = r2.sqrt();
    let w: Vec<f64> = x.iter().map(|a| a / r).collect();

    // radial contractions of the derivative tensor
    let dr1: f64 = (0..n).map(|i| w[i] * f.g[i]).sum();
    let mut dr2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dr2 += w[i] * w[j] * f.hess(i, j);
        }
    }
    let mut dr3 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                dr3 += w[i] * w[j] * w[k] * f.third(tri, i, j, k);
            }
        }
    }
    let lap: f64 = (0..n).map(|i| f.hess(i, i)).sum();
    let grad_lap: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| f.third(tri, i, i, j)).sum())
        .collect();
    let dr_lap: f64 = (0..n).map(|j| w[j] * grad_lap[j]).sum();

    let lap_r = dr2 + (nf - 1.0) / r * dr1;
    let dr_lap_r = dr3 + (nf - 1.0) * (dr2 / r - dr1 / (r * r));
    let sph = lap - lap_r;
    let dr_sph = dr_lap - dr_lap_r;

    // angular vectors: L_j f, ∂_r L_j f, ∂_r² L_j f
    let lj: Vec<f64> = (0..n).map(|j| f.g[j] - w[j] * dr1).collect();
    let hx_over_r: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|k| w[k] * f.hess(j, k)).sum())
        .collect();
    let dr_lj: Vec<f64> = (0..n).map(|j| hx_over_r[j] - w[j] * dr2).collect();
    let psi2: Vec<f64> = (0..n)
        .map(|j| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += w[a] * w[b] * f.third(tri, j, a, b);
                }
            }
            s
        })
        .collect();
    let dr2_lj: Vec<f64> = (0..n).map(|j| psi2[j] - w[j] * dr3).collect();
    let sum_lj_sq: f64 = lj.iter().map(|v| v * v).sum();

    match identity {
        ModeIdentity::Mow => {
            let conj = |c: f64| -> f64 {
                (0..n)
                    .map(|j| {
                        let v = dr_lj[j] + c * lj[j] / r;
                        v * v
                    })
                    .sum()
            };
            vec![
                lap * lap,
                lap_r * lap_r,
                sph * sph,
                nf * (nf - 4.0) / 2.0 * sum_lj_sq / r2,
                2.0 * conj((nf - 2.0) / 2.0),
                2.0 * conj(nf - 2.0),
            ]
        }
        ModeIdentity::Energy => {
            let c4 = (nf * nf - 24.0) / 2.0 * (nf - 4.0) * (nf - 4.0) / 4.0
                + 2.0 * (nf - 3.0) * (nf - 7.0);
            let grad_lap_sq: f64 = grad_lap.iter().map(|v| v * v).sum();
            let conj2: f64 = (0..n)
                .map(|j| {
                    let v = dr_lj[j] + (nf - 4.0) / 2.0 * lj[j] / r;
                    v * v
                })
                .sum();
            let conj1: f64 = (0..n)
                .map(|j| {
                    let v = dr2_lj[j] + (nf - 2.0) / 2.0 * dr_lj[j] / r;
                    v * v
                })
                .sum();
            vec![
                grad_lap_sq,
                dr_lap_r * dr_lap_r,
                dr_sph * dr_sph,
                grad_lap_sq - dr_lap * dr_lap,
                c4 * sum_lj_sq / (r2 * r2),
                (nf * nf - 24.0) / 2.0 * conj2 / r2,
                2.0 * conj1,
            ]
        }
    }
}

/// One Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
}

/// Mass centroid ∫ r|g| r^{n−1} dr / ∫ |g| r^{n−1} dr of the profile.
fn mass_centroid(g: &RadialProfile, n: usize) -> Result<f64> {
    let ctx = crate::operators::GroupContext::new(n as f64)?;
    let gb = g.clone();
    let num = Integrand::new(
        move |r| Ok(r * gb.eval_jet(r, 0)?.value().norm()),
        g.support(),
        g.junctions().to_vec(),
    );
    let gb = g.clone();
    let den = Integrand::new(
        move |r| Ok(gb.eval_jet(r, 0)?.value().norm()),
        g.support(),
        g.junctions().to_vec(),
    );
    let num = integrate(&ctx, &num, 1e-8, 1e-12)?.value;
    let den = integrate(&ctx, &den, 1e-8, 1e-12)?.value;
    if den <= 0.0 {
        return Err(HrError::InvalidParam("zero-mass profile in the oracle".into()));
    }
    Ok(num / den)
}

/// Importance-sampled estimates of every term of the identity with their
/// standard errors; deterministic for a given seed.
pub fn mc_oracle(
    identity: ModeIdentity,
    mode: &ModeSpec,
    g: &RadialProfile,
    n_samples: u64,
    seed: u64,
) -> Result<Vec<(String, McEstimate)>> {
    let n = mode.n as usize;
    let tri = TripleIndex::new(n);
    let names = mode_term_layout(identity);
    let nterms = names.len();
    let centroid = mass_centroid(g, n)?;
    let sigma = centroid / (n as f64).sqrt();
    let log_norm = -(n as f64) / 2.0 * (2.0 * std::f64::consts::PI * sigma * sigma).ln();

    const BLOCKS: u64 = 64;
    let mut mean = vec![0.0f64; nterms];
    let mut m2 = vec![0.0f64; nterms];
    let mut count = 0u64;
    let mut x = vec![0.0f64; n];
    let mut vals = vec![0.0f64; nterms];
    let (lo, hi) = g.support();
    for block in 0..BLOCKS {
        let block_samples = n_samples / BLOCKS + u64::from(block < n_samples % BLOCKS);
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(block + 1));
        for _ in 0..block_samples {
            for xi in x.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *xi = sigma * z;
            }
            let r2: f64 = x.iter().map(|a| a * a).sum();
            let r = r2.sqrt();
            vals.iter_mut().for_each(|v| *v = 0.0);
            if r > lo && r < hi && r > 0.0 {
                let weight = (r2 / (2.0 * sigma * sigma) - log_norm).exp();
                let f = eval_separable(g, mode, &x, &tri)?;
                let ints = term_integrands(identity, mode, &f, &x, &tri);
                // antithetic mate −x
                for xi in x.iter_mut() {
                    *xi = -*xi;
                }
                let f2 = eval_separable(g, mode, &x, &tri)?;
                let ints2 = term_integrands(identity, mode, &f2, &x, &tri);
                for (slot, (a, b)) in vals.iter_mut().zip(ints.iter().zip(ints2.iter())) {
                    *slot = 0.5 * (a + b) * weight;
                }
            }
            count += 1;
            let cf = count as f64;
            for t in 0..nterms {
                let delta = vals[t] - mean[t];
                mean[t] += delta / cf;
                m2[t] += delta * (vals[t] - mean[t]);
            }
        }
    }
    let cf = count as f64;
    Ok(names
        .iter()
        .enumerate()
        .map(|(t, name)| {
            (
                name.to_string(),
                McEstimate {
                    value: mean[t],
                    std_err: (m2[t] / (cf - 1.0) / cf).sqrt(),
                },
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::CutoffSpec;

    fn bump() -> RadialProfile {
        RadialProfile::hi_pass(CutoffSpec::new(1.0, 1.4).unwrap())
            .mul(RadialProfile::cutoff(CutoffSpec::new(1.7, 2.2).unwrap()))
    }

    #[test]
    fn njet_matches_finite_differences() {
        let n = 5;
        let tri = TripleIndex::new(n);
        let g = bump().mul(RadialProfile::power(2.0));
        let mode = ModeSpec::new(n as u32, 1).unwrap();
        let x = [1.1, 0.4, -0.3, 0.5, 0.2];
        let f = eval_separable(&g, &mode, &x, &tri).unwrap();
        let eval_at = |x: &[f64]| {
            let r: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            g.eval_jet(r, 0).unwrap().value().re * x[0] / r
        };
        assert!((f.v - eval_at(&x)).abs() < 1e-13);
        let h = 1e-5;
        for i in 0..n {
            let mut xp = x;
            xp[i] += h;
            let mut xm = x;
            xm[i] -= h;
            let fd = (eval_at(&xp) - eval_at(&xm)) / (2.0 * h);
            assert!((f.g[i] - fd).abs() < 1e-7 * (1.0 + fd.abs()), "grad {i}");
        }
        for i in 0..n {
            for j in 0..n {
                let mut xpp = x;
                xpp[i] += h;
                xpp[j] += h;
                let mut xpm = x;
                xpm[i] += h;
                xpm[j] -= h;
                let mut xmp = x;
                xmp[i] -= h;
                xmp[j] += h;
                let mut xmm = x;
                xmm[i] -= h;
                xmm[j] -= h;
                let fd = (eval_at(&xpp) - eval_at(&xpm) - eval_at(&xmp) + eval_at(&xmm))
                    / (4.0 * h * h);
                assert!(
                    (f.hess(i, j) - fd).abs() < 2e-4 * (1.0 + fd.abs()),
                    "hess {i}{j}: {} vs {fd}",
                    f.hess(i, j)
                );
            }
        }
    }

    #[test]
    fn third_tensor_spot_check() {
        // x0²·x1 has exactly one nonzero third derivative
        let n = 3;
        let tri = TripleIndex::new(n);
        let x = [1.3, -0.7, 0.4];
        let f = NJet::coord(n, &tri, 0, x[0])
            .mul(&NJet::coord(n, &tri, 0, x[0]), &tri)
            .mul(&NJet::coord(n, &tri, 1, x[1]), &tri);
        assert!((f.v - x[0] * x[0] * x[1]).abs() < 1e-15);
        assert!((f.third(&tri, 0, 0, 1) - 2.0).abs() < 1e-15);
        assert!(f.third(&tri, 0, 0, 0).abs() < 1e-15);
        assert!((f.hess(0, 1) - 2.0 * x[0]).abs() < 1e-15);
    }

    #[test]
    fn oracle_is_deterministic() {
        let g = bump();
        let mode = ModeSpec::new(5, 1).unwrap();
        let a = mc_oracle(ModeIdentity::Mow, &mode, &g, 2000, 42).unwrap();
        let b = mc_oracle(ModeIdentity::Mow, &mode, &g, 2000, 42).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.1.value.to_bits(), y.1.value.to_bits());
        }
        let c = mc_oracle(ModeIdentity::Mow, &mode, &g, 2000, 43).unwrap();
        assert!(a.iter().zip(c.iter()).any(|(x, y)| x.1.value != y.1.value));
    }

    #[test]
    fn odd_mode_has_zero_mean() {
        // parity: ∫ f dx vanishes for the odd harmonic; the sampler sees
        // it as consistent with 0 within 3 standard errors
        let g = bump();
        let mode = ModeSpec::new(5, 1).unwrap();
        let n = 5;
        let tri = TripleIndex::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sigma = 1.8 / (n as f64).sqrt();
        let log_norm = -(n as f64) / 2.0 * (2.0 * std::f64::consts::PI * sigma * sigma).ln();
        let mut mean = 0.0;
        let mut m2 = 0.0;
        let draws = 40_000;
        for c in 1..=draws {
            let x: Vec<f64> = (0..n)
                .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let r2: f64 = x.iter().map(|a| a * a).sum();
            let r = r2.sqrt();
            let v = if r > 1.0 && r < 2.2 {
                let w = (r2 / (2.0 * sigma * sigma) - log_norm).exp();
                eval_separable(&g, &mode, &x, &tri).unwrap().v * w
            } else {
                0.0
            };
            let d = v - mean;
            mean += d / c as f64;
            m2 += d * (v - mean);
        }
        let se = (m2 / (draws as f64 - 1.0) / draws as f64).sqrt();
        assert!(mean.abs() <= 3.0 * se, "mean {mean} se {se}");
    }
}
