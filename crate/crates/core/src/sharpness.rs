//! Extremizing-sequence drivers: plateau-power families f_ε and
//! log-power families f_δ, Rayleigh-quotient traces along a grid, and
//! divergence-law fits against the family's leading divergence.
//!
//! Plateau families are integrated in log scale (their supports span up to
//! sixteen decades). For the log-power families the inner region, where
//! the cutoff is identically one, is integrated exactly in the substituted
//! variable v = w^{−pδ} (w = ln(R/r)); brute-force panels cannot reach
//! that tail for small δ. The operator action on w^γ is carried by an
//! exact log-power series recursion.

use serde::Serialize;

use crate::constants::{self, ParamPoint};
use crate::error::HrError;
use crate::identities::{catalogue, closed, parent_equality};
use crate::operators::{GroupContext, OpAtom, OpChain};
use crate::profile::{CutoffSpec, RadialProfile};
use crate::quadrature::{integrate_log_scale, Integrand};
use crate::Result;

/// Extremizing family kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// (1−φ(r/ε)) r^{−β} φ(εr), supported on [ε, 2/ε]
    PlateauPower,
    /// (ln(R/r))^{1−1/p−δ} φ(r), for the critical entries
    LogPower,
}

/// One grid point of a sharpness trace.
#[derive(Debug, Clone, Serialize)]
pub struct TracePoint {
    /// ε or δ
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub quotient: f64,
    /// relative gap (quotient − C)/C
    pub gap: f64,
}

/// Rayleigh-quotient trace along an extremizing family.
#[derive(Debug, Clone, Serialize)]
pub struct SharpnessTrace {
    pub entry: String,
    pub params: ParamPoint,
    pub family: Family,
    pub sharp_constant: f64,
    pub points: Vec<TracePoint>,
    /// fitted leading coefficients of value = C·x + O(1) against the
    /// divergence abscissa x, from the two finest grid points
    pub lhs_slope: f64,
    pub rhs_slope: f64,
    /// rhs_slope / lhs_slope, which converges to the sharp constant
    pub slope_ratio: f64,
    pub verdict: bool,
}

/// f_ε = (1−φ(r/ε)) r^{−β} φ(εr): identically r^{−β} on [2ε, 1/ε],
/// supported on [ε, 2/ε].
pub fn plateau_power_family(beta: f64, eps: f64) -> Result<RadialProfile> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(HrError::InvalidParam(format!(
            "plateau family needs 0 < ε < 1/4, got {eps}"
        )));
    }
    let inner = RadialProfile::hi_pass(CutoffSpec::new(eps, 2.0 * eps)?);
    let outer = RadialProfile::cutoff(CutoffSpec::new(1.0 / eps, 2.0 / eps)?);
    Ok(inner.mul(RadialProfile::power(-beta)).mul(outer))
}

/// f_δ = (ln(R/r))^{1−1/p−δ} φ(r) with φ = 1 on [0,1], 0 on [2,∞).
pub fn log_power_family(p: f64, delta: f64, big_r: f64) -> Result<RadialProfile> {
    if !(delta > 0.0) {
        return Err(HrError::InvalidParam(format!("log family needs δ > 0, got {delta}")));
    }
    if !(big_r > 2.0) {
        return Err(HrError::InvalidParam(format!("log family needs R > 2, got {big_r}")));
    }
    let gamma = 1.0 - 1.0 / p - delta;
    Ok(RadialProfile::log_power(big_r, gamma)?
        .mul(RadialProfile::cutoff(CutoffSpec::new(1.0, 2.0)?)))
}

/// The plateau exponent β that makes both sides of an inequality entry
/// log-divergent along f_ε.
pub fn plateau_exponent(id: &str, pt: &ParamPoint) -> Result<f64> {
    let q = pt.q;
    let p = pt.p();
    let alpha = pt.alpha();
    let k = pt.k() as f64;
    let l = pt.l() as f64;
    Ok(match id {
        "INEQ-H2" => (q - 2.0 - 2.0 * alpha) / 2.0,
        "INEQ-R2" => (q - 4.0 - 2.0 * alpha) / 2.0,
        "INEQ-HR-even" => (q - 4.0 * k - 2.0 * alpha) / 2.0,
        "INEQ-HR-odd" => (q - 2.0 - 4.0 * k - 2.0 * alpha) / 2.0,
        "INEQ-12" => (q - 4.0 - 2.0 * alpha) / 2.0,
        "INEQ-L2new-even" => (q - 4.0 * (k - l) - 2.0 * alpha) / 2.0,
        "INEQ-L2new-odd" => (q - 2.0 - 4.0 * (k - l) - 2.0 * alpha) / 2.0,
        "INEQ-LpH" => (q - p * (1.0 + alpha)) / p,
        "INEQ-LpR" => (q - p * (2.0 + alpha)) / p,
        "INEQ-Lp-even" => (q - p * (2.0 * k + alpha)) / p,
        "INEQ-Lp-odd" => (q - p * (2.0 * k + 1.0 + alpha)) / p,
        "INEQ-Lp12" => (q - p * (2.0 + alpha)) / p,
        "INEQ-LpHRnew-even" => (q - p * (2.0 * (k - l) + alpha)) / p,
        "INEQ-LpHRnew-odd" => (q - p * (2.0 * (k - l) + 1.0 + alpha)) / p,
        other => {
            return Err(HrError::InvalidParam(format!(
                "{other} has no plateau-power family (critical entries use the log-power family)"
            )))
        }
    })
}

/// The two sides of the inequality evaluated on a profile, in log scale.
fn sides_log_scale(
    id: &str,
    ctx: &GroupContext,
    pt: &ParamPoint,
    f: &RadialProfile,
) -> Result<(f64, f64)> {
    let parent = parent_equality(id).ok_or_else(|| HrError::UnknownEntry(id.to_string()))?;
    let form = closed::repaired_form(parent, pt)?;
    let env = crate::identities::terms::TermEnv::new(ctx, f);
    // reuse the term expressions but integrate in log scale
    let eval = |expr: &crate::identities::IntegrandExpr| -> Result<f64> {
        let g = Integrand::new(
            |r| env.pointwise(expr, r),
            f.support(),
            f.junctions().to_vec(),
        );
        Ok(integrate_log_scale(ctx, &g, 1e-10, 1e-14)?.value)
    };
    let op = eval(&form.lhs.expr)?;
    let fs = eval(&form.rhs[0].expr)?;
    Ok((op, fs))
}

/// A finite sum r^{m} Σ_j a_j w^{γ−j} (w = ln(R/r)), closed under the
/// radial derivative; carries the operator action on the log-power
/// plateau exactly.
#[derive(Debug, Clone)]
pub(crate) struct LogPowSeries {
    gamma: f64,
    /// power of r
    m: i32,
    /// a_j for w^{γ−j}, j = 0..
    coeffs: Vec<f64>,
}

impl LogPowSeries {
    fn new(gamma: f64) -> Self {
        LogPowSeries {
            gamma,
            m: 0,
            coeffs: vec![1.0],
        }
    }

    /// d/dr: r^m Σ a_j w^{γ−j} ↦ r^{m−1} Σ [m a_j − (γ−j+1) a_{j−1}] w^{γ−j}
    fn deriv(&self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len() + 1];
        for (j, slot) in coeffs.iter_mut().enumerate() {
            let keep = self.m as f64 * self.coeffs.get(j).copied().unwrap_or(0.0);
            let shift = if j > 0 {
                -(self.gamma - (j as f64 - 1.0)) * self.coeffs[j - 1]
            } else {
                0.0
            };
            *slot = keep + shift;
        }
        LogPowSeries {
            gamma: self.gamma,
            m: self.m - 1,
            coeffs,
        }
    }

    /// Divide by r^k.
    fn div_r(&self, k: i32) -> Self {
        LogPowSeries {
            gamma: self.gamma,
            m: self.m - k,
            coeffs: self.coeffs.clone(),
        }
    }

    fn add(&self, other: &Self, scale: f64) -> Self {
        debug_assert_eq!(self.m, other.m);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (j, slot) in coeffs.iter_mut().enumerate() {
            *slot = self.coeffs.get(j).copied().unwrap_or(0.0)
                + scale * other.coeffs.get(j).copied().unwrap_or(0.0);
        }
        LogPowSeries {
            gamma: self.gamma,
            m: self.m,
            coeffs,
        }
    }

    fn apply_chain(ctx: &GroupContext, chain: &OpChain, gamma: f64) -> Self {
        let mut s = LogPowSeries::new(gamma);
        for atom in &chain.0 {
            s = match atom {
                OpAtom::R => s.deriv(),
                OpAtom::R2 => {
                    let d2 = s.deriv().deriv();
                    let d1 = s.deriv().div_r(1);
                    d2.add(&d1, ctx.q - 1.0)
                }
            };
        }
        s
    }

    /// Σ_j a_j y^{j} for y = 1/w, after factoring w^{γ−j0} with j0 the
    /// first nonzero index. Returns (j0, poly coefficients from j0).
    fn factored(&self) -> (usize, Vec<f64>) {
        let j0 = self
            .coeffs
            .iter()
            .position(|c| *c != 0.0)
            .unwrap_or(self.coeffs.len());
        (j0, self.coeffs[j0..].to_vec())
    }
}

/// ∫_{w0}^∞ w^{−1−pδ} |P(1/w)|^p dw computed exactly in the substituted
/// variable v = w^{−pδ} (dv = −pδ w^{−1−pδ} dw), where P is the factored
/// operator polynomial on the plateau.
fn tail_integral(pdelta: f64, w0: f64, poly: &[f64], p: f64) -> Result<f64> {
    let v0 = w0.powf(-pdelta);
    let g = Integrand::new(
        move |v| {
            // 1/w = v^{1/(pδ)}
            let y = v.powf(1.0 / pdelta);
            let mut acc = 0.0;
            let mut yp = 1.0;
            for c in poly {
                acc += c * yp;
                yp *= y;
            }
            Ok(acc.abs().powf(p))
        },
        (0.0, v0),
        vec![],
    );
    // flat measure: reuse the radial integrator with Q = 1
    let unit = GroupContext::new(1.0)?;
    Ok(crate::quadrature::integrate(&unit, &g, 1e-11, 1e-300)?.value / pdelta)
}

/// Both sides of a critical inequality along f_δ: exact tail over (0, 1]
/// plus ordinary quadrature over the cutoff band [1, 2].
fn critical_sides(
    id: &str,
    ctx: &GroupContext,
    pt: &ParamPoint,
    delta: f64,
    big_r: f64,
) -> Result<(f64, f64)> {
    let q = ctx.q;
    let p = pt.p();
    let k = pt.k();
    let gamma = 1.0 - 1.0 / p - delta;
    let pdelta = p * delta;
    let w0 = big_r.ln();
    let f = log_power_family(p, delta, big_r)?.with_max_order(2 * k + 2)?;

    // operator chain and weight of the entry's lhs
    let (chain, dorder) = match id {
        "INEQ-crit-H" => (OpChain::r_r2k(0), 1usize),
        "INEQ-crit-R" => (OpChain::r2k(1), 2),
        "INEQ-crit-even" => (OpChain::r2k(k), 2 * k),
        "INEQ-crit-odd" => (OpChain::r_r2k(k), 2 * k + 1),
        other => return Err(HrError::UnknownEntry(other.to_string())),
    };
    let weight = -(q - dorder as f64 * p);

    // plateau part of the op side: the operator on w^γ gives
    // r^{-d} w^{γ-j0} P(1/w); criticality makes the r-powers cancel, so
    // the integrand reduces to w^{-1-pδ} |P(1/w)|^p / r
    let series = LogPowSeries::apply_chain(ctx, &chain, gamma);
    debug_assert_eq!(series.m, -(dorder as i32));
    let (j0, poly) = series.factored();
    // w^{p(γ-j0)} = w^{-1-pδ} requires j0 = 1; guard against degenerate γ
    if j0 != 1 {
        return Err(HrError::InvalidParam(format!(
            "critical family degenerates for {id} at δ = {delta}"
        )));
    }
    let op_tail = tail_integral(pdelta, w0, &poly, p)? * ctx.sphere_mass;

    // band part [1, 2] by ordinary quadrature on the full profile
    let fb = f.clone();
    let cb = chain.clone();
    let cx = *ctx;
    let band = Integrand::new(
        move |r| {
            let j = fb.eval_jet(r, cb.required_order())?;
            let v = cb.apply(&cx, &j)?.value();
            Ok(v.norm().powf(p) * r.powf(weight))
        },
        (1.0, 2.0),
        f.junctions().to_vec(),
    );
    let op_band = crate::quadrature::integrate(ctx, &band, 1e-10, 1e-14)?.value;

    // critical side: (f−f_R ≡ f since φ(R)=0): plateau gives P ≡ 1
    let lhs_tail = tail_integral(pdelta, w0, &[1.0], p)? * ctx.sphere_mass;
    let fb = f.clone();
    let band = Integrand::new(
        move |r| {
            let v = fb.eval_jet(r, 0)?.value().norm();
            let w = (big_r / r).ln();
            Ok((v / w).powf(p) * r.powf(-q))
        },
        (1.0, 2.0),
        f.junctions().to_vec(),
    );
    let lhs_band = crate::quadrature::integrate(ctx, &band, 1e-10, 1e-14)?.value;

    Ok((op_tail + op_band, lhs_tail + lhs_band))
}

/// Run a sharpness trace along the grid: the quotient must stay above the
/// sharp constant, the gap must decrease across decades (1% slack) and
/// close to ≤ 15% at the finest point, and the two-point slope ratio must
/// match the constant within 2%.
pub fn run_trace(
    id: &str,
    ctx: &GroupContext,
    pt: &ParamPoint,
    family: Family,
    grid: &[f64],
) -> Result<SharpnessTrace> {
    if grid.is_empty() {
        return Err(HrError::InvalidParam("sharpness grid is empty".into()));
    }
    let info = catalogue::lookup(id).ok_or_else(|| HrError::UnknownEntry(id.to_string()))?;
    if info.kind != catalogue::EntryKind::Inequality {
        return Err(HrError::InvalidParam(format!("{id} is not an inequality entry")));
    }
    let constant = constants::sharp_constant(id, pt)?;
    let mut points = Vec::with_capacity(grid.len());
    // divergence abscissa per grid point
    let mut xs = Vec::with_capacity(grid.len());
    for &eps in grid {
        let (op, fs, x) = match family {
            Family::PlateauPower => {
                let beta = plateau_exponent(id, pt)?;
                let f = plateau_power_family(beta, eps)?;
                let (op, fs) = sides_log_scale(id, ctx, pt, &f)?;
                (op, fs, -eps.ln())
            }
            Family::LogPower => {
                let big_r = pt.r_crit.unwrap_or(4.0);
                let (op, fs) = critical_sides(id, ctx, pt, eps, big_r)?;
                let p = pt.p();
                (op, fs, big_r.ln().powf(-p * eps) / (p * eps))
            }
        };
        let quotient = op / fs;
        points.push(TracePoint {
            eps,
            lhs: fs,
            rhs: op,
            quotient,
            gap: (quotient - constant.value) / constant.value,
        });
        xs.push(x);
    }
    let n = points.len();
    let (lhs_slope, rhs_slope) = if n >= 2 {
        let dx = xs[n - 1] - xs[n - 2];
        (
            (points[n - 1].lhs - points[n - 2].lhs) / dx,
            (points[n - 1].rhs - points[n - 2].rhs) / dx,
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    let slope_ratio = rhs_slope / lhs_slope;
    let above = points
        .iter()
        .all(|p| p.quotient >= constant.value * (1.0 - 1e-9));
    let monotone = points
        .windows(2)
        .all(|w| w[1].gap <= w[0].gap * 1.01 + 1e-12);
    let final_gap_ok = points.last().map(|p| p.gap <= 0.15).unwrap_or(false);
    let slopes_ok = n < 2 || (slope_ratio / constant.value - 1.0).abs() <= 0.02;
    Ok(SharpnessTrace {
        entry: id.to_string(),
        params: *pt,
        family,
        sharp_constant: constant.value,
        points,
        lhs_slope,
        rhs_slope,
        slope_ratio,
        verdict: above && monotone && final_gap_ok && slopes_ok,
    })
}

/// CSV emission: one row per grid point.
pub fn trace_csv(trace: &SharpnessTrace) -> String {
    let mut out = String::from("epsilon,lhs,rhs,quotient,gap\n");
    for p in &trace.points {
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            p.eps, p.lhs, p.rhs, p.quotient, p.gap
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_family_support_and_plateau() {
        let eps = 0.1;
        let beta = 1.3;
        let f = plateau_power_family(beta, eps).unwrap();
        assert_eq!(f.support(), (eps, 2.0 / eps));
        // equals the pure power on [2ε, 1/ε]
        let pw = RadialProfile::power(-beta);
        for r in [0.25, 1.0, 7.5] {
            let a = f.eval_jet(r, 3).unwrap();
            let b = pw.eval_jet(r, 3).unwrap();
            for k in 0..=3 {
                assert_eq!(a.deriv(k), b.deriv(k), "r={r} k={k}");
            }
        }
        // zero outside
        assert_eq!(f.eval_jet(0.05, 2).unwrap().value().norm(), 0.0);
        assert_eq!(f.eval_jet(25.0, 2).unwrap().value().norm(), 0.0);
    }

    #[test]
    fn plateau_f_side_slope_is_twice_sphere_mass() {
        // ∫ |f_ε|²/r^{4+2α} dμ grows like 2σ(𝔖)(−ln ε) + O(1): the
        // support [ε, 2/ε] spans ε^{-2} decades
        let q = 9.0;
        let alpha = 0.0;
        let ctx = GroupContext::new(q).unwrap();
        let beta = (q - 4.0 - 2.0 * alpha) / 2.0;
        let value = |eps: f64| {
            let f = plateau_power_family(beta, eps).unwrap();
            let fb = f.clone();
            let g = Integrand::new(
                move |r| Ok(fb.eval_jet(r, 0).unwrap().value().norm_sqr() * r.powf(-4.0 - 2.0 * alpha)),
                f.support(),
                f.junctions().to_vec(),
            );
            integrate_log_scale(&ctx, &g, 1e-11, 1e-14).unwrap().value
        };
        let (e1, e2) = (1e-4, 1e-6);
        let slope = (value(e2) - value(e1)) / ((-e2.ln()) - (-e1.ln()));
        assert!(
            (slope - 2.0).abs() <= 0.02 * 2.0,
            "slope {slope} expected 2σ(𝔖) = 2"
        );
    }

    #[test]
    fn log_power_family_vanishes_at_big_r() {
        let f = log_power_family(2.0, 0.05, 4.0).unwrap();
        // φ(R) = 0 for R > 2, so f_R = 0
        assert_eq!(f.eval_jet(4.0, 0).unwrap().value().norm(), 0.0);
    }

    #[test]
    fn critical_lhs_lower_bound_and_divergence() {
        // crit side ≥ (ln R)^{-pδ}/(pδ) σ, and diverges as δ → 0
        let q = 6.0;
        let p = 2.0;
        let big_r = 4.0;
        let ctx = GroupContext::new(q).unwrap();
        let pt = ParamPoint::new(q).with_p(p).with_k(1).with_r_crit(big_r);
        let (_, lhs_a) = critical_sides("INEQ-crit-R", &ctx, &pt, 1e-2, big_r).unwrap();
        let (_, lhs_b) = critical_sides("INEQ-crit-R", &ctx, &pt, 1e-4, big_r).unwrap();
        let bound = |d: f64| big_r.ln().powf(-p * d) / (p * d);
        assert!(lhs_a >= bound(1e-2));
        assert!(lhs_b >= bound(1e-4));
        assert!(lhs_b > 50.0 * lhs_a);
    }

    #[test]
    fn trace_quotient_converges_for_r2() {
        let q = 9.0;
        let ctx = GroupContext::new(q).unwrap();
        let pt = ParamPoint::new(q).with_alpha(0.0);
        let trace = run_trace("INEQ-R2", &ctx, &pt, Family::PlateauPower, &[1e-2, 1e-4]).unwrap();
        assert!((trace.sharp_constant - 126.5625).abs() < 1e-10);
        assert!(trace.points[1].gap < trace.points[0].gap);
        assert!(trace.points.iter().all(|p| p.quotient >= trace.sharp_constant));
    }

    #[test]
    fn trace_critical_odd_dim6_target() {
        let ctx = GroupContext::new(6.0).unwrap();
        let pt = ParamPoint::new(6.0).with_p(2.0).with_k(1).with_r_crit(4.0);
        let trace = run_trace("INEQ-crit-odd", &ctx, &pt, Family::LogPower, &[1e-2, 1e-4]).unwrap();
        assert!((trace.sharp_constant - 16.0).abs() < 1e-12);
        assert!(trace.points[1].gap <= trace.points[0].gap * 1.01);
        assert!(trace.points[1].gap < 0.15);
    }
}
