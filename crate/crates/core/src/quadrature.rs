//! Weighted radial integration: sphere_mass × ∫ F(r) r^{Q−1} dr by
//! adaptive Gauss–Kronrod (7–15) bisection with declared breakpoints.
//!
//! Subdivision is recursive and left-first, and panel sums use compensated
//! accumulation, so results are deterministic for a given subdivision
//! policy. A log-scale variant substitutes t = ln r for integrands whose
//! support spans many decades.

use num_complex::Complex64;

use crate::error::HrError;
use crate::operators::GroupContext;
use crate::profile::RadialProfile;
use crate::Result;

/// Result of one weighted integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: u64,
}

/// A pointwise term value F(r), already including every weight except
/// r^{Q−1}, with its support and interior smoothness breakpoints.
pub struct Integrand<'a> {
    pub f: Box<dyn Fn(f64) -> Result<f64> + 'a>,
    pub support: (f64, f64),
    pub breakpoints: Vec<f64>,
}

impl<'a> Integrand<'a> {
    pub fn new(
        f: impl Fn(f64) -> Result<f64> + 'a,
        support: (f64, f64),
        breakpoints: Vec<f64>,
    ) -> Self {
        Integrand {
            f: Box::new(f),
            support,
            breakpoints,
        }
    }
}

/// Default relative tolerance used by the identity engine.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Default absolute floor.
pub const DEFAULT_ABS_TOL: f64 = 1e-14;

const MAX_DEPTH: u32 = 52;

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Neumaier compensated accumulator, used in a fixed visit order.
#[derive(Default, Clone, Copy)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gk15(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, evals: &mut u64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = (f)(c)?;
    *evals += 15;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = (f)(c - x)?;
        let f2 = (f)(c + x)?;
        fv[j] = f1;
        fv[14 - j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let value = res_k * h;
    let err = rescale_error((res_k - res_g) * h, res_abs * h.abs(), res_asc * h.abs());
    Ok((value, err))
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    budget: f64,
    depth: u32,
    acc: &mut Compensated,
    err_acc: &mut Compensated,
    evals: &mut u64,
) -> Result<()> {
    let (v, e) = gk15(f, a, b, evals)?;
    if e <= budget || depth >= MAX_DEPTH || (b - a) < f64::EPSILON * (a.abs() + b.abs()) {
        acc.add(v);
        err_acc.add(e);
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    refine(f, a, mid, budget / 2.0, depth + 1, acc, err_acc, evals)?;
    refine(f, mid, b, budget / 2.0, depth + 1, acc, err_acc, evals)
}

fn segments(lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut pts = vec![lo];
    for &b in breakpoints {
        if b > lo && b < hi {
            pts.push(b);
        }
    }
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn integrate_inner(
    full: &dyn Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    scale: f64,
    context: &str,
) -> Result<QuadResult> {
    if lo >= hi {
        return Ok(QuadResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let segs = segments(lo, hi, breakpoints);
    let mut evals = 0u64;
    // rough pass for the tolerance scale
    let mut rough = Compensated::default();
    for &(a, b) in &segs {
        let (v, _) = gk15(full, a, b, &mut evals)?;
        rough.add(v.abs());
    }
    let tol = (rel_tol * rough.value().abs().max(scale)).max(abs_tol);
    let total_len = hi - lo;
    let mut acc = Compensated::default();
    let mut err = Compensated::default();
    for &(a, b) in &segs {
        let budget = tol * ((b - a) / total_len);
        refine(full, a, b, budget, 0, &mut acc, &mut err, &mut evals)?;
    }
    let value = acc.value();
    let estimate = err.value();
    let allowed = (rel_tol * value.abs()).max(abs_tol).max(rel_tol * scale);
    if estimate > allowed * 4.0 {
        return Err(HrError::QuadAccuracy {
            estimate,
            tolerance: allowed,
            context: context.to_string(),
        });
    }
    Ok(QuadResult {
        value,
        abs_error_estimate: estimate,
        evaluations: evals,
    })
}

/// sphere_mass × ∫ F(r) r^{Q−1} dr over the integrand's support.
pub fn integrate(
    ctx: &GroupContext,
    g: &Integrand,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    let (lo, hi) = g.support;
    if !hi.is_finite() {
        return Err(HrError::UnboundedSupport);
    }
    let q = ctx.q;
    let full = |r: f64| -> Result<f64> { Ok((g.f)(r)? * r.powf(q - 1.0)) };
    let res = integrate_inner(&full, lo, hi, &g.breakpoints, rel_tol, abs_tol, 0.0, "integrate")?;
    Ok(QuadResult {
        value: res.value * ctx.sphere_mass,
        abs_error_estimate: res.abs_error_estimate * ctx.sphere_mass,
        evaluations: res.evaluations,
    })
}

/// Same contract as [`integrate`] but substitutes t = ln r first, for
/// supports spanning many decades. Requires the support to be bounded away
/// from 0.
pub fn integrate_log_scale(
    ctx: &GroupContext,
    g: &Integrand,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    let (lo, hi) = g.support;
    if !hi.is_finite() {
        return Err(HrError::UnboundedSupport);
    }
    if !(lo > 0.0) {
        return Err(HrError::Domain(
            "integrate_log_scale needs support bounded away from 0".into(),
        ));
    }
    let q = ctx.q;
    let full = |t: f64| -> Result<f64> {
        let r = t.exp();
        Ok((g.f)(r)? * (q * t).exp())
    };
    let bps: Vec<f64> = g.breakpoints.iter().filter(|b| **b > 0.0).map(|b| b.ln()).collect();
    let res = integrate_inner(
        &full,
        lo.ln(),
        hi.ln(),
        &bps,
        rel_tol,
        abs_tol,
        0.0,
        "integrate_log_scale",
    )?;
    Ok(QuadResult {
        value: res.value * ctx.sphere_mass,
        abs_error_estimate: res.abs_error_estimate * ctx.sphere_mass,
        evaluations: res.evaluations,
    })
}

/// Precomputed data for the removable singularity of
/// (f − f_R)/ln(R/r) at r = R (f_R ≡ f(R) for radial f).
#[derive(Debug, Clone)]
pub struct CritRatio {
    big_r: f64,
    f_big_r: Complex64,
    /// log-derivatives A_k = (r d/dr)^k f at R, k = 1..=4
    a: [Complex64; 4],
}

impl CritRatio {
    pub fn new(f: &RadialProfile, big_r: f64) -> Result<Self> {
        if !(big_r > 0.0) {
            return Err(HrError::InvalidParam(format!("R must be > 0, got {big_r}")));
        }
        let ord = f.max_order().min(4);
        let j = f.eval_jet(big_r, ord)?;
        let d = |k: usize| {
            if k <= ord {
                j.deriv(k)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let r1 = big_r;
        let r2 = big_r * big_r;
        let r3 = r2 * big_r;
        let r4 = r3 * big_r;
        // Stirling-number expansion of (r d/dr)^k
        let a = [
            r1 * d(1),
            r1 * d(1) + r2 * d(2),
            r1 * d(1) + 3.0 * r2 * d(2) + r3 * d(3),
            r1 * d(1) + 7.0 * r2 * d(2) + 6.0 * r3 * d(3) + r4 * d(4),
        ];
        Ok(CritRatio {
            big_r,
            f_big_r: j.value(),
            a,
        })
    }

    pub fn f_at_big_r(&self) -> Complex64 {
        self.f_big_r
    }

    /// (f(r) − f(R)) / ln(R/r), with the series fill for |ln(r/R)| ≤ 1e−3.
    pub fn eval(&self, f: &RadialProfile, r: f64) -> Result<Complex64> {
        let s = (r / self.big_r).ln();
        if s.abs() <= 1e-3 {
            let [a1, a2, a3, a4] = self.a;
            Ok(-(a1 + s * (a2 / 2.0 + s * (a3 / 6.0 + s * a4 / 24.0))))
        } else {
            let v = f.eval_jet(r, 0)?.value();
            Ok((v - self.f_big_r) / (-s))
        }
    }
}

/// |f − f_R|^p / (r^Q |ln(R/r)|^p) with the removable singularity at r = R
/// filled by its limit |R f'(R)|^p / R^Q.
pub fn critical_ratio_value(
    ctx: &GroupContext,
    f: &RadialProfile,
    big_r: f64,
    r: f64,
    p: f64,
) -> Result<f64> {
    let cr = CritRatio::new(f, big_r)?;
    let ratio = cr.eval(f, r)?;
    Ok(ratio.norm().powf(p) * r.powf(-ctx.q))
}
