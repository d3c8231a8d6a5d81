//! Closed-form constants, composite sharp constants and parameter-validity
//! windows for every catalogue entry, plus the factorial-product
//! comparisons between the critical constants and the classical ones.
//!
//! Products are always accumulated in ascending index order so reports are
//! bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::error::HrError;
use crate::Result;

/// One parameter point of the catalogue: homogeneous dimension Q plus the
/// optional exponents and orders an entry consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_crit: Option<f64>,
}

impl ParamPoint {
    pub fn new(q: f64) -> Self {
        ParamPoint {
            q,
            p: None,
            alpha: None,
            k: None,
            l: None,
            r_crit: None,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_l(mut self, l: usize) -> Self {
        self.l = Some(l);
        self
    }

    pub fn with_r_crit(mut self, r: f64) -> Self {
        self.r_crit = Some(r);
        self
    }

    pub fn p(&self) -> f64 {
        self.p.unwrap_or(2.0)
    }

    /// Conjugate exponent p' = p/(p−1).
    pub fn p_prime(&self) -> f64 {
        let p = self.p();
        p / (p - 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(0.0)
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(1)
    }

    pub fn l(&self) -> usize {
        self.l.unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0) {
            return Err(HrError::InvalidParam(format!("Q must be > 0, got {}", self.q)));
        }
        if let Some(p) = self.p {
            if !(p > 1.0) {
                return Err(HrError::InvalidParam(format!("p must be > 1, got {p}")));
            }
        }
        if let Some(r) = self.r_crit {
            if !(r > 0.0) {
                return Err(HrError::InvalidParam(format!("R must be > 0, got {r}")));
            }
        }
        Ok(())
    }
}

/// A named constant with its validity flag (whether the parameter point
/// lies inside the theorem's stated window, so the inequality direction is
/// asserted).
#[derive(Debug, Clone, Serialize)]
pub struct ConstantValue {
    pub name: String,
    pub value: f64,
    pub valid: bool,
}

/// c_α = (Q+2α)(Q−4−2α)/4.
pub fn c_alpha(q: f64, alpha: f64) -> f64 {
    (q + 2.0 * alpha) * (q - 4.0 - 2.0 * alpha) / 4.0
}

/// c_{p,α} = (Q−2p−pα)(Q+p'α)/(pp').
pub fn c_p_alpha(q: f64, p: f64, alpha: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(HrError::InvalidParam(format!("c_p_alpha needs p > 1, got {p}")));
    }
    let pp = p / (p - 1.0);
    Ok((q - 2.0 * p - p * alpha) * (q + pp * alpha) / (p * pp))
}

/// d_{p,α} = (Q−p(1+α))/p.
pub fn d_p_alpha(q: f64, p: f64, alpha: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(HrError::InvalidParam(format!("d_p_alpha needs p > 1, got {p}")));
    }
    Ok((q - p * (1.0 + alpha)) / p)
}

/// a_{j,Q} = 2j(Q−2j−2).
pub fn a_jq(j: usize, q: f64) -> f64 {
    2.0 * j as f64 * (q - 2.0 * j as f64 - 2.0)
}

fn prod(iter: impl Iterator<Item = f64>) -> f64 {
    let mut acc = 1.0;
    for x in iter {
        acc *= x;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product::<f64>().max(1.0)
}

/// α-window in which the inequality direction is asserted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// holds for every real α
    All,
    /// open interval (lo, hi)
    Open(f64, f64),
    /// holds for every α except the puncture (degenerate constant there)
    Punctured(f64),
    /// entry parameters are outside the theorem's scope entirely
    Empty,
}

impl Window {
    pub fn contains(&self, alpha: f64) -> bool {
        match self {
            Window::All => true,
            Window::Open(lo, hi) => *lo < alpha && alpha < *hi,
            Window::Punctured(x) => alpha != *x,
            Window::Empty => false,
        }
    }
}

/// The critical even constant (2^{k−1}(k−1)!/p' · ∏_{i=0}^{k−1}(Q−2i−2))^p.
fn crit_even_root(q: f64, p: f64, k: usize) -> f64 {
    let pp = p / (p - 1.0);
    2.0f64.powi(k as i32 - 1) * factorial(k - 1) / pp * prod((0..k).map(|i| q - 2.0 * i as f64 - 2.0))
}

/// The critical odd constant (2^k k!/p' · ∏_{i=0}^{k−1}(Q−2i−2))^p.
fn crit_odd_root(q: f64, p: f64, k: usize) -> f64 {
    let pp = p / (p - 1.0);
    2.0f64.powi(k as i32) * factorial(k) / pp * prod((0..k).map(|i| q - 2.0 * i as f64 - 2.0))
}

/// Sharp constant of a catalogue inequality or uncertainty entry, together
/// with the validity flag of the parameter point.
///
/// Window note: the stated odd-case window (−(Q+p')/p', (Q−p(2k+1))/p) is
/// used as printed even though the abelian specialisations elsewhere use
/// (−2/p', ·); the discrepancy is intentional and documented, not resolved.
pub fn sharp_constant(id: &str, pt: &ParamPoint) -> Result<ConstantValue> {
    pt.validate()?;
    let q = pt.q;
    let alpha = pt.alpha();
    let p = pt.p();
    let pp = pt.p_prime();
    let k = pt.k();
    let l = pt.l();
    let win = window(id, pt)?;
    let valid = match win {
        Window::Empty => false,
        w => w.contains(alpha),
    };
    let value = match id {
        "INEQ-H2" => ((q - 2.0 - 2.0 * alpha) / 2.0).powi(2),
        "INEQ-R2" => c_alpha(q, alpha).powi(2),
        "INEQ-HR-even" => prod((0..k).map(|i| c_alpha(q, 2.0 * i as f64 + alpha))).powi(2),
        "INEQ-HR-odd" => {
            let base = (q - 2.0 - 2.0 * alpha) / 2.0
                * prod((0..k).map(|i| c_alpha(q, 2.0 * i as f64 + 1.0 + alpha)));
            base.powi(2)
        }
        "INEQ-12" => (q + 2.0 * alpha).powi(2) / 4.0,
        "INEQ-L2new-even" => {
            // 4/(Q−2α)² ∏_{i=0}^{k−l−1}((Q²−4(2i+α)²)/4)² with the i = 0
            // factor cancelled against the prefactor
            let m = k - l;
            let base = (q + 2.0 * alpha) / 2.0
                * prod((1..m).map(|i| (q * q - 4.0 * (2.0 * i as f64 + alpha).powi(2)) / 4.0));
            base.powi(2)
        }
        "INEQ-L2new-odd" => {
            let m = k - l;
            prod((0..m).map(|i| (q * q - 4.0 * (1.0 + alpha + 2.0 * i as f64).powi(2)) / 4.0)).powi(2)
        }
        "INEQ-LpH" => d_p_alpha(q, p, alpha)?.abs().powf(p),
        "INEQ-LpR" => c_p_alpha(q, p, alpha)?.powf(p),
        "INEQ-Lp-even" => prod_res((0..k).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + alpha)))?.powf(p),
        "INEQ-Lp-odd" => {
            let d = d_p_alpha(q, p, alpha)?;
            (d * prod_res((0..k).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + 1.0 + alpha)))?).powf(p)
        }
        "INEQ-Lp12" => ((q + pp * alpha).abs() / pp).powf(p),
        "INEQ-LpHRnew-even" => {
            // p^p/|Q−pα|^p ∏|(Q−p(2i+α))(Q+p'(2i+α))/(pp')|^p with the
            // |Q−pα| factors cancelled
            let m = k - l;
            let base = (q + pp * alpha).abs() / pp
                * prod((1..m).map(|i| {
                    ((q - p * (2.0 * i as f64 + alpha)) * (q + pp * (2.0 * i as f64 + alpha))).abs()
                        / (p * pp)
                }));
            base.powf(p)
        }
        "INEQ-LpHRnew-odd" => {
            let m = k - l;
            prod((0..m).map(|i| {
                ((q - p * (2.0 * i as f64 + 1.0 + alpha)) * (q + pp * (2.0 * i as f64 + 1.0 + alpha)))
                    .abs()
                    / (p * pp)
            }))
            .powf(p)
        }
        "INEQ-crit-H" => ((p - 1.0) / p).powf(p),
        "INEQ-crit-R" => ((q - 2.0) / pp).powf(p),
        "INEQ-crit-even" => crit_even_root(q, p, k).powf(p),
        "INEQ-crit-odd" => crit_odd_root(q, p, k).powf(p),
        "UNC-even" => prod_res((0..l).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + alpha)))?,
        "UNC-odd" => {
            let d = d_p_alpha(q, p, alpha)?;
            (d * prod_res((0..l).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + 1.0 + alpha)))?).abs()
        }
        "UNC-crit-1" | "UNC-crit-3" => crit_even_root(q, p, l),
        "UNC-crit-2" | "UNC-crit-4" => crit_odd_root(q, p, l),
        other => return Err(HrError::UnknownEntry(other.to_string())),
    };
    if !value.is_finite() {
        return Err(HrError::InvalidParam(format!(
            "constant for {id} is not finite at Q={q}, p={p}, α={alpha}, k={k}, l={l}"
        )));
    }
    Ok(ConstantValue {
        name: id.to_string(),
        value,
        valid,
    })
}

fn prod_res(iter: impl Iterator<Item = Result<f64>>) -> Result<f64> {
    let mut acc = 1.0;
    for x in iter {
        acc *= x?;
    }
    Ok(acc)
}

/// The theorem window for the inequality direction at this parameter point.
pub fn window(id: &str, pt: &ParamPoint) -> Result<Window> {
    let q = pt.q;
    let p = pt.p();
    let pp = pt.p_prime();
    let k = pt.k();
    let l = pt.l();
    let m = k.saturating_sub(l);
    Ok(match id {
        "INEQ-H2" | "INEQ-12" | "INEQ-Lp12" => Window::All,
        "INEQ-R2" => Window::Open(-q / 2.0, (q - 4.0) / 2.0),
        "INEQ-HR-even" => Window::Open(-q / 2.0, (q - 4.0 * k as f64) / 2.0),
        "INEQ-HR-odd" => Window::Open(-(q + 2.0) / 2.0, (q - 4.0 * k as f64 - 2.0) / 2.0),
        "INEQ-L2new-even" => {
            if m >= 2 {
                Window::Open(-q / 2.0, (q - 4.0 * (m as f64 - 1.0)) / 2.0)
            } else {
                Window::All
            }
        }
        "INEQ-L2new-odd" => {
            if m >= 2 {
                Window::Open(-(q + 2.0) / 2.0, (q - 4.0 * m as f64 + 2.0) / 2.0)
            } else {
                Window::All
            }
        }
        "INEQ-LpH" => {
            if p < q {
                Window::Punctured((q - p) / p)
            } else {
                Window::Empty
            }
        }
        "INEQ-LpR" => {
            if p < q / 2.0 {
                Window::Open(-(p - 1.0) * q / p, (q - 2.0 * p) / p)
            } else {
                Window::Empty
            }
        }
        "INEQ-Lp-even" | "UNC-even" => {
            let kk = if id == "UNC-even" { l } else { k };
            if p < q / (2.0 * kk as f64) {
                Window::Open(-q * (p - 1.0) / p, (q - 2.0 * p * kk as f64) / p)
            } else {
                Window::Empty
            }
        }
        "INEQ-Lp-odd" => {
            if p < q / (2.0 * k as f64 + 1.0) {
                Window::Open(-(q + pp) / pp, (q - p * (2.0 * k as f64 + 1.0)) / p)
            } else {
                Window::Empty
            }
        }
        "UNC-odd" => {
            if l == 0 {
                Window::All
            } else if p < q / (2.0 * l as f64 + 1.0) {
                Window::Open(-(q + pp) / pp, (q - p * (2.0 * l as f64 + 1.0)) / p)
            } else {
                Window::Empty
            }
        }
        "INEQ-LpHRnew-even" => {
            if m >= 2 {
                Window::Open(-q * (p - 1.0) / p, (q - 2.0 * p * (m as f64 - 1.0)) / p)
            } else {
                Window::All
            }
        }
        "INEQ-LpHRnew-odd" => {
            if m >= 2 {
                Window::Open(-(q + pp) / pp, (q - p * (2.0 * (m as f64 - 1.0) + 1.0)) / p)
            } else {
                Window::All
            }
        }
        "INEQ-crit-H" => Window::All,
        "INEQ-crit-R" => {
            if q >= 3.0 {
                Window::All
            } else {
                Window::Empty
            }
        }
        "INEQ-crit-even" | "UNC-crit-1" | "UNC-crit-3" => {
            let kk = if id == "INEQ-crit-even" { k } else { l };
            if (kk as f64) < q / 2.0 && kk >= 1 {
                Window::All
            } else {
                Window::Empty
            }
        }
        "INEQ-crit-odd" | "UNC-crit-2" | "UNC-crit-4" => {
            let kk = if id == "INEQ-crit-odd" { k } else { l };
            if (kk as f64) <= (q - 1.0) / 2.0 && kk >= 1 {
                Window::All
            } else {
                Window::Empty
            }
        }
        other => return Err(HrError::UnknownEntry(other.to_string())),
    })
}

/// The elementary factors whose strict positivity the inequality direction
/// requires; positive exactly inside the window.
pub fn constant_factors(id: &str, pt: &ParamPoint) -> Result<Vec<f64>> {
    let q = pt.q;
    let alpha = pt.alpha();
    let p = pt.p();
    let k = pt.k();
    let l = pt.l();
    let m = k.saturating_sub(l);
    Ok(match id {
        "INEQ-R2" => vec![c_alpha(q, alpha)],
        "INEQ-HR-even" => (0..k).map(|i| c_alpha(q, 2.0 * i as f64 + alpha)).collect(),
        "INEQ-HR-odd" => (0..k)
            .map(|i| c_alpha(q, 2.0 * i as f64 + 1.0 + alpha))
            .collect(),
        "INEQ-L2new-even" => (0..m.saturating_sub(1))
            .map(|i| c_alpha(q, 2.0 * i as f64 + alpha))
            .collect(),
        "INEQ-L2new-odd" => (0..m.saturating_sub(1))
            .map(|i| c_alpha(q, 2.0 * i as f64 + 1.0 + alpha))
            .collect(),
        "INEQ-LpR" => vec![c_p_alpha(q, p, alpha)?],
        "INEQ-Lp-even" => (0..k)
            .map(|i| c_p_alpha(q, p, 2.0 * i as f64 + alpha))
            .collect::<Result<_>>()?,
        "INEQ-Lp-odd" => {
            let mut v = vec![d_p_alpha(q, p, alpha)?];
            for i in 0..k {
                v.push(c_p_alpha(q, p, 2.0 * i as f64 + 1.0 + alpha)?);
            }
            v
        }
        "INEQ-LpHRnew-even" => (0..m.saturating_sub(1))
            .map(|i| c_p_alpha(q, p, 2.0 * i as f64 + alpha))
            .collect::<Result<_>>()?,
        "INEQ-LpHRnew-odd" => (0..m.saturating_sub(1))
            .map(|i| c_p_alpha(q, p, 2.0 * i as f64 + 1.0 + alpha))
            .collect::<Result<_>>()?,
        "INEQ-crit-even" | "INEQ-crit-odd" => (1..k).map(|i| a_jq(i, q)).collect(),
        _ => Vec::new(),
    })
}

/// One row of the factorial-product comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct FactorialComparison {
    pub k: usize,
    /// 2^{2k−2}(2k−1)! vs k ∏_{i=0}^{k−2}(2i+1)(4k−2i−3); `first_holds`
    /// reports lhs ≥ rhs (defined for k ≥ 2)
    pub first_lhs: Option<f64>,
    pub first_rhs: Option<f64>,
    pub first_holds: Option<bool>,
    /// (2k+1)/2 ∏_{i=0}^{k−1}(2k−2i−1)(2k+2i+1) vs 2^{2k−1}(2k)!;
    /// `second_holds` reports lhs > rhs
    pub second_lhs: f64,
    pub second_rhs: f64,
    pub second_holds: bool,
}

/// Evaluate both end-of-catalogue factorial-product comparisons per k.
pub fn compare_factorial_products(k_range: std::ops::RangeInclusive<usize>) -> Vec<FactorialComparison> {
    let mut rows = Vec::new();
    for k in k_range {
        if k == 0 {
            continue;
        }
        let (first_lhs, first_rhs, first_holds) = if k >= 2 {
            let lhs = 2.0f64.powi(2 * k as i32 - 2) * factorial(2 * k - 1);
            let rhs = k as f64
                * prod((0..=k - 2).map(|i| (2.0 * i as f64 + 1.0) * (4.0 * k as f64 - 2.0 * i as f64 - 3.0)));
            (Some(lhs), Some(rhs), Some(lhs >= rhs))
        } else {
            (None, None, None)
        };
        let second_lhs = (2.0 * k as f64 + 1.0) / 2.0
            * prod((0..k).map(|i| {
                (2.0 * k as f64 - 2.0 * i as f64 - 1.0) * (2.0 * k as f64 + 2.0 * i as f64 + 1.0)
            }));
        let second_rhs = 2.0f64.powi(2 * k as i32 - 1) * factorial(2 * k);
        rows.push(FactorialComparison {
            k,
            first_lhs,
            first_rhs,
            first_holds,
            second_lhs,
            second_rhs,
            second_holds: second_lhs > second_rhs,
        });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_alpha_examples() {
        assert!((c_alpha(5.0, 0.0) - 1.25).abs() < 1e-15);
        assert!((c_alpha(5.0, 0.0).powi(2) - 25.0 / 16.0).abs() < 1e-15);
        assert_eq!(c_alpha(4.0, 0.0), 0.0);
        assert!((c_alpha(9.0, 0.0) - 11.25).abs() < 1e-15);
        assert!((c_alpha(9.0, 0.0).powi(2) - 126.5625).abs() < 1e-12);
    }

    #[test]
    fn c_p_alpha_examples() {
        // p = 2 degeneracy
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let q: f64 = rng.gen_range(2.0..20.0);
            let a: f64 = rng.gen_range(-5.0..5.0);
            let c2 = c_p_alpha(q, 2.0, a).unwrap();
            assert!((c2 - c_alpha(q, a)).abs() <= 1e-14 * c_alpha(q, a).abs().max(1.0));
            let d2 = d_p_alpha(q, 2.0, a).unwrap();
            assert!((d2 - (q - 2.0 - 2.0 * a) / 2.0).abs() <= 1e-14 * d2.abs().max(1.0));
        }
        assert!((d_p_alpha(6.0, 2.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        // independent re-derivation at Q=10, p=2.5, α=0.4: exact rationals
        // (Q−2p−pα)(Q+p'α)/(pp') = 4·(32/3)/(25/6) = 256/25
        assert!((c_p_alpha(10.0, 2.5, 0.4).unwrap() - 10.24).abs() < 1e-13);
        assert!(c_p_alpha(10.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn sharp_constant_classics() {
        // critical odd k=1, Q=6, p=2 -> 16
        let pt = ParamPoint::new(6.0).with_p(2.0).with_k(1);
        let c = sharp_constant("INEQ-crit-odd", &pt).unwrap();
        assert!((c.value - 16.0).abs() < 1e-14);
        // critical even k=1, Q=4, p=2 -> 1
        let pt = ParamPoint::new(4.0).with_p(2.0).with_k(1);
        let c = sharp_constant("INEQ-crit-even", &pt).unwrap();
        assert!((c.value - 1.0).abs() < 1e-14);
        // HR-even k=1 reduces to c_α²
        let pt = ParamPoint::new(9.0).with_alpha(0.3).with_k(1);
        let c = sharp_constant("INEQ-HR-even", &pt).unwrap();
        assert!((c.value - c_alpha(9.0, 0.3).powi(2)).abs() < 1e-12);
        // classical Hardy constant ((Q−p)/p)^p at Q=5, p=2
        let pt = ParamPoint::new(5.0).with_p(2.0).with_alpha(0.0);
        let c = sharp_constant("INEQ-LpH", &pt).unwrap();
        assert!((c.value - 2.25).abs() < 1e-14);
    }

    #[test]
    fn composite_constant_identity() {
        // ((Q+4(k−l−1)+2α)/2)² (∏ c_{2i+α})² = 4/(Q−2α)² (∏ (Q²−4(2i+α)²)/4)²
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let q: f64 = rng.gen_range(5.0..20.0);
            let a: f64 = rng.gen_range(-2.0..2.0);
            let k: usize = rng.gen_range(1..=4);
            let l: usize = rng.gen_range(0..k);
            let m = k - l;
            let lhs = ((q + 4.0 * (m as f64 - 1.0) + 2.0 * a) / 2.0).powi(2)
                * prod((0..m - 1).map(|i| c_alpha(q, 2.0 * i as f64 + a))).powi(2);
            let rhs = 4.0 / (q - 2.0 * a).powi(2)
                * prod((0..m).map(|i| (q * q - 4.0 * (2.0 * i as f64 + a).powi(2)) / 4.0)).powi(2);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "q={q} a={a} m={m}");
            // matches the shipped cancelled form
            let c = sharp_constant("INEQ-L2new-even", &ParamPoint::new(q).with_alpha(a).with_k(k).with_l(l)).unwrap();
            assert!((c.value - rhs).abs() <= 1e-11 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn window_positivity() {
        // factors positive exactly inside the stated open window
        for (id, pt) in [
            ("INEQ-R2", ParamPoint::new(9.0)),
            ("INEQ-HR-even", ParamPoint::new(13.5).with_k(2)),
            ("INEQ-HR-odd", ParamPoint::new(15.5).with_k(2)),
            ("INEQ-LpR", ParamPoint::new(9.0).with_p(1.5)),
            ("INEQ-Lp-even", ParamPoint::new(11.0).with_p(2.5).with_k(2)),
            ("INEQ-Lp-odd", ParamPoint::new(13.0).with_p(1.5).with_k(2)),
            ("INEQ-L2new-even", ParamPoint::new(12.0).with_k(3).with_l(0)),
            ("INEQ-LpHRnew-even", ParamPoint::new(12.0).with_p(1.5).with_k(3).with_l(0)),
        ] {
            let win = window(id, &pt).unwrap();
            let (lo, hi) = match win {
                Window::Open(lo, hi) => (lo, hi),
                other => panic!("{id}: expected an open window, got {other:?}"),
            };
            assert!(lo < hi, "{id} window empty");
            let w = hi - lo;
            for i in 0..100 {
                let a = lo - 0.5 * w + 2.0 * w * (i as f64 + 0.5) / 100.0;
                let factors = constant_factors(id, &pt.with_alpha(a)).unwrap();
                let all_pos = factors.iter().all(|&f| f > 0.0);
                let inside = a > lo && a < hi;
                // exclude α within float-noise of the boundary
                if (a - lo).abs() > 1e-9 && (a - hi).abs() > 1e-9 {
                    assert_eq!(all_pos, inside, "{id} at α={a} (window ({lo},{hi}))");
                }
            }
        }
    }

    #[test]
    fn factorial_comparisons() {
        let rows = compare_factorial_products(1..=6);
        // k=1: 3/2·(1·3) = 4.5 > 2^1·2! = 4
        assert!((rows[0].second_lhs - 4.5).abs() < 1e-14);
        assert!((rows[0].second_rhs - 4.0).abs() < 1e-14);
        assert!(rows[0].second_holds);
        // k=2 first comparison: 2²·3! = 24 ≥ 2·(1·5) = 10
        assert!((rows[1].first_lhs.unwrap() - 24.0).abs() < 1e-12);
        assert!((rows[1].first_rhs.unwrap() - 10.0).abs() < 1e-12);
        assert!(rows[1].first_holds.unwrap());
        // claimed directions hold over the sampled range
        for row in &rows {
            assert!(row.second_holds, "second comparison at k={}", row.k);
            if let Some(h) = row.first_holds {
                assert!(h, "first comparison at k={}", row.k);
            }
        }
    }
}
