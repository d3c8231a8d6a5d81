//! Jets: the value and derivatives of a radial function at one radius.
//!
//! A [`Jet`] stores plain derivative values `d[k] = f^(k)(r)` (not scaled
//! Taylor coefficients). Products use the Leibniz rule; the series helpers
//! below convert to scaled coefficients internally where a recurrence is
//! more natural (exp, reciprocal).

use num_complex::Complex64;

use crate::error::HrError;
use crate::Result;

/// Largest derivative order the engine supports (enough for R·R₂^k, k ≤ 7).
pub const MAX_SUPPORTED_ORDER: usize = 16;

const BINOM_N: usize = MAX_SUPPORTED_ORDER + 1;

/// Binomial coefficient C(n, k) for n ≤ MAX_SUPPORTED_ORDER, as f64.
pub fn binom(n: usize, k: usize) -> f64 {
    debug_assert!(n < BINOM_N && k <= n);
    BINOM_TABLE[n][k]
}

static BINOM_TABLE: [[f64; BINOM_N]; BINOM_N] = build_binom();

const fn build_binom() -> [[f64; BINOM_N]; BINOM_N] {
    let mut t = [[0.0f64; BINOM_N]; BINOM_N];
    let mut n = 0;
    while n < BINOM_N {
        t[n][0] = 1.0;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0.0 };
            k += 1;
        }
        n += 1;
    }
    t
}

fn factorials() -> [f64; BINOM_N] {
    let mut f = [1.0f64; BINOM_N];
    for k in 1..BINOM_N {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// Value and derivatives of a radial profile at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    radius: f64,
    derivs: Vec<Complex64>,
}

impl Jet {
    pub fn new(radius: f64, derivs: Vec<Complex64>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(HrError::Domain(format!("jet radius must be > 0, got {radius}")));
        }
        if derivs.is_empty() {
            return Err(HrError::Domain("jet needs at least the value entry".into()));
        }
        if derivs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(HrError::Domain("jet entries must be finite".into()));
        }
        Ok(Jet { radius, derivs })
    }

    pub fn zero(radius: f64, order: usize) -> Self {
        Jet {
            radius,
            derivs: vec![Complex64::new(0.0, 0.0); order + 1],
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Highest derivative order carried.
    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    /// k-th derivative value.
    pub fn deriv(&self, k: usize) -> Complex64 {
        self.derivs[k]
    }

    pub fn value(&self) -> Complex64 {
        self.derivs[0]
    }

    pub fn derivs(&self) -> &[Complex64] {
        &self.derivs
    }

    pub(crate) fn from_raw(radius: f64, derivs: Vec<Complex64>) -> Self {
        Jet { radius, derivs }
    }
}

/// Leibniz product of two derivative-value sequences, truncated to the
/// shorter length. This is the single multiplication path shared by profile
/// evaluation and by direct jet products, so the two agree bit for bit.
pub fn leibniz_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().min(b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (d, slot) in out.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for m in 0..=d {
            s += binom(d, m) * a[m] * b[d - m];
        }
        *slot = s;
    }
    out
}

/// Derivative values of r ↦ r^a at radius r, orders 0..=order.
pub fn power_derivs(a: f64, r: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut coeff = 1.0;
    for d in 0..=order {
        out.push(coeff * r.powf(a - d as f64));
        coeff *= a - d as f64;
    }
    out
}

// ---- real Taylor-series helpers (scaled coefficients) ----

/// Derivative values -> scaled Taylor coefficients.
pub fn to_taylor(d: &[f64]) -> Vec<f64> {
    let fact = factorials();
    d.iter().enumerate().map(|(k, v)| v / fact[k]).collect()
}

/// Scaled Taylor coefficients -> derivative values.
pub fn from_taylor(t: &[f64]) -> Vec<f64> {
    let fact = factorials();
    t.iter().enumerate().map(|(k, v)| v * fact[k]).collect()
}

/// exp of a series given as derivative values; returns derivative values.
pub fn series_exp(d: &[f64]) -> Vec<f64> {
    let a = to_taylor(d);
    let n = a.len();
    let mut e = vec![0.0; n];
    e[0] = a[0].exp();
    for k in 1..n {
        let mut s = 0.0;
        for j in 1..=k {
            s += j as f64 * a[j] * e[k - j];
        }
        e[k] = s / k as f64;
    }
    from_taylor(&e)
}

/// 1/series, input and output as derivative values. Requires d[0] != 0.
pub fn series_recip(d: &[f64]) -> Vec<f64> {
    let a = to_taylor(d);
    let n = a.len();
    let mut b = vec![0.0; n];
    b[0] = 1.0 / a[0];
    for k in 1..n {
        let mut s = 0.0;
        for j in 1..=k {
            s += a[j] * b[k - j];
        }
        b[k] = -s * b[0];
    }
    from_taylor(&b)
}

/// e^{iθ} for a real series θ (derivative values); returns complex
/// derivative values.
pub fn series_exp_i(theta: &[f64]) -> Vec<Complex64> {
    let fact = factorials();
    let a: Vec<f64> = theta.iter().enumerate().map(|(k, v)| v / fact[k]).collect();
    let n = a.len();
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    e[0] = Complex64::new(0.0, a[0]).exp();
    for k in 1..n {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            s += j as f64 * Complex64::new(0.0, a[j]) * e[k - j];
        }
        e[k] = s / k as f64;
    }
    e.iter_mut().enumerate().for_each(|(k, v)| *v *= fact[k]);
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_rows() {
        assert_eq!(binom(4, 2), 6.0);
        assert_eq!(binom(7, 0), 1.0);
        assert_eq!(binom(7, 7), 1.0);
        assert_eq!(binom(10, 3), 120.0);
    }

    #[test]
    fn power_rule_monomial() {
        // r^3 at r=2, orders 0..3 -> (8, 12, 12, 6)
        let d = power_derivs(3.0, 2.0, 3);
        assert_eq!(d, vec![8.0, 12.0, 12.0, 6.0]);
    }

    #[test]
    fn exp_series_matches_closed_form() {
        // f(r) = exp(u), u = 2r at r=1.5: derivatives e^{3}·2^k
        let u = [3.0, 2.0, 0.0, 0.0, 0.0];
        let e = series_exp(&u);
        for (k, v) in e.iter().enumerate() {
            let expect = 3.0f64.exp() * 2.0f64.powi(k as i32);
            assert!((v - expect).abs() <= 1e-12 * expect.abs());
        }
    }

    #[test]
    fn recip_series_matches_power() {
        // 1/r at r = 4 equals power_derivs(-1, 4)
        let r = [4.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let inv = series_recip(&r);
        let expect = power_derivs(-1.0, 4.0, 5);
        for (a, b) in inv.iter().zip(expect.iter()) {
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0));
        }
    }

    #[test]
    fn exp_i_unit_modulus() {
        let theta = [0.7, 1.3, -0.2, 0.05];
        let e = series_exp_i(&theta);
        assert!((e[0].norm() - 1.0).abs() < 1e-14);
        // derivative of e^{iθ} is iθ' e^{iθ}
        let expect = Complex64::new(0.0, theta[1]) * e[0];
        assert!((e[1] - expect).norm() < 1e-13);
    }
}
