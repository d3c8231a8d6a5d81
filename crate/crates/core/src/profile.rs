//! Radial test functions with exact derivatives.
//!
//! A [`RadialProfile`] is an expression tree over a few atoms (powers,
//! log-powers, smooth cutoffs and their complements) and combinators
//! (sum, product, scalar, dilation, complex polar form). Evaluation at a
//! radius produces a [`Jet`] of exact derivative values; outside the
//! tracked support the jet is exactly zero.
//!
//! The string grammar accepted by [`RadialProfile::parse`]:
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := bump:a,b | hipass:a,b | pow:a | logpow:R=x,g=y
//!         | scale:c(expr) | dilate:l(expr) | polar(expr, theta=expr)
//!         | (expr)
//! ```

use std::fmt;

use num_complex::Complex64;

use crate::error::HrError;
use crate::jet::{
    leibniz_mul, power_derivs, series_exp, series_exp_i, series_recip, Jet, MAX_SUPPORTED_ORDER,
};
use crate::Result;

/// Smooth cutoff specification: identically 1 on `[0, inner]`, identically
/// 0 on `[outer, ∞)`, with all derivatives vanishing at both junctions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub inner: f64,
    pub outer: f64,
}

impl CutoffSpec {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(0.0 < inner && inner < outer) {
            return Err(HrError::InvalidParam(format!(
                "cutoff needs 0 < inner < outer, got ({inner}, {outer})"
            )));
        }
        Ok(CutoffSpec { inner, outer })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Kind {
    /// r ↦ r^a on (0, ∞)
    Power(f64),
    /// r ↦ (ln(R/r))^γ on (0, R)
    LogPower { big_r: f64, gamma: f64 },
    /// mollifier ramp: 1 on [0, inner], 0 on [outer, ∞)
    Cutoff(CutoffSpec),
    /// 1 − cutoff: 0 on [0, inner], 1 on [outer, ∞)
    HiPass(CutoffSpec),
    Scale(Complex64, Box<Kind>),
    Add(Box<Kind>, Box<Kind>),
    Mul(Box<Kind>, Box<Kind>),
    /// r ↦ f(λ r)
    Dilate(f64, Box<Kind>),
    /// ρ(r)·e^{iθ(r)} with real ρ, θ
    Polar { rho: Box<Kind>, theta: Box<Kind> },
}

/// A radial test function with exact derivatives up to `max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    kind: Kind,
    support: (f64, f64),
    junctions: Vec<f64>,
    max_order: usize,
}

/// Default derivative order carried by profiles: 2·K_max + 1 with K_max = 3,
/// enough for R·R₂^k up to k = 3.
pub const DEFAULT_MAX_ORDER: usize = 7;

impl RadialProfile {
    fn build(kind: Kind) -> Self {
        let support = kind.support();
        let mut junctions = Vec::new();
        kind.collect_junctions(&mut junctions);
        junctions.retain(|x| x.is_finite() && *x > support.0 && *x < support.1);
        junctions.sort_by(|a, b| a.partial_cmp(b).unwrap());
        junctions.dedup();
        RadialProfile {
            kind,
            support,
            junctions,
            max_order: DEFAULT_MAX_ORDER,
        }
    }

    /// Pure power r^a with exact derivatives a(a−1)…(a−d+1) r^{a−d}.
    pub fn power(a: f64) -> Self {
        Self::build(Kind::Power(a))
    }

    /// (ln(R/r))^γ on (0, R); derivatives by a closed-form recursion.
    pub fn log_power(big_r: f64, gamma: f64) -> Result<Self> {
        if !(big_r > 0.0) {
            return Err(HrError::InvalidParam(format!("log_power needs R > 0, got {big_r}")));
        }
        Ok(Self::build(Kind::LogPower { big_r, gamma }))
    }

    /// Smooth cutoff (mollifier ramp), 1 on [0, inner], 0 on [outer, ∞).
    pub fn cutoff(spec: CutoffSpec) -> Self {
        Self::build(Kind::Cutoff(spec))
    }

    /// Complement of a cutoff: 0 on [0, inner], 1 on [outer, ∞).
    pub fn hi_pass(spec: CutoffSpec) -> Self {
        Self::build(Kind::HiPass(spec))
    }

    pub fn add(self, other: RadialProfile) -> Self {
        Self::build(Kind::Add(Box::new(self.kind), Box::new(other.kind)))
    }

    pub fn mul(self, other: RadialProfile) -> Self {
        Self::build(Kind::Mul(Box::new(self.kind), Box::new(other.kind)))
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self::build(Kind::Scale(c, Box::new(self.kind)))
    }

    pub fn scale_re(self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// r ↦ f(λ r), λ > 0.
    pub fn dilate(self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(HrError::InvalidParam(format!("dilate needs λ > 0, got {lambda}")));
        }
        Ok(Self::build(Kind::Dilate(lambda, Box::new(self.kind))))
    }

    /// ρ(r)·e^{iθ(r)}. Both parts must be real-valued; ρ must be ≥ 0 on the
    /// open support (checked pointwise during evaluation).
    pub fn complex_polar(rho: RadialProfile, theta: RadialProfile) -> Result<Self> {
        if !rho.kind.is_real() || !theta.kind.is_real() {
            return Err(HrError::InvalidParam(
                "complex_polar parts must be real-valued profiles".into(),
            ));
        }
        Ok(Self::build(Kind::Polar {
            rho: Box::new(rho.kind),
            theta: Box::new(theta.kind),
        }))
    }

    pub fn with_max_order(mut self, order: usize) -> Result<Self> {
        if order > MAX_SUPPORTED_ORDER {
            return Err(HrError::InvalidParam(format!(
                "max_order {order} exceeds supported cap {MAX_SUPPORTED_ORDER}"
            )));
        }
        self.max_order = order;
        Ok(self)
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Support interval [lo, hi]; the profile is exactly zero outside.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Interior smoothness junctions (cutoff edges) for quadrature splits.
    pub fn junctions(&self) -> &[f64] {
        &self.junctions
    }

    /// True when the support is bounded away from both 0 and ∞.
    pub fn is_strict_support(&self) -> bool {
        self.support.0 > 0.0 && self.support.1.is_finite()
    }

    /// True when the profile takes only real values.
    pub fn is_real(&self) -> bool {
        self.kind.is_real()
    }

    /// Polar parts (ρ, θ) when the profile is a top-level polar form.
    pub fn polar_parts(&self) -> Option<(RadialProfile, RadialProfile)> {
        match &self.kind {
            Kind::Polar { rho, theta } => Some((
                RadialProfile::build((**rho).clone()),
                RadialProfile::build((**theta).clone()),
            )),
            _ => None,
        }
    }

    /// Evaluate value and derivatives 0..=order at radius r.
    pub fn eval_jet(&self, r: f64, order: usize) -> Result<Jet> {
        if !(r > 0.0) {
            return Err(HrError::Domain(format!("evaluation radius must be > 0, got {r}")));
        }
        if order > self.max_order {
            return Err(HrError::OrderExceeded {
                requested: order,
                max: self.max_order,
            });
        }
        let d = self.kind.eval(r, order)?;
        Ok(Jet::from_raw(r, d))
    }

    /// Canonical grammar string for this profile.
    pub fn descriptor(&self) -> String {
        self.kind.to_string()
    }

    /// Parse the profile grammar.
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Parser {
            chars: s.chars().collect(),
            pos: 0,
        };
        let kind = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(HrError::Parse(format!(
                "trailing input at byte {}: `{}`",
                p.pos,
                s[p.pos.min(s.len())..].to_string()
            )));
        }
        Ok(Self::build(kind))
    }
}

impl fmt::Display for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

impl Kind {
    fn support(&self) -> (f64, f64) {
        match self {
            // logpow is not zero beyond R, it is undefined there (checked
            // at evaluation); the support stays unbounded
            Kind::Power(_) | Kind::LogPower { .. } => (0.0, f64::INFINITY),
            Kind::Cutoff(s) => (0.0, s.outer),
            Kind::HiPass(s) => (s.inner, f64::INFINITY),
            Kind::Scale(c, k) => {
                if *c == Complex64::new(0.0, 0.0) {
                    (0.0, 0.0)
                } else {
                    k.support()
                }
            }
            Kind::Add(a, b) => {
                let (la, ha) = a.support();
                let (lb, hb) = b.support();
                (la.min(lb), ha.max(hb))
            }
            Kind::Mul(a, b) => {
                let (la, ha) = a.support();
                let (lb, hb) = b.support();
                let lo = la.max(lb);
                let hi = ha.min(hb);
                if lo >= hi {
                    (0.0, 0.0)
                } else {
                    (lo, hi)
                }
            }
            Kind::Dilate(l, k) => {
                let (lo, hi) = k.support();
                (lo / l, hi / l)
            }
            Kind::Polar { rho, .. } => rho.support(),
        }
    }

    fn collect_junctions(&self, out: &mut Vec<f64>) {
        match self {
            Kind::Cutoff(s) | Kind::HiPass(s) => {
                out.push(s.inner);
                out.push(s.outer);
            }
            Kind::LogPower { big_r, .. } => out.push(*big_r),
            Kind::Scale(_, k) => k.collect_junctions(out),
            Kind::Add(a, b) | Kind::Mul(a, b) => {
                a.collect_junctions(out);
                b.collect_junctions(out);
            }
            Kind::Dilate(l, k) => {
                let mut inner = Vec::new();
                k.collect_junctions(&mut inner);
                out.extend(inner.into_iter().map(|x| x / l));
            }
            Kind::Polar { rho, theta } => {
                rho.collect_junctions(out);
                theta.collect_junctions(out);
            }
            Kind::Power(_) => {}
        }
    }

    fn is_real(&self) -> bool {
        match self {
            Kind::Power(_) | Kind::LogPower { .. } | Kind::Cutoff(_) | Kind::HiPass(_) => true,
            Kind::Scale(c, k) => c.im == 0.0 && k.is_real(),
            Kind::Add(a, b) | Kind::Mul(a, b) => a.is_real() && b.is_real(),
            Kind::Dilate(_, k) => k.is_real(),
            Kind::Polar { .. } => false,
        }
    }

    fn eval(&self, r: f64, order: usize) -> Result<Vec<Complex64>> {
        let (lo, hi) = self.support();
        if r < lo || r > hi || lo >= hi {
            return Ok(vec![Complex64::new(0.0, 0.0); order + 1]);
        }
        match self {
            Kind::Power(a) => Ok(power_derivs(*a, r, order)
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect()),
            Kind::LogPower { big_r, gamma } => log_power_eval(*big_r, *gamma, r, order)
                .map(|v| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect()),
            Kind::Cutoff(s) => Ok(cutoff_eval(s, r, order, false)
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect()),
            Kind::HiPass(s) => Ok(cutoff_eval(s, r, order, true)
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect()),
            Kind::Scale(c, k) => {
                let mut v = k.eval(r, order)?;
                v.iter_mut().for_each(|z| *z *= c);
                Ok(v)
            }
            Kind::Add(a, b) => {
                let va = a.eval(r, order)?;
                let vb = b.eval(r, order)?;
                Ok(va.into_iter().zip(vb).map(|(x, y)| x + y).collect())
            }
            Kind::Mul(a, b) => {
                let va = a.eval(r, order)?;
                let vb = b.eval(r, order)?;
                Ok(leibniz_mul(&va, &vb))
            }
            Kind::Dilate(l, k) => {
                let mut v = k.eval(l * r, order)?;
                let mut pw = 1.0;
                for z in v.iter_mut() {
                    *z *= pw;
                    pw *= l;
                }
                Ok(v)
            }
            Kind::Polar { rho, theta } => {
                let vr = rho.eval(r, order)?;
                if vr[0].re < 0.0 {
                    return Err(HrError::Domain(format!(
                        "polar profile has negative modulus {} at r = {r}",
                        vr[0].re
                    )));
                }
                let vt = theta.eval(r, order)?;
                let tr: Vec<f64> = vt.iter().map(|z| z.re).collect();
                let phase = series_exp_i(&tr);
                Ok(leibniz_mul(&vr, &phase))
            }
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Power(a) => write!(f, "pow:{a}"),
            Kind::LogPower { big_r, gamma } => write!(f, "logpow:R={big_r},g={gamma}"),
            Kind::Cutoff(s) => write!(f, "bump:{},{}", s.inner, s.outer),
            Kind::HiPass(s) => write!(f, "hipass:{},{}", s.inner, s.outer),
            Kind::Scale(c, k) => {
                if c.im == 0.0 {
                    write!(f, "scale:{}({})", c.re, k)
                } else {
                    write!(f, "scale:{}{}{}i({})", c.re, if c.im < 0.0 { "" } else { "+" }, c.im, k)
                }
            }
            Kind::Add(a, b) => write!(f, "{a}+{b}"),
            Kind::Mul(a, b) => {
                let wrap = |k: &Kind| matches!(k, Kind::Add(_, _));
                if wrap(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, "*")?;
                if wrap(b) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Kind::Dilate(l, k) => write!(f, "dilate:{l}({k})"),
            Kind::Polar { rho, theta } => write!(f, "polar({rho}, theta={theta})"),
        }
    }
}

fn log_power_eval(big_r: f64, gamma: f64, r: f64, order: usize) -> Result<Vec<f64>> {
    let w = (big_r / r).ln();
    let gamma_int = gamma >= 0.0 && gamma.fract() == 0.0 && gamma <= 64.0;
    if w <= 0.0 && !gamma_int {
        return Err(HrError::Domain(format!(
            "logpow evaluation at r = {r} >= R = {big_r} with non-integer exponent {gamma}"
        )));
    }
    let wpow = |e: f64| -> f64 {
        if gamma_int {
            // exponents are integers; the recursion keeps them nonnegative
            w.powi(e.round() as i32)
        } else {
            w.powf(e)
        }
    };
    // d-th derivative = r^{-d} Σ_j b[d][j] w^{γ-j}
    let mut b = vec![vec![0.0f64; order + 2]; order + 1];
    b[0][0] = 1.0;
    for d in 0..order {
        for j in 0..=d + 1 {
            let keep = -(d as f64) * b[d].get(j).copied().unwrap_or(0.0);
            let shift = if j > 0 {
                -(gamma - (j as f64 - 1.0)) * b[d][j - 1]
            } else {
                0.0
            };
            b[d + 1][j] = keep + shift;
        }
    }
    let mut out = Vec::with_capacity(order + 1);
    for (d, row) in b.iter().enumerate() {
        let mut s = 0.0;
        for (j, coeff) in row.iter().enumerate().take(d + 1) {
            if *coeff != 0.0 {
                s += coeff * wpow(gamma - j as f64);
            }
        }
        out.push(s * r.powi(-(d as i32)));
    }
    Ok(out)
}

/// Mollifier ramp s(t) = e^{−1/t}/(e^{−1/t} + e^{−1/(1−t)}) evaluated with
/// t = (outer−r)/(outer−inner), so the cutoff is 1 at the inner edge and 0
/// at the outer edge; `complement` flips it.
fn cutoff_eval(spec: &CutoffSpec, r: f64, order: usize, complement: bool) -> Vec<f64> {
    let n = order + 1;
    let mut one = vec![0.0; n];
    one[0] = 1.0;
    if r <= spec.inner {
        return if complement { vec![0.0; n] } else { one };
    }
    if r >= spec.outer {
        return if complement { one } else { vec![0.0; n] };
    }
    let width = spec.outer - spec.inner;
    let t0 = (spec.outer - r) / width;
    // series of t(r) and 1-t(r) in r (derivative values)
    let mut t = vec![0.0; n];
    t[0] = t0;
    if n > 1 {
        t[1] = -1.0 / width;
    }
    let mut omt = vec![0.0; n];
    omt[0] = 1.0 - t0;
    if n > 1 {
        omt[1] = 1.0 / width;
    }
    let u = series_exp(&neg(&series_recip(&t)));
    let v = series_exp(&neg(&series_recip(&omt)));
    let sum: Vec<f64> = u.iter().zip(v.iter()).map(|(a, b)| a + b).collect();
    let denom_inv = series_recip(&sum);
    // near either plateau the ratio u/(u+v) is 1 minus an exponentially
    // small tail; computing the big branch directly cancels
    // catastrophically, so always form the small branch and complement it
    let small_is_v = t0 >= 0.5;
    let small = if small_is_v {
        real_mul(&v, &denom_inv) // = 1 − s
    } else {
        real_mul(&u, &denom_inv) // = s
    };
    // value = s for the cutoff, 1−s for the complement; `small` holds
    // 1−s when small_is_v, s otherwise
    let want_small = complement == small_is_v;
    if want_small {
        small
    } else {
        let mut out = neg(&small);
        out[0] += 1.0;
        out
    }
}

fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

fn real_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let ac: Vec<Complex64> = a.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    let bc: Vec<Complex64> = b.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    leibniz_mul(&ac, &bc).into_iter().map(|z| z.re).collect()
}

// ---- grammar parser ----

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(HrError::Parse(format!(
                "expected `{c}` at position {}, found {:?}",
                self.pos,
                self.chars.get(self.pos)
            )))
        }
    }

    fn expr(&mut self) -> Result<Kind> {
        let mut acc = self.term()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            let rhs = self.term()?;
            acc = Kind::Add(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Kind> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = Kind::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let mut seen_e = false;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            let ok = c.is_ascii_digit()
                || c == '.'
                || (c == '-' && (self.pos == start || seen_e_last(&self.chars, self.pos)))
                || (c == '+' && seen_e_last(&self.chars, self.pos))
                || c == 'e'
                || c == 'E';
            if c == 'e' || c == 'E' {
                if seen_e {
                    break;
                }
                seen_e = true;
            }
            if !ok {
                break;
            }
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.trim()
            .parse::<f64>()
            .map_err(|_| HrError::Parse(format!("bad number `{s}` at position {start}")))
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn factor(&mut self) -> Result<Kind> {
        if self.peek() == Some('(') {
            self.eat('(')?;
            let e = self.expr()?;
            self.eat(')')?;
            return Ok(e);
        }
        let name = self.ident();
        match name.as_str() {
            "bump" | "hipass" => {
                self.eat(':')?;
                let a = self.number()?;
                self.eat(',')?;
                let b = self.number()?;
                let spec = CutoffSpec::new(a, b)?;
                Ok(if name == "bump" {
                    Kind::Cutoff(spec)
                } else {
                    Kind::HiPass(spec)
                })
            }
            "pow" => {
                self.eat(':')?;
                Ok(Kind::Power(self.number()?))
            }
            "logpow" => {
                self.eat(':')?;
                let key = self.ident();
                if key != "R" {
                    return Err(HrError::Parse(format!("logpow expects R=..., got `{key}`")));
                }
                self.eat('=')?;
                let big_r = self.number()?;
                self.eat(',')?;
                let key = self.ident();
                if key != "g" {
                    return Err(HrError::Parse(format!("logpow expects g=..., got `{key}`")));
                }
                self.eat('=')?;
                let gamma = self.number()?;
                if !(big_r > 0.0) {
                    return Err(HrError::Parse("logpow needs R > 0".into()));
                }
                Ok(Kind::LogPower { big_r, gamma })
            }
            "scale" => {
                self.eat(':')?;
                let c = self.number()?;
                self.eat('(')?;
                let e = self.expr()?;
                self.eat(')')?;
                Ok(Kind::Scale(Complex64::new(c, 0.0), Box::new(e)))
            }
            "dilate" => {
                self.eat(':')?;
                let l = self.number()?;
                if !(l > 0.0) {
                    return Err(HrError::Parse("dilate needs λ > 0".into()));
                }
                self.eat('(')?;
                let e = self.expr()?;
                self.eat(')')?;
                Ok(Kind::Dilate(l, Box::new(e)))
            }
            "polar" => {
                self.eat('(')?;
                let rho = self.expr()?;
                self.eat(',')?;
                let key = self.ident();
                if key != "theta" {
                    return Err(HrError::Parse(format!("polar expects theta=..., got `{key}`")));
                }
                self.eat('=')?;
                let theta = self.expr()?;
                self.eat(')')?;
                if !rho.is_real() || !theta.is_real() {
                    return Err(HrError::Parse("polar parts must be real".into()));
                }
                Ok(Kind::Polar {
                    rho: Box::new(rho),
                    theta: Box::new(theta),
                })
            }
            other => Err(HrError::Parse(format!(
                "unknown profile atom `{other}` at position {}",
                self.pos
            ))),
        }
    }
}

fn seen_e_last(chars: &[char], pos: usize) -> bool {
    pos > 0 && matches!(chars[pos - 1], 'e' | 'E')
}
