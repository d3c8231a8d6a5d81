//! The term algebra: every identity is a list of coefficient × integral
//! terms, where the integrand is described by a small closed data type and
//! evaluated through jets and the weighted quadrature.

use num_complex::Complex64;

use crate::error::HrError;
use crate::operators::{GroupContext, OpChain};
use crate::profile::RadialProfile;
use crate::quadrature::{integrate, CritRatio, Integrand, QuadResult};
use crate::remainders::{im_term_jet, modulus_deriv_term_jet, rp};
use crate::Result;

/// One additive atom of a pointwise complex expression in f.
#[derive(Debug, Clone)]
pub enum ArgAtom {
    /// coeff · (chain f)(r) / r^{rpow}
    Op {
        coeff: f64,
        chain: OpChain,
        rpow: f64,
    },
    /// coeff · (f − f_R)/(r ln(R/r))
    CritRatio { coeff: f64 },
}

/// A finite sum of atoms.
#[derive(Debug, Clone)]
pub struct ArgExpr(pub Vec<ArgAtom>);

impl ArgExpr {
    pub fn op(coeff: f64, chain: OpChain, rpow: f64) -> Self {
        ArgExpr(vec![ArgAtom::Op { coeff, chain, rpow }])
    }

    pub fn crit(coeff: f64) -> Self {
        ArgExpr(vec![ArgAtom::CritRatio { coeff }])
    }

    pub fn plus_op(mut self, coeff: f64, chain: OpChain, rpow: f64) -> Self {
        self.0.push(ArgAtom::Op { coeff, chain, rpow });
        self
    }

    fn required_order(&self) -> usize {
        self.0
            .iter()
            .map(|a| match a {
                ArgAtom::Op { chain, .. } => chain.required_order(),
                ArgAtom::CritRatio { .. } => 0,
            })
            .max()
            .unwrap_or(0)
    }

    fn uses_crit(&self) -> bool {
        self.0.iter().any(|a| matches!(a, ArgAtom::CritRatio { .. }))
    }
}

/// Pointwise integrand of one term, excluding the r^{Q−1} measure weight.
#[derive(Debug, Clone)]
pub enum IntegrandExpr {
    /// |arg(r)|^p · r^{rexp}
    AbsPow { arg: ArgExpr, p: f64, rexp: f64 },
    /// R_p(ξ(r), η(r)) · r^{rexp}
    RpTerm {
        p: f64,
        xi: ArgExpr,
        eta: ArgExpr,
        rexp: f64,
    },
    /// |g|^{p−4} (Im(g·conj(Rg)))² · r^{rexp} with g = chain f
    ImTerm { chain: OpChain, p: f64, rexp: f64 },
    /// |g|^{p−2} |R|g| + (c/r)|g||² · r^{rexp} with g = chain f
    ModDeriv {
        chain: OpChain,
        p: f64,
        c: f64,
        rexp: f64,
    },
    /// |f|^{fpow} · |(f − f_R)/ln(R/r)|^s · r^{rexp}
    CritAbs { fpow: f64, s: f64, rexp: f64 },
}

impl IntegrandExpr {
    pub fn abs_chain(chain: OpChain, p: f64, rexp: f64) -> Self {
        IntegrandExpr::AbsPow {
            arg: ArgExpr::op(1.0, chain, 0.0),
            p,
            rexp,
        }
    }

    /// |a + (c/r^{shift}) b|² · r^{rexp}
    pub fn sq_sum(a: OpChain, c: f64, b: OpChain, shift: f64, rexp: f64) -> Self {
        IntegrandExpr::AbsPow {
            arg: ArgExpr::op(1.0, a, 0.0).plus_op(c, b, shift),
            p: 2.0,
            rexp,
        }
    }

    pub fn required_order(&self) -> usize {
        match self {
            IntegrandExpr::AbsPow { arg, .. } => arg.required_order(),
            IntegrandExpr::RpTerm { xi, eta, .. } => xi.required_order().max(eta.required_order()),
            IntegrandExpr::ImTerm { chain, .. } | IntegrandExpr::ModDeriv { chain, .. } => {
                chain.required_order() + 1
            }
            IntegrandExpr::CritAbs { .. } => 0,
        }
    }

    pub fn uses_crit(&self) -> bool {
        match self {
            IntegrandExpr::AbsPow { arg, .. } => arg.uses_crit(),
            IntegrandExpr::RpTerm { xi, eta, .. } => xi.uses_crit() || eta.uses_crit(),
            IntegrandExpr::CritAbs { .. } => true,
            _ => false,
        }
    }
}

/// coefficient × integral term.
#[derive(Debug, Clone)]
pub struct TermSpec {
    pub name: String,
    pub coeff: f64,
    pub expr: IntegrandExpr,
}

impl TermSpec {
    pub fn new(name: impl Into<String>, coeff: f64, expr: IntegrandExpr) -> Self {
        TermSpec {
            name: name.into(),
            coeff,
            expr,
        }
    }
}

/// An equality: lhs = Σ rhs.
#[derive(Debug, Clone)]
pub struct IdentityForm {
    pub lhs: TermSpec,
    pub rhs: Vec<TermSpec>,
}

impl IdentityForm {
    pub fn required_order(&self) -> usize {
        self.rhs
            .iter()
            .map(|t| t.expr.required_order())
            .chain(std::iter::once(self.lhs.expr.required_order()))
            .max()
            .unwrap_or(0)
    }

    pub fn uses_crit(&self) -> bool {
        self.lhs.expr.uses_crit() || self.rhs.iter().any(|t| t.expr.uses_crit())
    }
}

/// Evaluation environment for a term: the profile, the group context, and
/// the precomputed critical-ratio data when the entry involves f_R.
pub struct TermEnv<'a> {
    pub ctx: &'a GroupContext,
    pub profile: &'a RadialProfile,
    pub crit: Option<(f64, CritRatio)>,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl<'a> TermEnv<'a> {
    pub fn new(ctx: &'a GroupContext, profile: &'a RadialProfile) -> Self {
        TermEnv {
            ctx,
            profile,
            crit: None,
            rel_tol: crate::quadrature::DEFAULT_REL_TOL,
            abs_tol: crate::quadrature::DEFAULT_ABS_TOL,
        }
    }

    pub fn with_crit(mut self, big_r: f64) -> Result<Self> {
        let cr = CritRatio::new(self.profile, big_r)?;
        self.crit = Some((big_r, cr));
        Ok(self)
    }

    pub fn with_tols(mut self, rel: f64, abs: f64) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }

    fn eval_arg(&self, arg: &ArgExpr, r: f64, jet: &crate::jet::Jet) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for atom in &arg.0 {
            match atom {
                ArgAtom::Op { coeff, chain, rpow } => {
                    let v = chain.apply(self.ctx, jet)?.value();
                    acc += coeff * v * r.powf(-rpow);
                }
                ArgAtom::CritRatio { coeff } => {
                    let (_, cr) = self.crit.as_ref().ok_or_else(|| {
                        HrError::InvalidParam("critical term used without R".into())
                    })?;
                    acc += coeff * cr.eval(self.profile, r)? / r;
                }
            }
        }
        Ok(acc)
    }

    /// Pointwise integrand value, exposed for the log-scale sharpness
    /// driver which integrates the same expressions under substitution.
    pub fn pointwise(&self, expr: &IntegrandExpr, r: f64) -> Result<f64> {
        let ord = expr.required_order();
        let jet = self.profile.eval_jet(r, ord)?;
        match expr {
            IntegrandExpr::AbsPow { arg, p, rexp } => {
                let v = self.eval_arg(arg, r, &jet)?;
                let n = v.norm();
                let m = if *p == 2.0 { n * n } else { n.powf(*p) };
                Ok(m * r.powf(*rexp))
            }
            IntegrandExpr::RpTerm { p, xi, eta, rexp } => {
                let x = self.eval_arg(xi, r, &jet)?;
                let e = self.eval_arg(eta, r, &jet)?;
                Ok(rp(*p, x, e) * r.powf(*rexp))
            }
            IntegrandExpr::ImTerm { chain, p, rexp } => {
                let g = chain.apply(self.ctx, &jet)?;
                Ok(im_term_jet(*p, g.value(), g.deriv(1)) * r.powf(*rexp))
            }
            IntegrandExpr::ModDeriv { chain, p, c, rexp } => {
                let g = chain.apply(self.ctx, &jet)?;
                Ok(modulus_deriv_term_jet(*p, *c, g.value(), g.deriv(1), r)? * r.powf(*rexp))
            }
            IntegrandExpr::CritAbs { fpow, s, rexp } => {
                let (_, cr) = self
                    .crit
                    .as_ref()
                    .ok_or_else(|| HrError::InvalidParam("critical term used without R".into()))?;
                let ratio = cr.eval(self.profile, r)?.norm();
                let fmag = if *fpow == 0.0 { 1.0 } else { jet.value().norm().powf(*fpow) };
                Ok(fmag * ratio.powf(*s) * r.powf(*rexp))
            }
        }
    }

    /// Integrate one term; returns the signed value (coefficient applied)
    /// and the quadrature result of the raw integral.
    pub fn eval_term(&self, term: &TermSpec) -> Result<(f64, QuadResult)> {
        if term.coeff == 0.0 {
            return Ok((
                0.0,
                QuadResult {
                    value: 0.0,
                    abs_error_estimate: 0.0,
                    evaluations: 0,
                },
            ));
        }
        let ord = term.expr.required_order();
        if ord > self.profile.max_order() {
            return Err(HrError::OrderExceeded {
                requested: ord,
                max: self.profile.max_order(),
            });
        }
        let mut bps = self.profile.junctions().to_vec();
        if let Some((big_r, _)) = &self.crit {
            bps.push(*big_r);
        }
        let g = Integrand::new(
            |r| self.pointwise(&term.expr, r),
            self.profile.support(),
            bps,
        );
        let res = integrate(self.ctx, &g, self.rel_tol, self.abs_tol)?;
        Ok((term.coeff * res.value, res))
    }
}

/// Evaluated identity: per-term signed values plus residual and scale.
#[derive(Debug, Clone)]
pub struct EvaluatedForm {
    /// (name, signed value, quadrature error × |coeff|)
    pub terms: Vec<(String, f64, f64)>,
    pub residual: f64,
    pub scale: f64,
}

pub fn evaluate_form(env: &TermEnv, form: &IdentityForm) -> Result<EvaluatedForm> {
    let mut terms = Vec::with_capacity(form.rhs.len() + 1);
    let (lhs_v, lhs_q) = env.eval_term(&form.lhs)?;
    terms.push((
        form.lhs.name.clone(),
        lhs_v,
        lhs_q.abs_error_estimate * form.lhs.coeff.abs(),
    ));
    let mut sum = crate::quadrature::Compensated::default();
    let mut scale = lhs_v.abs();
    for t in &form.rhs {
        let (v, q) = env.eval_term(t)?;
        terms.push((t.name.clone(), v, q.abs_error_estimate * t.coeff.abs()));
        sum.add(v);
        scale = scale.max(v.abs());
    }
    let residual = (lhs_v - sum.value()).abs();
    Ok(EvaluatedForm {
        terms,
        residual,
        scale,
    })
}
