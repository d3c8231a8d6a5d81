//! Mechanical re-derivation of the higher-order identities by iterating
//! the base identities with shifted weights. The composer only knows the
//! base steps; every ladder term list is generated, never transcribed, so
//! it is an independent cross-check of the closed forms.

use crate::constants::{c_alpha, c_p_alpha, d_p_alpha, ParamPoint};
use crate::error::HrError;
use crate::operators::{OpAtom, OpChain};
use crate::Result;

use super::terms::{ArgExpr, IdentityForm, IntegrandExpr, TermSpec};

/// The integral still being expanded: coeff × ∫ |chain f|^p r^{rexp} dμ.
struct Principal {
    coeff: f64,
    chain: OpChain,
    p: f64,
    rexp: f64,
}

impl Principal {
    /// Weight exponent α implied by r^{-pα}.
    fn alpha(&self) -> f64 {
        -self.rexp / self.p
    }

    fn term(&self, name: &str) -> TermSpec {
        TermSpec::new(
            name,
            self.coeff,
            IntegrandExpr::abs_chain(self.chain.clone(), self.p, self.rexp),
        )
    }
}

struct Composer {
    q: f64,
    principal: Principal,
    rhs: Vec<TermSpec>,
    step: usize,
}

impl Composer {
    fn new(q: f64, chain: OpChain, p: f64, rexp: f64) -> Self {
        Composer {
            q,
            principal: Principal {
                coeff: 1.0,
                chain,
                p,
                rexp,
            },
            rhs: Vec::new(),
            step: 0,
        }
    }

    fn push(&mut self, label: &str, coeff: f64, expr: IntegrandExpr) {
        let name = format!("{label}#{}", self.step);
        self.rhs.push(TermSpec::new(name, self.principal.coeff * coeff, expr));
    }

    fn strip_leading_r(&mut self) -> Result<()> {
        if self.principal.chain.0.last() != Some(&OpAtom::R) {
            return Err(HrError::InvalidParam("composition step expects a leading R".into()));
        }
        self.principal.chain.0.pop();
        Ok(())
    }

    fn strip_leading_r2(&mut self) -> Result<()> {
        if self.principal.chain.0.last() != Some(&OpAtom::R2) {
            return Err(HrError::InvalidParam("composition step expects a leading R2".into()));
        }
        self.principal.chain.0.pop();
        Ok(())
    }

    /// |R g|² step (weighted Hardy).
    fn base_h2(&mut self) -> Result<()> {
        let a = self.principal.alpha();
        let q = self.q;
        let half = (q - 2.0 - 2.0 * a) / 2.0;
        let outer = self.principal.chain.clone();
        self.strip_leading_r()?;
        let inner = self.principal.chain.clone();
        self.push(
            "sq_h",
            1.0,
            IntegrandExpr::sq_sum(outer, half, inner, 1.0, self.principal.rexp),
        );
        self.principal.coeff *= half * half;
        self.principal.rexp -= 2.0;
        self.step += 1;
        Ok(())
    }

    /// |R₂ g|² step (weighted Rellich).
    fn base_r2(&mut self) -> Result<()> {
        let a = self.principal.alpha();
        let q = self.q;
        let c = c_alpha(q, a);
        let outer = self.principal.chain.clone();
        self.strip_leading_r2()?;
        let inner = self.principal.chain.clone();
        let mut mixed = inner.clone();
        mixed.0.push(OpAtom::R);
        self.push(
            "sq",
            1.0,
            IntegrandExpr::sq_sum(outer, c, inner.clone(), 2.0, self.principal.rexp),
        );
        self.push(
            "conj",
            2.0 * c,
            IntegrandExpr::sq_sum(
                mixed,
                (q - 4.0 - 2.0 * a) / 2.0,
                inner,
                1.0,
                self.principal.rexp - 2.0,
            ),
        );
        self.principal.coeff *= c * c;
        self.principal.rexp -= 4.0;
        self.step += 1;
        Ok(())
    }

    /// |R₂ g|² → |R g|² step (first-to-second order).
    fn base_12(&mut self) -> Result<()> {
        let a = self.principal.alpha();
        let q = self.q;
        self.strip_leading_r2()?;
        let inner = self.principal.chain.clone();
        let mut first = inner.clone();
        first.0.push(OpAtom::R);
        let mut second = first.clone();
        second.0.push(OpAtom::R);
        self.push(
            "sq_12",
            1.0,
            IntegrandExpr::sq_sum(
                second,
                (q - 2.0 - 2.0 * a) / 2.0,
                first.clone(),
                1.0,
                self.principal.rexp,
            ),
        );
        self.principal.chain = first;
        self.principal.coeff *= (q + 2.0 * a).powi(2) / 4.0;
        self.principal.rexp -= 2.0;
        self.step += 1;
        Ok(())
    }

    /// |R g|^p step (L^p Hardy).
    fn base_lph(&mut self) -> Result<()> {
        let a = self.principal.alpha();
        let (q, p) = (self.q, self.principal.p);
        let d = d_p_alpha(q, p, a)?;
        let outer = self.principal.chain.clone();
        self.strip_leading_r()?;
        let inner = self.principal.chain.clone();
        self.push(
            "rp_h",
            p,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(-d, inner, 1.0),
                eta: ArgExpr::op(1.0, outer, 0.0),
                rexp: self.principal.rexp,
            },
        );
        self.principal.coeff *= d.abs().powf(p);
        self.principal.rexp -= p;
        self.step += 1;
        Ok(())
    }

    /// |R₂ g|^p step (L^p Rellich).
    fn base_lpr(&mut self) -> Result<()> {
        let a = self.principal.alpha();
        let (q, p) = (self.q, self.principal.p);
        let c = c_p_alpha(q, p, a)?;
        let outer = self.principal.chain.clone();
        self.strip_leading_r2()?;
        let inner = self.principal.chain.clone();
        self.push(
            "rp",
            p,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(c, inner.clone(), 2.0),
                eta: ArgExpr::op(-1.0, outer, 0.0),
                rexp: self.principal.rexp,
            },
        );
        let w_mod = self.principal.rexp - 2.0 * p + 2.0;
        self.push(
            "mod",
            p * (p - 1.0) * c.abs().powf(p - 2.0) * c,
            IntegrandExpr::ModDeriv {
                chain: inner.clone(),
                p,
                c: (q - p * (2.0 + a)) / p,
                rexp: w_mod,
            },
        );
        self.push(
            "im",
            p * c.abs().powf(p - 2.0) * c,
            IntegrandExpr::ImTerm {
                chain: inner,
                p,
                rexp: w_mod,
            },
        );
        self.principal.coeff *= c.abs().powf(p);
        self.principal.rexp -= 2.0 * p;
        self.step += 1;
        Ok(())
    }

    /// |R₂ g|^p → |R g|^p step.
    fn base_lp12(&mut self) -> Result<()> {
        let a = self.principal.alpha();
        let (q, p) = (self.q, self.principal.p);
        let pp = p / (p - 1.0);
        let lam = (q + pp * a) / pp;
        let outer = self.principal.chain.clone();
        self.strip_leading_r2()?;
        let mut first = self.principal.chain.clone();
        first.0.push(OpAtom::R);
        self.push(
            "rp_12",
            p,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(lam, first.clone(), 1.0),
                eta: ArgExpr::op(1.0, outer, 0.0),
                rexp: self.principal.rexp,
            },
        );
        self.principal.chain = first;
        self.principal.coeff *= lam.abs().powf(p);
        self.principal.rexp -= p;
        self.step += 1;
        Ok(())
    }

    /// |R f|^p at the critical weight → the logarithmic Hardy term.
    /// Terminal: the principal becomes the critical lead term.
    fn base_crith(&mut self) -> Result<TermSpec> {
        let (q, p) = (self.q, self.principal.p);
        if (self.principal.rexp + (q - p)).abs() > 1e-9 {
            return Err(HrError::InvalidParam(format!(
                "critical Hardy step expects weight r^{{-(Q-p)}}, got r^{{{}}}",
                self.principal.rexp
            )));
        }
        let outer = self.principal.chain.clone();
        if outer.0 != vec![OpAtom::R] {
            return Err(HrError::InvalidParam(
                "critical Hardy step expects the bare first derivative".into(),
            ));
        }
        self.push(
            "rp_crit",
            p,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::crit(-(p - 1.0) / p),
                eta: ArgExpr::op(1.0, outer, 0.0),
                rexp: self.principal.rexp,
            },
        );
        let lead = TermSpec::new(
            "lead",
            self.principal.coeff * ((p - 1.0) / p).powf(p),
            IntegrandExpr::CritAbs {
                fpow: 0.0,
                s: p,
                rexp: -q,
            },
        );
        self.step += 1;
        Ok(lead)
    }

    fn finish(self) -> IdentityForm {
        let lead = self.principal.term("lead");
        let mut rhs = vec![lead];
        rhs.extend(self.rhs);
        IdentityForm {
            lhs: TermSpec::new("lhs", 1.0, IntegrandExpr::AbsPow {
                arg: ArgExpr::op(1.0, OpChain::identity(), 0.0),
                p: 0.0,
                rexp: 0.0,
            }),
            rhs,
        }
    }
}

/// Compositionally derived term list for an equality entry; base entries
/// compose to themselves.
pub fn composed_form(id: &str, pt: &ParamPoint) -> Result<IdentityForm> {
    pt.validate()?;
    let q = pt.q;
    let alpha = pt.alpha();
    let p = pt.p();
    let k = pt.k();
    let l = pt.l();
    let lhs_of = |chain: OpChain, p: f64, rexp: f64| {
        TermSpec::new("lhs", 1.0, IntegrandExpr::abs_chain(chain, p, rexp))
    };
    let run = |lhs_chain: OpChain,
               pexp: f64,
               rexp: f64,
               steps: &dyn Fn(&mut Composer) -> Result<Option<TermSpec>>|
     -> Result<IdentityForm> {
        let mut c = Composer::new(q, lhs_chain.clone(), pexp, rexp);
        let crit_lead = steps(&mut c)?;
        let mut form = match crit_lead {
            Some(lead) => {
                let mut rhs = vec![lead];
                rhs.extend(std::mem::take(&mut c.rhs));
                IdentityForm {
                    lhs: lhs_of(lhs_chain.clone(), pexp, rexp),
                    rhs,
                }
            }
            None => {
                let mut form = c.finish();
                form.lhs = lhs_of(lhs_chain.clone(), pexp, rexp);
                form
            }
        };
        // deterministic order: lead first, then the generated steps
        form.lhs.name = "lhs".into();
        Ok(form)
    };

    match id {
        "ID-H2" => run(OpChain::r_r2k(0), 2.0, -2.0 * alpha, &|c| {
            c.base_h2()?;
            Ok(None)
        }),
        "ID-R2" => run(OpChain::r2k(1), 2.0, -2.0 * alpha, &|c| {
            c.base_r2()?;
            Ok(None)
        }),
        "ID-HR-even" => run(OpChain::r2k(k), 2.0, -2.0 * alpha, &|c| {
            for _ in 0..k {
                c.base_r2()?;
            }
            Ok(None)
        }),
        "ID-HR-odd" => run(OpChain::r_r2k(k), 2.0, -2.0 * alpha, &|c| {
            c.base_h2()?;
            for _ in 0..k {
                c.base_r2()?;
            }
            Ok(None)
        }),
        "ID-12" => run(OpChain::r2k(1), 2.0, -2.0 * alpha, &|c| {
            c.base_12()?;
            Ok(None)
        }),
        "ID-L2new-even" => {
            check_kl(id, k, l)?;
            run(OpChain::r2k(k), 2.0, -2.0 * alpha, &|c| {
                for _ in 0..k - l - 1 {
                    c.base_r2()?;
                }
                c.base_12()?;
                Ok(None)
            })
        }
        "ID-L2new-odd" => {
            check_kl(id, k, l)?;
            run(OpChain::r_r2k(k), 2.0, -2.0 * alpha, &|c| {
                c.base_h2()?;
                for _ in 0..k - l - 1 {
                    c.base_r2()?;
                }
                c.base_12()?;
                Ok(None)
            })
        }
        "ID-LpH" => run(OpChain::r_r2k(0), p, -p * alpha, &|c| {
            c.base_lph()?;
            Ok(None)
        }),
        "ID-LpR" => run(OpChain::r2k(1), p, -p * alpha, &|c| {
            c.base_lpr()?;
            Ok(None)
        }),
        "ID-Lp-even" => run(OpChain::r2k(k), p, -p * alpha, &|c| {
            for _ in 0..k {
                c.base_lpr()?;
            }
            Ok(None)
        }),
        "ID-Lp-odd" => run(OpChain::r_r2k(k), p, -p * alpha, &|c| {
            c.base_lph()?;
            for _ in 0..k {
                c.base_lpr()?;
            }
            Ok(None)
        }),
        // the conjugated-derivative equality is itself a base step
        "ID-Lp-abcd" => super::closed::paper_form(id, pt),
        "ID-Lp12" => run(OpChain::r2k(1), p, -p * alpha, &|c| {
            c.base_lp12()?;
            Ok(None)
        }),
        "ID-LpHRnew-even" => {
            check_kl(id, k, l)?;
            run(OpChain::r2k(k), p, -p * alpha, &|c| {
                for _ in 0..k - l - 1 {
                    c.base_lpr()?;
                }
                c.base_lp12()?;
                Ok(None)
            })
        }
        "ID-LpHRnew-odd" => {
            check_kl(id, k, l)?;
            run(OpChain::r_r2k(k), p, -p * alpha, &|c| {
                c.base_lph()?;
                for _ in 0..k - l - 1 {
                    c.base_lpr()?;
                }
                c.base_lp12()?;
                Ok(None)
            })
        }
        "ID-crit-H" => run(OpChain::r_r2k(0), p, -(q - p), &|c| Ok(Some(c.base_crith()?))),
        "ID-crit-R" => run(OpChain::r2k(1), p, -(q - 2.0 * p), &|c| {
            c.base_lp12()?;
            Ok(Some(c.base_crith()?))
        }),
        "ID-crit-even" => run(OpChain::r2k(k), p, -(q - 2.0 * k as f64 * p), &|c| {
            for _ in 0..k - 1 {
                c.base_lpr()?;
            }
            c.base_lp12()?;
            Ok(Some(c.base_crith()?))
        }),
        "ID-crit-odd" => run(
            OpChain::r_r2k(k),
            p,
            -(q - (2.0 * k as f64 + 1.0) * p),
            &|c| {
                c.base_lph()?;
                for _ in 0..k - 1 {
                    c.base_lpr()?;
                }
                c.base_lp12()?;
                Ok(Some(c.base_crith()?))
            },
        ),
        other => Err(HrError::UnknownEntry(other.to_string())),
    }
}

fn check_kl(id: &str, k: usize, l: usize) -> Result<()> {
    if k < l + 1 {
        return Err(HrError::InvalidParam(format!("{id} needs k >= l+1, got k={k}, l={l}")));
    }
    Ok(())
}
