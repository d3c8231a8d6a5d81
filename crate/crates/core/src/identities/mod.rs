//! The identity catalogue: machine-checkable term lists for every
//! equality, sharp inequality and uncertainty principle, with residual
//! evaluation, Rayleigh quotients, verdicts and compositional
//! cross-derivation.

pub mod catalogue;
pub mod closed;
pub mod compose;
pub mod eval;
pub mod terms;

pub use catalogue::{
    catalogue_hash, erratum_fires, lookup, parent_equality, EntryInfo, EntryKind, CATALOGUE,
};
pub use compose::composed_form;
pub use eval::{
    evaluate_entry, evaluate_identity, evaluate_inequality, evaluate_raw_form,
    evaluate_uncertainty, IdentityReport, TermReport, DEFAULT_EQ_TOL, DEFAULT_INEQ_TOL,
};
pub use terms::{ArgAtom, ArgExpr, IdentityForm, IntegrandExpr, TermSpec};

/// Mechanical re-derivation of a higher-order entry from the base
/// identities, used to cross-check the closed forms term by term.
pub fn compose_identity(
    id: &str,
    pt: &crate::constants::ParamPoint,
) -> crate::Result<IdentityForm> {
    composed_form(id, pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{self, ParamPoint};
    use crate::identities::closed;
    use crate::operators::GroupContext;
    use crate::profile::{CutoffSpec, RadialProfile};

    fn annular(a: f64, b: f64, c: f64, d: f64) -> RadialProfile {
        RadialProfile::hi_pass(CutoffSpec::new(a, b).unwrap())
            .mul(RadialProfile::cutoff(CutoffSpec::new(c, d).unwrap()))
    }

    fn bump_profile() -> RadialProfile {
        annular(1.0, 1.3, 1.6, 2.0)
    }

    fn polar_profile() -> RadialProfile {
        RadialProfile::complex_polar(bump_profile(), RadialProfile::power(1.0)).unwrap()
    }

    #[test]
    fn h2_residual_small() {
        let ctx = GroupContext::new(5.0).unwrap();
        let pt = ParamPoint::new(5.0).with_alpha(0.0);
        let f = RadialProfile::cutoff(CutoffSpec::new(1.0, 2.0).unwrap());
        let rep = evaluate_identity("ID-H2", &ctx, &pt, &f, 1e-8).unwrap();
        assert!(rep.verdict, "residual {} scale {}", rep.residual, rep.scale);
        assert!(!rep.erratum);
    }

    #[test]
    fn r2_plateau_profile_remainder_in_transition_bands() {
        // f = r^{-(Q-4-2α)/2} × plateau: the conj remainder vanishes on the
        // plateau, so its value is carried by the transition bands
        let q = 9.0;
        let alpha = 0.5;
        let ctx = GroupContext::new(q).unwrap();
        let pt = ParamPoint::new(q).with_alpha(alpha);
        let f =
            annular(0.5, 0.8, 2.5, 3.0).mul(RadialProfile::power(-(q - 4.0 - 2.0 * alpha) / 2.0));
        let rep = evaluate_identity("ID-R2", &ctx, &pt, &f, 1e-8).unwrap();
        assert!(rep.verdict, "residual {} scale {}", rep.residual, rep.scale);
        let conj = rep.terms.iter().find(|t| t.name == "conj").unwrap();
        assert!(conj.value > 0.0);
        let plateau_only = {
            let fb = f.clone();
            let cc = crate::quadrature::Integrand::new(
                move |r| {
                    let j = fb.eval_jet(r, 1)?;
                    let inner = j.deriv(1) + (q - 4.0 - 2.0 * alpha) / (2.0 * r) * j.value();
                    Ok(inner.norm_sqr() * r.powf(-2.0 - 2.0 * alpha))
                },
                (0.8, 2.5),
                vec![],
            );
            crate::quadrature::integrate(&ctx, &cc, 1e-10, 1e-14)
                .unwrap()
                .value
        };
        assert!(plateau_only.abs() <= 1e-10 * conj.value);
    }

    #[test]
    fn zero_profile_all_terms_zero() {
        let ctx = GroupContext::new(7.0).unwrap();
        let pt = ParamPoint::new(7.0).with_alpha(0.2);
        let f = bump_profile().scale_re(0.0);
        let rep = evaluate_identity("ID-R2", &ctx, &pt, &f, 1e-8).unwrap();
        assert!(rep.degenerate);
        assert!(rep.verdict);
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn equality_residuals_spot_grid() {
        let profiles = [bump_profile(), polar_profile()];
        let cases: Vec<(&str, ParamPoint)> = vec![
            ("ID-H2", ParamPoint::new(5.0).with_alpha(0.7)),
            ("ID-R2", ParamPoint::new(9.0).with_alpha(-0.4)),
            ("ID-HR-even", ParamPoint::new(9.5).with_alpha(0.3).with_k(2)),
            ("ID-HR-odd", ParamPoint::new(11.5).with_alpha(0.3).with_k(2)),
            ("ID-12", ParamPoint::new(6.5).with_alpha(0.4)),
            (
                "ID-L2new-even",
                ParamPoint::new(9.5).with_alpha(0.25).with_k(2).with_l(0),
            ),
            (
                "ID-L2new-odd",
                ParamPoint::new(9.5).with_alpha(0.25).with_k(1).with_l(0),
            ),
            ("ID-LpH", ParamPoint::new(7.0).with_p(1.5).with_alpha(0.3)),
            ("ID-LpR", ParamPoint::new(9.0).with_p(3.0).with_alpha(-0.2)),
            (
                "ID-Lp-even",
                ParamPoint::new(10.0).with_p(1.5).with_alpha(0.1).with_k(2),
            ),
            (
                "ID-Lp-odd",
                ParamPoint::new(11.0).with_p(2.0).with_alpha(0.2).with_k(2),
            ),
            ("ID-Lp-abcd", ParamPoint::new(6.0).with_p(2.5).with_alpha(0.3)),
            ("ID-Lp12", ParamPoint::new(7.0).with_p(1.5).with_alpha(-0.3)),
            (
                "ID-LpHRnew-even",
                ParamPoint::new(10.5).with_p(2.0).with_alpha(0.15).with_k(2).with_l(0),
            ),
            (
                "ID-LpHRnew-odd",
                ParamPoint::new(12.5).with_p(1.5).with_alpha(0.1).with_k(2).with_l(1),
            ),
            ("ID-crit-H", ParamPoint::new(5.5).with_p(2.0).with_r_crit(1.5)),
            ("ID-crit-R", ParamPoint::new(6.0).with_p(2.0).with_r_crit(3.0)),
            (
                "ID-crit-even",
                ParamPoint::new(9.5).with_p(2.0).with_k(2).with_r_crit(1.8),
            ),
            (
                "ID-crit-odd",
                ParamPoint::new(9.5).with_p(1.5).with_k(1).with_r_crit(0.5),
            ),
        ];
        let mut failures = Vec::new();
        for (id, pt) in &cases {
            let ctx = GroupContext::new(pt.q).unwrap();
            for f in &profiles {
                let rep = evaluate_identity(id, &ctx, pt, f, 1e-8).unwrap();
                if !rep.verdict {
                    failures.push(format!(
                        "{id} on {}: residual {:e} scale {:e}",
                        f.descriptor(),
                        rep.residual,
                        rep.scale
                    ));
                }
            }
        }
        assert!(failures.is_empty(), "{failures:#?}");
    }

    #[test]
    fn erratum_entries_fail_as_printed_and_pass_repaired() {
        let f = bump_profile();
        for (id, pt) in [
            ("ID-HR-odd", ParamPoint::new(11.5).with_alpha(0.3).with_k(2)),
            (
                "ID-L2new-odd",
                ParamPoint::new(9.5).with_alpha(0.25).with_k(1).with_l(0),
            ),
            (
                "ID-crit-even",
                ParamPoint::new(9.5).with_p(2.0).with_k(3).with_r_crit(2.5),
            ),
            (
                "ID-LpHRnew-odd",
                ParamPoint::new(14.5).with_p(2.0).with_alpha(0.1).with_k(3).with_l(0),
            ),
        ] {
            let ctx = GroupContext::new(pt.q).unwrap();
            assert!(erratum_fires(id, &pt), "{id} should flag an erratum");
            let rep = evaluate_identity(id, &ctx, &pt, &f, 1e-8).unwrap();
            assert!(rep.erratum);
            assert!(
                rep.verdict,
                "{id}: repaired residual {:e} scale {:e}",
                rep.residual, rep.scale
            );
            let paper = rep.paper_residual.unwrap();
            assert!(
                paper > 1e-6 * rep.scale,
                "{id}: printed form unexpectedly agrees (paper residual {paper:e}, scale {:e})",
                rep.scale
            );
        }
    }

    #[test]
    fn composition_matches_repaired_closed_forms() {
        let f = bump_profile();
        let cases: Vec<(&str, ParamPoint)> = vec![
            ("ID-HR-even", ParamPoint::new(9.5).with_alpha(0.3).with_k(2)),
            ("ID-HR-even", ParamPoint::new(13.5).with_alpha(-0.2).with_k(3)),
            ("ID-HR-odd", ParamPoint::new(11.5).with_alpha(0.3).with_k(2)),
            (
                "ID-L2new-even",
                ParamPoint::new(9.5).with_alpha(0.25).with_k(2).with_l(0),
            ),
            (
                "ID-L2new-odd",
                ParamPoint::new(12.5).with_alpha(-0.2).with_k(2).with_l(0),
            ),
            (
                "ID-Lp-even",
                ParamPoint::new(10.0).with_p(1.5).with_alpha(0.1).with_k(2),
            ),
            (
                "ID-Lp-odd",
                ParamPoint::new(11.0).with_p(2.5).with_alpha(0.2).with_k(1),
            ),
            (
                "ID-LpHRnew-even",
                ParamPoint::new(10.5).with_p(2.0).with_alpha(0.15).with_k(2).with_l(0),
            ),
            (
                "ID-LpHRnew-odd",
                ParamPoint::new(12.5).with_p(1.5).with_alpha(0.1).with_k(2).with_l(0),
            ),
            ("ID-crit-R", ParamPoint::new(6.0).with_p(2.0).with_r_crit(3.0)),
            (
                "ID-crit-even",
                ParamPoint::new(9.5).with_p(2.0).with_k(2).with_r_crit(1.8),
            ),
            (
                "ID-crit-odd",
                ParamPoint::new(9.5).with_p(2.0).with_k(2).with_r_crit(1.8),
            ),
        ];
        for (id, pt) in &cases {
            let ctx = GroupContext::new(pt.q).unwrap();
            let composed = composed_form(id, pt).unwrap();
            let ev = evaluate_raw_form(&ctx, pt, &f, &composed).unwrap();
            assert!(
                ev.residual <= 1e-8 * ev.scale,
                "composed {id}: residual {:e} scale {:e}",
                ev.residual,
                ev.scale
            );
            let repaired = closed::repaired_form(id, pt).unwrap();
            let ev2 = evaluate_raw_form(&ctx, pt, &f, &repaired).unwrap();
            let lhs1 = ev.terms[0].1;
            let sum1: f64 = ev.terms[1..].iter().map(|t| t.1).sum();
            let sum2: f64 = ev2.terms[1..].iter().map(|t| t.1).sum();
            assert!(
                (sum1 - sum2).abs() <= 1e-9 * lhs1.abs().max(1e-12),
                "{id}: composed sum {sum1} vs closed sum {sum2}"
            );
        }
    }

    #[test]
    fn hr_even_k1_composes_to_r2() {
        let pt = ParamPoint::new(9.0).with_alpha(0.4).with_k(1);
        let ctx = GroupContext::new(9.0).unwrap();
        let f = bump_profile();
        let composed = composed_form("ID-HR-even", &pt).unwrap();
        let base = closed::paper_form("ID-R2", &pt).unwrap();
        let ev_c = evaluate_raw_form(&ctx, &pt, &f, &composed).unwrap();
        let ev_b = evaluate_raw_form(&ctx, &pt, &f, &base).unwrap();
        let mut a: Vec<f64> = ev_c.terms.iter().map(|t| t.1).collect();
        let mut b: Vec<f64> = ev_b.terms.iter().map(|t| t.1).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() <= 1e-11 * y.abs().max(1e-12), "{x} vs {y}");
        }
    }

    #[test]
    fn inequality_quotients() {
        let f = bump_profile();
        let ctx = GroupContext::new(5.0).unwrap();
        let pt = ParamPoint::new(5.0).with_alpha(0.0);
        let rep = evaluate_inequality("INEQ-R2", &ctx, &pt, &f, 1e-9).unwrap();
        assert!(rep.verdict);
        assert!(rep.quotient.unwrap() >= 25.0 / 16.0 * (1.0 - 1e-9));
        assert!((rep.sharp_constant.unwrap() - 25.0 / 16.0).abs() < 1e-12);

        let pt = ParamPoint::new(5.0).with_p(2.0).with_alpha(0.0);
        let rep = evaluate_inequality("INEQ-LpH", &ctx, &pt, &f, 1e-9).unwrap();
        assert!(rep.verdict);
        assert!(rep.quotient.unwrap() >= 2.25 * (1.0 - 1e-9));

        let z = f.clone().scale_re(0.0);
        let rep = evaluate_inequality("INEQ-R2", &ctx, &ParamPoint::new(5.0), &z, 1e-9).unwrap();
        assert!(rep.degenerate && rep.verdict);

        let bad = ParamPoint::new(5.0).with_alpha(3.0);
        assert!(evaluate_inequality("INEQ-R2", &ctx, &bad, &f, 1e-9).is_err());
    }

    #[test]
    fn uncertainty_examples() {
        let f = bump_profile();
        let ctx = GroupContext::new(9.0).unwrap();
        let pt = ParamPoint::new(9.0).with_p(2.0).with_alpha(0.0).with_l(1);
        let rep = evaluate_uncertainty("UNC-even", &ctx, &pt, &f, 1e-9).unwrap();
        assert!(rep.verdict, "slack {}", rep.residual);

        let ctx = GroupContext::new(8.0).unwrap();
        let pt = ParamPoint::new(8.0).with_p(2.0).with_l(1).with_r_crit(1.5);
        let rep = evaluate_uncertainty("UNC-crit-3", &ctx, &pt, &f, 1e-9).unwrap();
        assert!(rep.verdict);

        let z = f.clone().scale_re(0.0);
        let rep = evaluate_uncertainty(
            "UNC-even",
            &ctx,
            &ParamPoint::new(8.0).with_p(2.0).with_l(1),
            &z,
            1e-9,
        )
        .unwrap();
        assert!(rep.degenerate && rep.verdict);
    }

    #[test]
    fn nonzero_profile_has_positive_remainder() {
        let f = bump_profile();
        for (id, pt) in [
            ("ID-H2", ParamPoint::new(5.0).with_alpha(0.0)),
            ("ID-R2", ParamPoint::new(9.0).with_alpha(0.3)),
            ("ID-LpR", ParamPoint::new(9.0).with_p(1.5).with_alpha(0.1)),
        ] {
            let ctx = GroupContext::new(pt.q).unwrap();
            let rep = evaluate_identity(id, &ctx, &pt, &f, 1e-8).unwrap();
            let max_remainder = rep.terms[2..].iter().map(|t| t.value).fold(0.0f64, f64::max);
            assert!(max_remainder > 1e-12 * rep.scale, "{id}: no positive remainder");
        }
    }

    #[test]
    fn dilation_leaves_residual_ratio_and_quotient_invariant() {
        let f = bump_profile();
        let lam = 1.7;
        let g = f.clone().dilate(lam).unwrap();
        let ctx = GroupContext::new(9.0).unwrap();
        let pt = ParamPoint::new(9.0).with_alpha(0.3);
        let a = evaluate_identity("ID-R2", &ctx, &pt, &f, 1e-8).unwrap();
        let b = evaluate_identity("ID-R2", &ctx, &pt, &g, 1e-8).unwrap();
        let ra = a.residual / a.scale;
        let rb = b.residual / b.scale;
        assert!((ra - rb).abs() <= 1e-9, "{ra} vs {rb}");
        let qa = evaluate_inequality("INEQ-R2", &ctx, &pt, &f, 1e-9)
            .unwrap()
            .quotient
            .unwrap();
        let qb = evaluate_inequality("INEQ-R2", &ctx, &pt, &g, 1e-9)
            .unwrap()
            .quotient
            .unwrap();
        assert!((qa - qb).abs() <= 1e-9 * qa.abs());
    }

    #[test]
    fn lead_coefficient_matches_sharp_constant() {
        for (eq_id, ineq_id, pt) in [
            ("ID-R2", "INEQ-R2", ParamPoint::new(9.0).with_alpha(0.3)),
            (
                "ID-HR-odd",
                "INEQ-HR-odd",
                ParamPoint::new(15.5).with_alpha(0.1).with_k(2),
            ),
            ("ID-LpR", "INEQ-LpR", ParamPoint::new(9.0).with_p(1.5).with_alpha(0.2)),
            (
                "ID-LpHRnew-even",
                "INEQ-LpHRnew-even",
                ParamPoint::new(11.0).with_p(2.5).with_alpha(0.1).with_k(2).with_l(0),
            ),
            (
                "ID-crit-odd",
                "INEQ-crit-odd",
                ParamPoint::new(6.0).with_p(2.0).with_k(1).with_r_crit(1.0),
            ),
        ] {
            let form = closed::repaired_form(eq_id, &pt).unwrap();
            let c = constants::sharp_constant(ineq_id, &pt).unwrap();
            assert!(
                (form.rhs[0].coeff - c.value).abs() <= 1e-11 * c.value.abs().max(1e-12),
                "{eq_id}: lead {} vs constant {}",
                form.rhs[0].coeff,
                c.value
            );
        }
    }

    #[test]
    fn catalogue_hash_is_stable_within_a_build() {
        let a = catalogue_hash();
        let b = catalogue_hash();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
    }
}
