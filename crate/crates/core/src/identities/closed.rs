//! Closed-form term lists for every equality entry, transcribed from the
//! displayed formulas. Where a displayed formula is suspected of an index
//! typo the transcription keeps it verbatim; the composed forms in
//! [`super::compose`] are the independent cross-check, and the erratum
//! protocol in [`super::eval`] decides which one is normative.

use crate::constants::{a_jq, c_alpha, c_p_alpha, d_p_alpha, ParamPoint};
use crate::error::HrError;
use crate::operators::OpChain;
use crate::Result;

use super::terms::{ArgExpr, IdentityForm, IntegrandExpr, TermSpec};

fn prod(iter: impl Iterator<Item = f64>) -> f64 {
    let mut acc = 1.0;
    for x in iter {
        acc *= x;
    }
    acc
}

fn t(name: impl Into<String>, coeff: f64, expr: IntegrandExpr) -> TermSpec {
    TermSpec::new(name, coeff, expr)
}

/// ∫|Rf|²/r^{2α} = ((Q−2−2α)/2)² ∫|f|²/r^{2α+2} + ∫|Rf + (Q−2−2α)f/(2r)|²/r^{2α}
pub fn id_h2(q: f64, alpha: f64) -> IdentityForm {
    let c = (q - 2.0 - 2.0 * alpha) / 2.0;
    IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r_r2k(0), 2.0, -2.0 * alpha)),
        rhs: vec![
            t(
                "hardy",
                c * c,
                IntegrandExpr::abs_chain(OpChain::identity(), 2.0, -2.0 * alpha - 2.0),
            ),
            t(
                "sq",
                1.0,
                IntegrandExpr::sq_sum(OpChain::r_r2k(0), c, OpChain::identity(), 1.0, -2.0 * alpha),
            ),
        ],
    }
}

/// Second-order identity with the two nonnegative remainders.
pub fn id_r2(q: f64, alpha: f64) -> IdentityForm {
    let ca = c_alpha(q, alpha);
    IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r2k(1), 2.0, -2.0 * alpha)),
        rhs: vec![
            t(
                "rellich",
                ca * ca,
                IntegrandExpr::abs_chain(OpChain::identity(), 2.0, -2.0 * alpha - 4.0),
            ),
            t(
                "sq",
                1.0,
                IntegrandExpr::sq_sum(OpChain::r2k(1), ca, OpChain::identity(), 2.0, -2.0 * alpha),
            ),
            t(
                "conj",
                2.0 * ca,
                IntegrandExpr::sq_sum(
                    OpChain::r_r2k(0),
                    (q - 4.0 - 2.0 * alpha) / 2.0,
                    OpChain::identity(),
                    1.0,
                    -2.0 - 2.0 * alpha,
                ),
            ),
        ],
    }
}

/// Even higher-order ladder; printed form and composed form coincide.
pub fn id_hr_even(q: f64, alpha: f64, k: usize) -> IdentityForm {
    let mut rhs = vec![t(
        "lead",
        prod((0..k).map(|i| c_alpha(q, 2.0 * i as f64 + alpha))).powi(2),
        IntegrandExpr::abs_chain(OpChain::identity(), 2.0, -4.0 * k as f64 - 2.0 * alpha),
    )];
    for j in 0..k {
        let pj = prod((0..j).map(|i| c_alpha(q, 2.0 * i as f64 + alpha))).powi(2);
        let cj = c_alpha(q, 2.0 * j as f64 + alpha);
        rhs.push(t(
            format!("sq[{j}]"),
            pj,
            IntegrandExpr::sq_sum(
                OpChain::r2k(k - j),
                cj,
                OpChain::r2k(k - j - 1),
                2.0,
                -4.0 * j as f64 - 2.0 * alpha,
            ),
        ));
        rhs.push(t(
            format!("conj[{j}]"),
            2.0 * pj * cj,
            IntegrandExpr::sq_sum(
                OpChain::r_r2k(k - j - 1),
                (q - 4.0 - 2.0 * alpha - 4.0 * j as f64) / 2.0,
                OpChain::r2k(k - j - 1),
                1.0,
                -2.0 - 2.0 * alpha - 4.0 * j as f64,
            ),
        ));
    }
    IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r2k(k), 2.0, -2.0 * alpha)),
        rhs,
    }
}

/// Odd higher-order ladder. `printed` keeps the displayed product
/// ∏ c_{2i+α} in the first j-sum; the composed route needs ∏ c_{2i+1+α}.
pub fn id_hr_odd(q: f64, alpha: f64, k: usize, printed: bool) -> IdentityForm {
    let half = (q - 2.0 - 2.0 * alpha) / 2.0;
    let a = half * half;
    let mut rhs = vec![
        t(
            "lead",
            (half * prod((0..k).map(|i| c_alpha(q, 2.0 * i as f64 + 1.0 + alpha)))).powi(2),
            IntegrandExpr::abs_chain(
                OpChain::identity(),
                2.0,
                -4.0 * k as f64 - 2.0 - 2.0 * alpha,
            ),
        ),
        t(
            "sq_h",
            1.0,
            IntegrandExpr::sq_sum(OpChain::r_r2k(k), half, OpChain::r2k(k), 1.0, -2.0 * alpha),
        ),
    ];
    for j in 0..k {
        let pj_fixed = prod((0..j).map(|i| c_alpha(q, 2.0 * i as f64 + 1.0 + alpha))).powi(2);
        let pj_sq = if printed {
            prod((0..j).map(|i| c_alpha(q, 2.0 * i as f64 + alpha))).powi(2)
        } else {
            pj_fixed
        };
        let cj = c_alpha(q, 2.0 * j as f64 + 1.0 + alpha);
        rhs.push(t(
            format!("sq[{j}]"),
            a * pj_sq,
            IntegrandExpr::sq_sum(
                OpChain::r2k(k - j),
                cj,
                OpChain::r2k(k - j - 1),
                2.0,
                -2.0 - 2.0 * alpha - 4.0 * j as f64,
            ),
        ));
        rhs.push(t(
            format!("conj[{j}]"),
            2.0 * a * pj_fixed * cj,
            IntegrandExpr::sq_sum(
                OpChain::r_r2k(k - j - 1),
                (q - 6.0 - 2.0 * alpha - 4.0 * j as f64) / 2.0,
                OpChain::r2k(k - j - 1),
                1.0,
                -4.0 - 2.0 * alpha - 4.0 * j as f64,
            ),
        ));
    }
    IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r_r2k(k), 2.0, -2.0 * alpha)),
        rhs,
    }
}

/// First-to-second-order identity.
pub fn id_12(q: f64, alpha: f64) -> IdentityForm {
    IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r2k(1), 2.0, -2.0 * alpha)),
        rhs: vec![
            t(
                "lead",
                (q + 2.0 * alpha).powi(2) / 4.0,
                IntegrandExpr::abs_chain(OpChain::r_r2k(0), 2.0, -2.0 - 2.0 * alpha),
            ),
            t(
                "sq",
                1.0,
                IntegrandExpr::sq_sum(
                    OpChain::rr_r2k(0),
                    (q - 2.0 - 2.0 * alpha) / 2.0,
                    OpChain::r_r2k(0),
                    1.0,
                    -2.0 * alpha,
                ),
            ),
        ],
    }
}

/// Mixed-order even identity. The standalone j = 0 groups appear only when
/// k − l ≥ 2 (no base-identity iteration happens at k = l + 1).
pub fn id_l2new_even(q: f64, alpha: f64, k: usize, l: usize) -> IdentityForm {
    let m = k - l;
    // lead constant in the cancelled form (identical to
    // 4/(Q−2α)² ∏ ((Q²−4(2i+α)²)/4)² without the 0/0 at α = Q/2)
    let lead = ((q + 2.0 * alpha) / 2.0
        * prod((1..m).map(|i| (q * q - 4.0 * (2.0 * i as f64 + alpha).powi(2)) / 4.0)))
    .powi(2);
    let mut rhs = vec![
        t(
            "lead",
            lead,
            IntegrandExpr::abs_chain(
                OpChain::r_r2k(l),
                2.0,
                -(4.0 * m as f64 - 2.0 + 2.0 * alpha),
            ),
        ),
        t(
            "sq_12",
            prod((0..m.saturating_sub(1)).map(|i| c_alpha(q, 2.0 * i as f64 + alpha))).powi(2),
            IntegrandExpr::sq_sum(
                OpChain::rr_r2k(l),
                (q + 2.0 - 4.0 * m as f64 - 2.0 * alpha) / 2.0,
                OpChain::r_r2k(l),
                1.0,
                -(4.0 * (m as f64 - 1.0) + 2.0 * alpha),
            ),
        ),
    ];
    for j in 0..m.saturating_sub(1) {
        let pj = prod((0..j).map(|i| c_alpha(q, 2.0 * i as f64 + alpha))).powi(2);
        let cj = c_alpha(q, 2.0 * j as f64 + alpha);
        rhs.push(t(
            format!("sq[{j}]"),
            pj,
            IntegrandExpr::sq_sum(
                OpChain::r2k(k - j),
                cj,
                OpChain::r2k(k - j - 1),
                2.0,
                -4.0 * j as f64 - 2.0 * alpha,
            ),
        ));
        rhs.push(t(
            format!("conj[{j}]"),
            2.0 * pj * cj,
            IntegrandExpr::sq_sum(
                OpChain::r_r2k(k - j - 1),
                (q - 4.0 - 2.0 * alpha - 4.0 * j as f64) / 2.0,
                OpChain::r2k(k - j - 1),
                1.0,
                -2.0 - 2.0 * alpha - 4.0 * j as f64,
            ),
        ));
    }
    IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r2k(k), 2.0, -2.0 * alpha)),
        rhs,
    }
}

/// Mixed-order odd identity. `printed` keeps the displayed coefficient
/// (Q+2−4(k−l)−2α)/2 on the sq_12 group; the α → 1+α shift gives
/// (Q−4(k−l)−2α)/2.
pub fn id_l2new_odd(q: f64, alpha: f64, k: usize, l: usize, printed: bool) -> IdentityForm {
    let m = k - l;
    let half = (q - 2.0 - 2.0 * alpha) / 2.0;
    let a = half * half;
    let lead = prod((0..m).map(|i| (q * q - 4.0 * (1.0 + alpha + 2.0 * i as f64).powi(2)) / 4.0))
        .powi(2);
    let coeff12 = if printed {
        (q + 2.0 - 4.0 * m as f64 - 2.0 * alpha) / 2.0
    } else {
        (q - 4.0 * m as f64 - 2.0 * alpha) / 2.0
    };
    let mut rhs = vec![
        t(
            "lead",
            lead,
            IntegrandExpr::abs_chain(OpChain::r_r2k(l), 2.0, -(4.0 * m as f64 + 2.0 * alpha)),
        ),
        t(
            "sq_h",
            1.0,
            IntegrandExpr::sq_sum(OpChain::r_r2k(k), half, OpChain::r2k(k), 1.0, -2.0 * alpha),
        ),
        t(
            "sq_12",
            a * prod((0..m.saturating_sub(1)).map(|i| c_alpha(q, 2.0 * i as f64 + 1.0 + alpha)))
                .powi(2),
            IntegrandExpr::sq_sum(
                OpChain::rr_r2k(l),
                coeff12,
                OpChain::r_r2k(l),
                1.0,
                -(4.0 * (m as f64 - 1.0) + 2.0 + 2.0 * alpha),
            ),
        ),
    ];
    for j in 0..m.saturating_sub(1) {
        let pj = prod((0..j).map(|i| c_alpha(q, 2.0 * i as f64 + 1.0 + alpha))).powi(2);
        let cj = c_alpha(q, 2.0 * j as f64 + 1.0 + alpha);
        rhs.push(t(
            format!("sq[{j}]"),
            a * pj,
            IntegrandExpr::sq_sum(
                OpChain::r2k(k - j),
                cj,
                OpChain::r2k(k - j - 1),
                2.0,
                -4.0 * j as f64 - 2.0 - 2.0 * alpha,
            ),
        ));
        rhs.push(t(
            format!("conj[{j}]"),
            2.0 * a * pj * cj,
            IntegrandExpr::sq_sum(
                OpChain::r_r2k(k - j - 1),
                (q - 6.0 - 2.0 * alpha - 4.0 * j as f64) / 2.0,
                OpChain::r2k(k - j - 1),
                1.0,
                -4.0 - 2.0 * alpha - 4.0 * j as f64,
            ),
        ));
    }
    IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r_r2k(k), 2.0, -2.0 * alpha)),
        rhs,
    }
}

/// L^p Hardy identity.
pub fn id_lph(q: f64, p: f64, alpha: f64) -> Result<IdentityForm> {
    let d = d_p_alpha(q, p, alpha)?;
    Ok(IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r_r2k(0), p, -p * alpha)),
        rhs: vec![
            t(
                "lead",
                d.abs().powf(p),
                IntegrandExpr::abs_chain(OpChain::identity(), p, -p * (1.0 + alpha)),
            ),
            t(
                "rp",
                p,
                IntegrandExpr::RpTerm {
                    p,
                    xi: ArgExpr::op(-d, OpChain::identity(), 1.0),
                    eta: ArgExpr::op(1.0, OpChain::r_r2k(0), 0.0),
                    rexp: -p * alpha,
                },
            ),
        ],
    })
}

/// One L^p Rellich step: the remainder block behind it is reused by the
/// higher-order ladders.
fn lpr_block(
    q: f64,
    p: f64,
    weight_alpha: f64,
    inner: usize,
    outer_coeff: f64,
    label: &str,
) -> Result<Vec<TermSpec>> {
    let c = c_p_alpha(q, p, weight_alpha)?;
    let w_rp = -p * weight_alpha;
    let w_mod = -(p * (2.0 + weight_alpha) - 2.0);
    Ok(vec![
        t(
            format!("rp{label}"),
            p * outer_coeff,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(c, OpChain::r2k(inner), 2.0),
                eta: ArgExpr::op(-1.0, OpChain::r2k(inner + 1), 0.0),
                rexp: w_rp,
            },
        ),
        t(
            format!("mod{label}"),
            p * (p - 1.0) * outer_coeff * c.abs().powf(p - 2.0) * c,
            IntegrandExpr::ModDeriv {
                chain: OpChain::r2k(inner),
                p,
                c: (q - p * (2.0 + weight_alpha)) / p,
                rexp: w_mod,
            },
        ),
        t(
            format!("im{label}"),
            p * outer_coeff * c.abs().powf(p - 2.0) * c,
            IntegrandExpr::ImTerm {
                chain: OpChain::r2k(inner),
                p,
                rexp: w_mod,
            },
        ),
    ])
}

/// L^p Rellich identity.
pub fn id_lpr(q: f64, p: f64, alpha: f64) -> Result<IdentityForm> {
    let c = c_p_alpha(q, p, alpha)?;
    let mut rhs = vec![t(
        "lead",
        c.abs().powf(p),
        IntegrandExpr::abs_chain(OpChain::identity(), p, -p * (2.0 + alpha)),
    )];
    rhs.extend(lpr_block(q, p, alpha, 0, 1.0, "")?);
    Ok(IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r2k(1), p, -p * alpha)),
        rhs,
    })
}

/// L^p even ladder (printed form matches the iterated route).
pub fn id_lp_even(q: f64, p: f64, alpha: f64, k: usize) -> Result<IdentityForm> {
    let mut rhs = vec![t(
        "lead",
        prod_res((0..k).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + alpha)))?
            .abs()
            .powf(p),
        IntegrandExpr::abs_chain(OpChain::identity(), p, -p * (2.0 * k as f64 + alpha)),
    )];
    for j in 0..k {
        let pj = prod_res((0..j).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + alpha)))?
            .abs()
            .powf(p);
        rhs.extend(lpr_block(
            q,
            p,
            2.0 * j as f64 + alpha,
            k - j - 1,
            pj,
            &format!("[{j}]"),
        )?);
    }
    Ok(IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r2k(k), p, -p * alpha)),
        rhs,
    })
}

/// L^p odd ladder (printed form matches the iterated route).
pub fn id_lp_odd(q: f64, p: f64, alpha: f64, k: usize) -> Result<IdentityForm> {
    let d = d_p_alpha(q, p, alpha)?;
    let dp = d.abs().powf(p);
    let mut rhs = vec![
        t(
            "lead",
            dp * prod_res((0..k).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + 1.0 + alpha)))?
                .abs()
                .powf(p),
            IntegrandExpr::abs_chain(
                OpChain::identity(),
                p,
                -p * (2.0 * k as f64 + 1.0 + alpha),
            ),
        ),
        t(
            "rp_h",
            p,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(-d, OpChain::r2k(k), 1.0),
                eta: ArgExpr::op(1.0, OpChain::r_r2k(k), 0.0),
                rexp: -p * alpha,
            },
        ),
    ];
    for j in 0..k {
        let pj = prod_res((0..j).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + 1.0 + alpha)))?
            .abs()
            .powf(p);
        rhs.extend(lpr_block(
            q,
            p,
            2.0 * j as f64 + 1.0 + alpha,
            k - j - 1,
            dp * pj,
            &format!("[{j}]"),
        )?);
    }
    Ok(IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r_r2k(k), p, -p * alpha)),
        rhs,
    })
}

/// The conjugated-derivative equality behind the L^p first-to-second
/// identities: |Rf + (Q−1)f/r|^p expanded against |f|^p.
pub fn id_lp_abcd(q: f64, p: f64, alpha: f64) -> Result<IdentityForm> {
    let pp = p / (p - 1.0);
    let lam = (q + pp * alpha) / pp;
    Ok(IdentityForm {
        lhs: t(
            "lhs",
            1.0,
            IntegrandExpr::AbsPow {
                arg: ArgExpr::op(1.0, OpChain::r_r2k(0), 0.0).plus_op(
                    q - 1.0,
                    OpChain::identity(),
                    1.0,
                ),
                p,
                rexp: -p * alpha,
            },
        ),
        rhs: vec![
            t(
                "lead",
                lam.abs().powf(p),
                IntegrandExpr::abs_chain(OpChain::identity(), p, -p * (1.0 + alpha)),
            ),
            t(
                "rp",
                p,
                IntegrandExpr::RpTerm {
                    p,
                    xi: ArgExpr::op(lam, OpChain::identity(), 1.0),
                    eta: ArgExpr::op(1.0, OpChain::r_r2k(0), 0.0).plus_op(
                        q - 1.0,
                        OpChain::identity(),
                        1.0,
                    ),
                    rexp: -p * alpha,
                },
            ),
        ],
    })
}

/// L^p first-to-second-order identity (abcd applied to Rf).
pub fn id_lp12(q: f64, p: f64, alpha: f64) -> Result<IdentityForm> {
    let pp = p / (p - 1.0);
    let lam = (q + pp * alpha) / pp;
    Ok(IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r2k(1), p, -p * alpha)),
        rhs: vec![
            t(
                "lead",
                lam.abs().powf(p),
                IntegrandExpr::abs_chain(OpChain::r_r2k(0), p, -p * (1.0 + alpha)),
            ),
            t(
                "rp",
                p,
                IntegrandExpr::RpTerm {
                    p,
                    xi: ArgExpr::op(lam, OpChain::r_r2k(0), 1.0),
                    eta: ArgExpr::op(1.0, OpChain::r2k(1), 0.0),
                    rexp: -p * alpha,
                },
            ),
        ],
    })
}

/// Mixed-order L^p even identity.
pub fn id_lphrnew_even(q: f64, p: f64, alpha: f64, k: usize, l: usize) -> Result<IdentityForm> {
    let m = k - l;
    let pp = p / (p - 1.0);
    // cancelled lead constant, identical to
    // p^p/|Q−pα|^p ∏ |(Q−p(2i+α))(Q+p'(2i+α))/(pp')|^p
    let lead = ((q + pp * alpha).abs() / pp
        * prod((1..m).map(|i| {
            ((q - p * (2.0 * i as f64 + alpha)) * (q + pp * (2.0 * i as f64 + alpha))).abs()
                / (p * pp)
        })))
    .powf(p);
    let beta = 2.0 * (m as f64 - 1.0) + alpha;
    let lam = (q + pp * beta) / pp;
    let mut rhs = vec![
        t(
            "lead",
            lead,
            IntegrandExpr::abs_chain(
                OpChain::r_r2k(l),
                p,
                -p * (2.0 * m as f64 - 1.0 + alpha),
            ),
        ),
        t(
            "rp_12",
            p * prod_res((0..m.saturating_sub(1)).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + alpha)))?
                .abs()
                .powf(p),
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(lam, OpChain::r_r2k(l), 1.0),
                eta: ArgExpr::op(1.0, OpChain::r2k(l + 1), 0.0),
                rexp: -p * beta,
            },
        ),
    ];
    for j in 0..m.saturating_sub(1) {
        let pj = prod_res((0..j).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + alpha)))?
            .abs()
            .powf(p);
        rhs.extend(lpr_block(
            q,
            p,
            2.0 * j as f64 + alpha,
            k - j - 1,
            pj,
            &format!("[{j}]"),
        )?);
    }
    Ok(IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r2k(k), p, -p * alpha)),
        rhs,
    })
}

/// Mixed-order L^p odd identity. `printed` keeps the displayed modulus
/// coefficient (Q−p(2(j+1)+α))/p in the j ≥ 1 groups; the α → 1+α shift
/// gives (Q−p(2(j+1)+1+α))/p.
pub fn id_lphrnew_odd(
    q: f64,
    p: f64,
    alpha: f64,
    k: usize,
    l: usize,
    printed: bool,
) -> Result<IdentityForm> {
    let m = k - l;
    let pp = p / (p - 1.0);
    let d = d_p_alpha(q, p, alpha)?;
    let dp = d.abs().powf(p);
    let lead = prod((0..m).map(|i| {
        ((q - p * (2.0 * i as f64 + 1.0 + alpha)) * (q + pp * (2.0 * i as f64 + 1.0 + alpha)))
            .abs()
            / (p * pp)
    }))
    .powf(p);
    let beta = 2.0 * m as f64 - 1.0 + alpha;
    let lam = (q + pp * beta) / pp;
    let mut rhs = vec![
        t(
            "lead",
            lead,
            IntegrandExpr::abs_chain(OpChain::r_r2k(l), p, -p * (2.0 * m as f64 + alpha)),
        ),
        t(
            "rp_h",
            p,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(-d, OpChain::r2k(k), 1.0),
                eta: ArgExpr::op(1.0, OpChain::r_r2k(k), 0.0),
                rexp: -p * alpha,
            },
        ),
        t(
            "rp_12",
            p * dp
                * prod_res(
                    (0..m.saturating_sub(1)).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + 1.0 + alpha)),
                )?
                .abs()
                .powf(p),
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(lam, OpChain::r_r2k(l), 1.0),
                eta: ArgExpr::op(1.0, OpChain::r2k(l + 1), 0.0),
                rexp: -p * beta,
            },
        ),
    ];
    for j in 0..m.saturating_sub(1) {
        let pj = prod_res((0..j).map(|i| c_p_alpha(q, p, 2.0 * i as f64 + 1.0 + alpha)))?
            .abs()
            .powf(p);
        let mut block = lpr_block(q, p, 2.0 * j as f64 + 1.0 + alpha, k - j - 1, dp * pj, &format!("[{j}]"))?;
        if printed && j >= 1 {
            // the displayed modulus coefficient is unshifted in the j-sum
            if let IntegrandExpr::ModDeriv { c, .. } = &mut block[1].expr {
                *c = (q - p * (2.0 * (j as f64 + 1.0) + alpha)) / p;
            }
        }
        rhs.extend(block);
    }
    Ok(IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r_r2k(k), p, -p * alpha)),
        rhs,
    })
}

/// Critical Hardy identity (needs R through the evaluation environment).
pub fn id_crit_h(q: f64, p: f64) -> IdentityForm {
    IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r_r2k(0), p, -(q - p))),
        rhs: vec![
            t(
                "lead",
                ((p - 1.0) / p).powf(p),
                IntegrandExpr::CritAbs {
                    fpow: 0.0,
                    s: p,
                    rexp: -q,
                },
            ),
            t(
                "rp",
                p,
                IntegrandExpr::RpTerm {
                    p,
                    xi: ArgExpr::crit(-(p - 1.0) / p),
                    eta: ArgExpr::op(1.0, OpChain::r_r2k(0), 0.0),
                    rexp: -(q - p),
                },
            ),
        ],
    }
}

/// Critical Rellich identity.
pub fn id_crit_r(q: f64, p: f64) -> IdentityForm {
    let pp = p / (p - 1.0);
    IdentityForm {
        lhs: t("lhs", 1.0, IntegrandExpr::abs_chain(OpChain::r2k(1), p, -(q - 2.0 * p))),
        rhs: vec![
            t(
                "lead",
                ((q - 2.0) / pp).powf(p),
                IntegrandExpr::CritAbs {
                    fpow: 0.0,
                    s: p,
                    rexp: -q,
                },
            ),
            t(
                "rp_12",
                p,
                IntegrandExpr::RpTerm {
                    p,
                    xi: ArgExpr::op(q - 2.0, OpChain::r_r2k(0), 1.0),
                    eta: ArgExpr::op(1.0, OpChain::r2k(1), 0.0),
                    rexp: -(q - 2.0 * p),
                },
            ),
            t(
                "rp_h",
                p * (q - 2.0).powf(p),
                IntegrandExpr::RpTerm {
                    p,
                    xi: ArgExpr::crit(-(p - 1.0) / p),
                    eta: ArgExpr::op(1.0, OpChain::r_r2k(0), 0.0),
                    rexp: -(q - p),
                },
            ),
        ],
    }
}

/// Critical even ladder. `printed` keeps the displayed product
/// ∏ a_{k−i−1,Q} in the modulus/Im sum block (which zeroes it through
/// a_{0,Q} = 0); the composed route has ∏ a_{i,Q}. The leftover α of the
/// displayed modulus coefficient is read as its substituted value
/// (Q−2kp)/p, i.e. the coefficient 2(k−j−1).
pub fn id_crit_even(q: f64, p: f64, k: usize, printed: bool) -> IdentityForm {
    let pp = p / (p - 1.0);
    let pa = prod((1..k).map(|i| a_jq(i, q))).powf(p);
    let mut rhs = vec![
        t(
            "lead",
            ((q - 2.0) / pp).powf(p) * pa,
            IntegrandExpr::CritAbs {
                fpow: 0.0,
                s: p,
                rexp: -q,
            },
        ),
        t(
            "rp_12",
            p * pa,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(q - 2.0, OpChain::r_r2k(0), 1.0),
                eta: ArgExpr::op(1.0, OpChain::r2k(1), 0.0),
                rexp: -(q - 2.0 * p),
            },
        ),
        t(
            "rp_h",
            p * (q - 2.0).powf(p) * pa,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::crit(-(p - 1.0) / p),
                eta: ArgExpr::op(1.0, OpChain::r_r2k(0), 0.0),
                rexp: -(q - p),
            },
        ),
    ];
    for j in 0..k.saturating_sub(1) {
        let aj = a_jq(k - j - 1, q);
        let pj = prod((k - j..k).map(|i| a_jq(i, q))).powf(p);
        let pj_mod = if printed {
            prod((k - j..k).map(|i| a_jq(k - i - 1, q))).powf(p)
        } else {
            pj
        };
        rhs.push(t(
            format!("rp[{j}]"),
            p * pj,
            IntegrandExpr::RpTerm {
                p,
                xi: ArgExpr::op(-aj, OpChain::r2k(k - j - 1), 2.0),
                eta: ArgExpr::op(1.0, OpChain::r2k(k - j), 0.0),
                rexp: -(q - 2.0 * (k - j) as f64 * p),
            },
        ));
        let w_mod = -(q - 2.0 * (k - j - 1) as f64 * p - 2.0);
        rhs.push(t(
            format!("mod[{j}]"),
            p * (p - 1.0) * pj_mod * aj.powf(p - 1.0),
            IntegrandExpr::ModDeriv {
                chain: OpChain::r2k(k - j - 1),
                p,
                c: 2.0 * (k - j - 1) as f64,
                rexp: w_mod,
            },
        ));
        rhs.push(t(
            format!("im[{j}]"),
            p * pj_mod * aj.powf(p - 1.0),
            IntegrandExpr::ImTerm {
                chain: OpChain::r2k(k - j - 1),
                p,
                rexp: w_mod,
            },
        ));
    }
    IdentityForm {
        lhs: t(
            "lhs",
            1.0,
            IntegrandExpr::abs_chain(OpChain::r2k(k), p, -(q - 2.0 * k as f64 * p)),
        ),
        rhs,
    }
}

/// Critical odd ladder: (2k)^p times the even ladder plus one Hardy step.
pub fn id_crit_odd(q: f64, p: f64, k: usize, printed: bool) -> IdentityForm {
    let even = id_crit_even(q, p, k, printed);
    let scale = (2.0 * k as f64).powf(p);
    let mut rhs: Vec<TermSpec> = even
        .rhs
        .into_iter()
        .map(|mut t| {
            t.coeff *= scale;
            t
        })
        .collect();
    rhs.push(t(
        "rp_hardy",
        p,
        IntegrandExpr::RpTerm {
            p,
            xi: ArgExpr::op(-2.0 * k as f64, OpChain::r2k(k), 1.0),
            eta: ArgExpr::op(1.0, OpChain::r_r2k(k), 0.0),
            rexp: -(q - (2.0 * k as f64 + 1.0) * p),
        },
    ));
    IdentityForm {
        lhs: t(
            "lhs",
            1.0,
            IntegrandExpr::abs_chain(OpChain::r_r2k(k), p, -(q - (2.0 * k as f64 + 1.0) * p)),
        ),
        rhs,
    }
}

fn prod_res(iter: impl Iterator<Item = Result<f64>>) -> Result<f64> {
    let mut acc = 1.0;
    for x in iter {
        acc *= x?;
    }
    Ok(acc)
}

/// Paper closed form of an equality entry, exactly as displayed.
pub fn paper_form(id: &str, pt: &ParamPoint) -> Result<IdentityForm> {
    form(id, pt, true)
}

/// Closed form with the known index typos repaired to match composition.
pub fn repaired_form(id: &str, pt: &ParamPoint) -> Result<IdentityForm> {
    form(id, pt, false)
}

fn form(id: &str, pt: &ParamPoint, printed: bool) -> Result<IdentityForm> {
    pt.validate()?;
    let q = pt.q;
    let alpha = pt.alpha();
    let p = pt.p();
    let k = pt.k();
    let l = pt.l();
    if matches!(
        id,
        "ID-L2new-even" | "ID-L2new-odd" | "ID-LpHRnew-even" | "ID-LpHRnew-odd"
    ) && k < l + 1
    {
        return Err(HrError::InvalidParam(format!("{id} needs k >= l+1, got k={k}, l={l}")));
    }
    Ok(match id {
        "ID-H2" => id_h2(q, alpha),
        "ID-R2" => id_r2(q, alpha),
        "ID-HR-even" => id_hr_even(q, alpha, k),
        "ID-HR-odd" => id_hr_odd(q, alpha, k, printed),
        "ID-12" => id_12(q, alpha),
        "ID-L2new-even" => id_l2new_even(q, alpha, k, l),
        "ID-L2new-odd" => id_l2new_odd(q, alpha, k, l, printed),
        "ID-LpH" => id_lph(q, p, alpha)?,
        "ID-LpR" => id_lpr(q, p, alpha)?,
        "ID-Lp-even" => id_lp_even(q, p, alpha, k)?,
        "ID-Lp-odd" => id_lp_odd(q, p, alpha, k)?,
        "ID-Lp-abcd" => id_lp_abcd(q, p, alpha)?,
        "ID-Lp12" => id_lp12(q, p, alpha)?,
        "ID-LpHRnew-even" => id_lphrnew_even(q, p, alpha, k, l)?,
        "ID-LpHRnew-odd" => id_lphrnew_odd(q, p, alpha, k, l, printed)?,
        "ID-crit-H" => id_crit_h(q, p),
        "ID-crit-R" => id_crit_r(q, p),
        "ID-crit-even" => id_crit_even(q, p, k, printed),
        "ID-crit-odd" => id_crit_odd(q, p, k, printed),
        other => return Err(HrError::UnknownEntry(other.to_string())),
    })
}
