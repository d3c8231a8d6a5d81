//! The suite runner: a JSON config names catalogue entries, parameter
//! grids and profiles; the runner evaluates every combination, aggregates
//! verdicts deterministically (sorted by id, parameters, profile) and
//! reports overall pass/fail.
//!
//! A suite entry may carry `mutate_constant`, which scales the entry's
//! leading constant before evaluation; a mutated suite must fail, which is
//! the engine's regression sentinel.

use serde::{Deserialize, Serialize};

use crate::constants::ParamPoint;
use crate::error::HrError;
use crate::identities::{
    self, catalogue, evaluate_raw_form, EntryKind, IdentityReport, TermReport,
};
use crate::operators::GroupContext;
use crate::profile::RadialProfile;
use crate::Result;

/// Parameter grid: the cartesian product of the listed values.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ParamGrid {
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_crit: Option<Vec<f64>>,
}

impl ParamGrid {
    pub fn points(&self) -> Vec<ParamPoint> {
        fn opt<T: Copy>(v: &Option<Vec<T>>) -> Vec<Option<T>> {
            match v {
                Some(list) if !list.is_empty() => list.iter().copied().map(Some).collect(),
                _ => vec![None],
            }
        }
        let mut out = Vec::new();
        for &q in &self.q {
            for &p in &opt(&self.p) {
                for &alpha in &opt(&self.alpha) {
                    for &k in &opt(&self.k) {
                        for &l in &opt(&self.l) {
                            for &r in &opt(&self.r_crit) {
                                out.push(ParamPoint {
                                    q,
                                    p,
                                    alpha,
                                    k,
                                    l,
                                    r_crit: r,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub id: String,
    pub params: ParamGrid,
    pub profiles: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// regression sentinel: scale the entry's leading constant
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutate_constant: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub entries: Vec<SuiteEntry>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub pass: bool,
    pub total: usize,
    pub failed: usize,
    pub skipped_out_of_window: usize,
    pub results: Vec<IdentityReport>,
}

fn evaluate_mutated(
    id: &str,
    ctx: &GroupContext,
    pt: &ParamPoint,
    profile: &RadialProfile,
    tol: f64,
    factor: f64,
) -> Result<IdentityReport> {
    let info = catalogue::lookup(id).ok_or_else(|| HrError::UnknownEntry(id.to_string()))?;
    match info.kind {
        EntryKind::Equality => {
            let mut form = identities::closed::repaired_form(id, pt)?;
            if let Some(lead) = form.rhs.first_mut() {
                lead.coeff *= factor;
            }
            let ev = evaluate_raw_form(ctx, pt, profile, &form)?;
            let verdict = ev.residual <= tol * ev.scale.max(1e-30);
            Ok(IdentityReport {
                id: id.to_string(),
                kind: "equality".into(),
                params: *pt,
                profile: profile.descriptor(),
                terms: ev
                    .terms
                    .into_iter()
                    .map(|(name, value, err)| TermReport { name, value, err })
                    .collect(),
                residual: ev.residual,
                scale: ev.scale,
                tolerance: tol,
                verdict,
                degenerate: false,
                erratum: false,
                paper_residual: None,
                quotient: None,
                sharp_constant: None,
            })
        }
        EntryKind::Inequality | EntryKind::Uncertainty => {
            let mut rep = identities::evaluate_entry(id, ctx, pt, profile, Some(tol))?;
            if let (Some(c), Some(qt)) = (rep.sharp_constant, rep.quotient) {
                let mutated = c * factor;
                rep.sharp_constant = Some(mutated);
                rep.verdict = match info.kind {
                    EntryKind::Inequality => qt >= mutated * (1.0 - tol),
                    // uncertainty quotient is rhs/(C·lhs)
                    _ => qt / factor >= 1.0 / (1.0 + tol),
                };
            }
            Ok(rep)
        }
    }
}

/// Run every (entry, parameter point, profile) combination of the config.
/// Parameter points outside an inequality's validity window are counted as
/// skipped, not failed.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if config.entries.is_empty() {
        return Err(HrError::Config("suite has no entries".into()));
    }
    let mut results = Vec::new();
    let mut skipped = 0usize;
    for entry in &config.entries {
        let info = catalogue::lookup(&entry.id)
            .ok_or_else(|| HrError::UnknownEntry(entry.id.clone()))?;
        if entry.profiles.is_empty() {
            return Err(HrError::Config(format!("entry {} lists no profiles", entry.id)));
        }
        let profiles: Vec<RadialProfile> = entry
            .profiles
            .iter()
            .map(|s| RadialProfile::parse(s))
            .collect::<Result<_>>()?;
        let points = entry.params.points();
        if points.is_empty() {
            return Err(HrError::Config(format!("entry {} has an empty grid", entry.id)));
        }
        for pt in &points {
            let ctx = GroupContext::new(pt.q)?;
            for profile in &profiles {
                let rep = if let Some(factor) = entry.mutate_constant {
                    evaluate_mutated(
                        &entry.id,
                        &ctx,
                        pt,
                        profile,
                        entry.tol.unwrap_or(match info.kind {
                            EntryKind::Equality => identities::DEFAULT_EQ_TOL,
                            _ => identities::DEFAULT_INEQ_TOL,
                        }),
                        factor,
                    )
                } else {
                    identities::evaluate_entry(&entry.id, &ctx, pt, profile, entry.tol)
                };
                match rep {
                    Ok(r) => results.push(r),
                    Err(HrError::InvalidParam(msg)) if msg.contains("validity window") => {
                        skipped += 1;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    results.sort_by(|a, b| {
        (&a.id, format!("{:?}", a.params), &a.profile)
            .partial_cmp(&(&b.id, format!("{:?}", b.params), &b.profile))
            .unwrap()
    });
    let failed = results.iter().filter(|r| !r.verdict).count();
    Ok(SuiteReport {
        pass: failed == 0,
        total: results.len(),
        failed,
        skipped_out_of_window: skipped,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mini_config(mutate: Option<f64>) -> SuiteConfig {
        SuiteConfig {
            entries: vec![SuiteEntry {
                id: "ID-H2".into(),
                params: ParamGrid {
                    q: vec![5.0, 9.0],
                    alpha: Some(vec![0.0, 0.4]),
                    ..Default::default()
                },
                profiles: vec!["hipass:1,1.3*bump:1.6,2".into()],
                tol: None,
                mutate_constant: mutate,
            }],
            seed: 0,
        }
    }

    #[test]
    fn suite_runs_and_passes() {
        let rep = run_suite(&mini_config(None)).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.total, 4);
    }

    #[test]
    fn mutated_constant_is_caught() {
        let rep = run_suite(&mini_config(Some(1.0 + 1e-4))).unwrap();
        assert!(!rep.pass, "mutation must be detected");
    }

    #[test]
    fn empty_suite_is_config_error() {
        let cfg = SuiteConfig {
            entries: vec![],
            seed: 0,
        };
        assert!(matches!(run_suite(&cfg), Err(HrError::Config(_))));
    }
}
