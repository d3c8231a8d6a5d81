//! The catalogue registry: entry ids, kinds, parameter schemas, erratum
//! flags and the mapping from inequality entries to their parent
//! equalities.

use sha2::{Digest, Sha256};

use crate::constants::ParamPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Equality,
    Inequality,
    Uncertainty,
}

impl EntryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntryKind::Equality => "equality",
            EntryKind::Inequality => "inequality",
            EntryKind::Uncertainty => "uncertainty",
        }
    }
}

/// Static description of one catalogue entry.
#[derive(Debug, Clone, Copy)]
pub struct EntryInfo {
    pub id: &'static str,
    pub kind: EntryKind,
    pub takes_p: bool,
    pub takes_alpha: bool,
    pub takes_k: bool,
    pub takes_l: bool,
    pub takes_r: bool,
}

const fn eq(id: &'static str, p: bool, a: bool, k: bool, l: bool, r: bool) -> EntryInfo {
    EntryInfo {
        id,
        kind: EntryKind::Equality,
        takes_p: p,
        takes_alpha: a,
        takes_k: k,
        takes_l: l,
        takes_r: r,
    }
}

const fn ineq(id: &'static str, p: bool, a: bool, k: bool, l: bool, r: bool) -> EntryInfo {
    EntryInfo {
        id,
        kind: EntryKind::Inequality,
        takes_p: p,
        takes_alpha: a,
        takes_k: k,
        takes_l: l,
        takes_r: r,
    }
}

const fn unc(id: &'static str, p: bool, a: bool, l: bool, r: bool) -> EntryInfo {
    EntryInfo {
        id,
        kind: EntryKind::Uncertainty,
        takes_p: p,
        takes_alpha: a,
        takes_k: false,
        takes_l: l,
        takes_r: r,
    }
}

pub const CATALOGUE: &[EntryInfo] = &[
    eq("ID-H2", false, true, false, false, false),
    eq("ID-R2", false, true, false, false, false),
    eq("ID-HR-even", false, true, true, false, false),
    eq("ID-HR-odd", false, true, true, false, false),
    eq("ID-12", false, true, false, false, false),
    eq("ID-L2new-even", false, true, true, true, false),
    eq("ID-L2new-odd", false, true, true, true, false),
    eq("ID-LpH", true, true, false, false, false),
    eq("ID-LpR", true, true, false, false, false),
    eq("ID-Lp-even", true, true, true, false, false),
    eq("ID-Lp-odd", true, true, true, false, false),
    eq("ID-Lp-abcd", true, true, false, false, false),
    eq("ID-Lp12", true, true, false, false, false),
    eq("ID-LpHRnew-even", true, true, true, true, false),
    eq("ID-LpHRnew-odd", true, true, true, true, false),
    eq("ID-crit-H", true, false, false, false, true),
    eq("ID-crit-R", true, false, false, false, true),
    eq("ID-crit-even", true, false, true, false, true),
    eq("ID-crit-odd", true, false, true, false, true),
    ineq("INEQ-H2", false, true, false, false, false),
    ineq("INEQ-R2", false, true, false, false, false),
    ineq("INEQ-HR-even", false, true, true, false, false),
    ineq("INEQ-HR-odd", false, true, true, false, false),
    ineq("INEQ-12", false, true, false, false, false),
    ineq("INEQ-L2new-even", false, true, true, true, false),
    ineq("INEQ-L2new-odd", false, true, true, true, false),
    ineq("INEQ-LpH", true, true, false, false, false),
    ineq("INEQ-LpR", true, true, false, false, false),
    ineq("INEQ-Lp-even", true, true, true, false, false),
    ineq("INEQ-Lp-odd", true, true, true, false, false),
    ineq("INEQ-Lp12", true, true, false, false, false),
    ineq("INEQ-LpHRnew-even", true, true, true, true, false),
    ineq("INEQ-LpHRnew-odd", true, true, true, true, false),
    ineq("INEQ-crit-H", true, false, false, false, true),
    ineq("INEQ-crit-R", true, false, false, false, true),
    ineq("INEQ-crit-even", true, false, true, false, true),
    ineq("INEQ-crit-odd", true, false, true, false, true),
    unc("UNC-even", true, true, true, false),
    unc("UNC-odd", true, true, true, false),
    unc("UNC-crit-1", true, false, true, true),
    unc("UNC-crit-2", true, false, true, true),
    unc("UNC-crit-3", true, false, true, true),
    unc("UNC-crit-4", true, false, true, true),
];

pub fn lookup(id: &str) -> Option<&'static EntryInfo> {
    CATALOGUE.iter().find(|e| e.id == id)
}

/// Parent equality of an inequality entry.
pub fn parent_equality(ineq_id: &str) -> Option<&'static str> {
    Some(match ineq_id {
        "INEQ-H2" => "ID-H2",
        "INEQ-R2" => "ID-R2",
        "INEQ-HR-even" => "ID-HR-even",
        "INEQ-HR-odd" => "ID-HR-odd",
        "INEQ-12" => "ID-12",
        "INEQ-L2new-even" => "ID-L2new-even",
        "INEQ-L2new-odd" => "ID-L2new-odd",
        "INEQ-LpH" => "ID-LpH",
        "INEQ-LpR" => "ID-LpR",
        "INEQ-Lp-even" => "ID-Lp-even",
        "INEQ-Lp-odd" => "ID-Lp-odd",
        "INEQ-Lp12" => "ID-Lp12",
        "INEQ-LpHRnew-even" => "ID-LpHRnew-even",
        "INEQ-LpHRnew-odd" => "ID-LpHRnew-odd",
        "INEQ-crit-H" => "ID-crit-H",
        "INEQ-crit-R" => "ID-crit-R",
        "INEQ-crit-even" => "ID-crit-even",
        "INEQ-crit-odd" => "ID-crit-odd",
        _ => return None,
    })
}

/// Whether the displayed closed form differs from the composed form at
/// this parameter point (a documented erratum of the source formulas).
pub fn erratum_fires(id: &str, pt: &ParamPoint) -> bool {
    let k = pt.k();
    let l = pt.l();
    match id {
        "ID-HR-odd" => k >= 2,
        "ID-L2new-odd" => k >= l + 1,
        "ID-crit-even" | "ID-crit-odd" => k >= 3,
        "ID-LpHRnew-odd" => k >= l + 3,
        _ => false,
    }
}

/// Stable hash of the catalogue structure (ids, kinds, schemas and the
/// term layout at a probe point), recorded in every report.
pub fn catalogue_hash() -> String {
    let mut hasher = Sha256::new();
    for e in CATALOGUE {
        hasher.update(e.id.as_bytes());
        hasher.update([
            e.kind.as_str().as_bytes()[0],
            e.takes_p as u8,
            e.takes_alpha as u8,
            e.takes_k as u8,
            e.takes_l as u8,
            e.takes_r as u8,
        ]);
    }
    let probe = ParamPoint::new(9.5)
        .with_p(1.5)
        .with_alpha(0.2)
        .with_k(2)
        .with_l(0)
        .with_r_crit(1.5);
    for e in CATALOGUE {
        if e.kind == EntryKind::Equality {
            if let Ok(form) = super::closed::repaired_form(e.id, &probe) {
                hasher.update(form.lhs.name.as_bytes());
                for t in &form.rhs {
                    hasher.update(t.name.as_bytes());
                    hasher.update(format!("{:.17e}", t.coeff).as_bytes());
                }
            }
        }
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
