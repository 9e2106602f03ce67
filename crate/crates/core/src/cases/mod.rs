//! The rank table (k, m, n) of the layers, the compiled admissibility
//! verdict of every subcase kmn(j), and the loxodromic generator families.

mod families;
mod inoue;

pub use families::{construct, find_jm, validate, Construction, FamilyParams, FamilyTag, Validation};
pub use inoue::{inoue_from_integer_matrix, InoueGroup};

use serde::Serialize;

use crate::parabolic::CoreForm;
use crate::proj::ProjMatrix;
use crate::scalar::Scalar;

/// Ranks (k, m, n) of Γ_p, N3 and N4, with the parabolic form index j and,
/// for j = 4, optionally the canonical core form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CaseId {
    pub k: u8,
    pub m: u8,
    pub n: u8,
    pub j: u8,
    pub core: Option<CoreForm>,
}

impl CaseId {
    pub fn new(k: u8, m: u8, n: u8, j: u8) -> CaseId {
        CaseId { k, m, n, j, core: None }
    }

    pub fn with_core(self, core: CoreForm) -> CaseId {
        CaseId { core: Some(core), ..self }
    }

    pub fn row(&self) -> String {
        format!("{}{}{}", self.k, self.m, self.n)
    }

    pub fn label(&self) -> String {
        match self.core {
            Some(c) => format!("{}({}) {}", self.row(), self.j, c.name()),
            None => format!("{}({})", self.row(), self.j),
        }
    }

    /// Parses "220", "220(4)", "220(4) G1" or "220(4)/Γ1".
    pub fn parse(s: &str) -> Option<CaseId> {
        let s = s.trim();
        let (row, rest) = s.split_at(s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len()));
        let (k, m, n) = lookup_row(row)?;
        let rest = rest.trim();
        if rest.is_empty() {
            return None;
        }
        let close = rest.find(')')?;
        let j: u8 = rest.strip_prefix('(')?[..close - 1].trim().parse().ok()?;
        if !(1..=6).contains(&j) {
            return None;
        }
        let tail = rest[close + 1..].trim().trim_start_matches('/').trim();
        let core = if tail.is_empty() { None } else { Some(CoreForm::parse(tail)?) };
        Some(CaseId { k, m, n, j, core })
    }
}

pub const TABLE_ROWS: [&str; 20] = [
    "400", "310", "301", "300", "220", "211", "210", "202", "201", "200", "130", "121", "120", "112", "111", "110", "103",
    "102", "101", "100",
];

/// The rows of the rank table, decoded from the three digits of each label.
pub fn table_cases() -> Vec<(u8, u8, u8)> {
    TABLE_ROWS.iter().map(|r| lookup_row(r).unwrap()).collect()
}

pub fn lookup_row(label: &str) -> Option<(u8, u8, u8)> {
    if !TABLE_ROWS.contains(&label) {
        return None;
    }
    let d: Vec<u8> = label.bytes().map(|b| b - b'0').collect();
    Some((d[0], d[1], d[2]))
}

/// All 120 (row, j) pairs, without a core form.
pub fn all_cases() -> Vec<CaseId> {
    table_cases().into_iter().flat_map(|(k, m, n)| (1..=6).map(move |j| CaseId::new(k, m, n, j))).collect()
}

/// A conjugator γ and an element h whose conjugates γᵏhγ⁻ᵏ accumulate.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeInstance {
    pub gamma: ProjMatrix,
    pub h: ProjMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Described(Vec<FamilyTag>),
    Dismissed { reason: String, anchor: &'static str, escape: Option<EscapeInstance> },
    CommutativeOnly,
    PurelyParabolic,
    UnresolvedInPaper(String),
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Described(_) => "described",
            Verdict::Dismissed { .. } => "dismissed",
            Verdict::CommutativeOnly => "commutative-only",
            Verdict::PurelyParabolic => "purely-parabolic",
            Verdict::UnresolvedInPaper(_) => "unresolved",
        }
    }

    pub fn anchor(&self) -> &'static str {
        match self {
            Verdict::Described(_) => "families",
            Verdict::Dismissed { anchor, .. } => anchor,
            Verdict::CommutativeOnly => "kmn1.commutative",
            Verdict::PurelyParabolic => "purely-parabolic",
            Verdict::UnresolvedInPaper(_) => "no-lemma",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableEntry {
    pub case: String,
    pub j: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core: Option<String>,
    pub verdict: String,
    pub anchor: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl TableEntry {
    pub fn new(c: &CaseId, v: &Verdict) -> TableEntry {
        TableEntry {
            case: c.row(),
            j: c.j,
            core: c.core.map(|f| f.name().to_string()),
            verdict: v.kind().to_string(),
            anchor: v.anchor().to_string(),
            families: match v {
                Verdict::Described(f) => f.iter().map(|t| t.name().to_string()).collect(),
                _ => vec![],
            },
            reason: match v {
                Verdict::Dismissed { reason, .. } => Some(reason.clone()),
                Verdict::UnresolvedInPaper(n) => Some(n.clone()),
                _ => None,
            },
        }
    }
}

/// The compiled table over all 120 pairs, plus the per-core-form rows for j = 4.
pub fn compiled_table() -> Vec<TableEntry> {
    let mut out = vec![];
    for c in all_cases() {
        out.push(TableEntry::new(&c, &admissibility(&c)));
        if c.j == 4 {
            for f in cores_for_rank(c.k) {
                let cc = c.with_core(f);
                out.push(TableEntry::new(&cc, &admissibility(&cc)));
            }
        }
    }
    out
}

fn dismissed(reason: &str, anchor: &'static str) -> Verdict {
    Verdict::Dismissed { reason: reason.to_string(), anchor, escape: None }
}

fn escaping(reason: &str, anchor: &'static str, escape: EscapeInstance) -> Verdict {
    Verdict::Dismissed { reason: reason.to_string(), anchor, escape: Some(escape) }
}

fn m(rows: [[&str; 3]; 3]) -> ProjMatrix {
    ProjMatrix::new(rows.map(|r| r.map(|s| s.parse::<Scalar>().unwrap()))).unwrap()
}

/// γ = diag(1/4) ⊕ Jordan block at 2: conjugating h_{1,1} gives h_{8⁻ᵏ,1}.
fn escape_third_layer() -> EscapeInstance {
    EscapeInstance { gamma: m([["1/4", "0", "0"], ["0", "2", "1"], ["0", "0", "2"]]), h: ProjMatrix::translation_i(1, 1) }
}

/// Diag(α, β, α⁻¹β⁻¹) with |αβ²| < 1 shrinks h_{0,1} to the identity.
fn escape_fourth_layer() -> EscapeInstance {
    EscapeInstance { gamma: m([["2", "0", "0"], ["0", "1/2", "0"], ["0", "0", "1"]]), h: ProjMatrix::translation_i(0, 1) }
}

/// A type I homothety contracting a Layer2 element onto h_{0,1}.
fn escape_rlw_third() -> EscapeInstance {
    EscapeInstance { gamma: m([["1/4", "0", "0"], ["0", "2", "0"], ["0", "0", "2"]]), h: m([["1", "1", "1/2"], ["0", "1", "1"], ["0", "0", "1"]]) }
}

/// A strongly loxodromic diagonal element contracting a Layer2 element.
fn escape_rlw_fourth() -> EscapeInstance {
    EscapeInstance { gamma: m([["1/2", "0", "0"], ["0", "1", "0"], ["0", "0", "2"]]), h: m([["1", "1", "1/2"], ["0", "1", "1"], ["0", "0", "1"]]) }
}

fn cores_for_rank(k: u8) -> Vec<CoreForm> {
    CoreForm::ALL.into_iter().filter(|c| c.rank() == k as usize).collect()
}

fn structural(c: &CaseId) -> Option<Verdict> {
    let k = c.k;
    let bad = match c.j {
        1 | 4 => k > 2,
        5 => k != 3,
        6 => k < 3,
        _ => false,
    };
    if bad {
        return Some(dismissed(
            &format!("structurally impossible: form {} forces a different rank of Γ_p than k={}", c.j, k),
            "structural.rank",
        ));
    }
    if let Some(f) = c.core {
        if c.j != 4 || f.rank() != k as usize {
            return Some(dismissed(
                &format!("structurally impossible: core form {} has rank {}", f.name(), f.rank()),
                "structural.core-rank",
            ));
        }
    }
    None
}

/// The compiled verdict for a subcase. For j = 4 without a core form the
/// verdicts of the compatible core forms are merged.
pub fn admissibility(c: &CaseId) -> Verdict {
    if let Some(v) = structural(c) {
        return v;
    }
    let (k, mm, n) = (c.k, c.m, c.n);
    if mm == 0 && n == 0 {
        return Verdict::PurelyParabolic;
    }
    match c.j {
        1 => Verdict::CommutativeOnly,
        2 => {
            if mm > 0 {
                escaping("no elements in the third layer: conjugates accumulate", "kmn2.third-layer", escape_third_layer())
            } else if k == 1 {
                escaping(
                    "no fourth layer over a rank-one W unless W = ⟨h_(x,0)⟩, which is the Γ5 situation",
                    "kmn2.fourth-layer.redirect-G5",
                    escape_fourth_layer(),
                )
            } else if (k, n) == (3, 1) {
                Verdict::Described(vec![FamilyTag::Inoue])
            } else {
                Verdict::UnresolvedInPaper(format!("no lemma treats {}(2)", c.row()))
            }
        }
        3 => {
            let esc = if mm > 0 { escape_rlw_third() } else { escape_rlw_fourth() };
            escaping("no loxodromic elements: conjugates accumulate", "kmn3.no-loxodromic", esc)
        }
        4 => match c.core {
            Some(f) => core_verdict(f, mm, n),
            None => merge(cores_for_rank(k).into_iter().map(|f| core_verdict(f, mm, n)).collect()),
        },
        5 => dismissed("no loxodromic elements", "kmn5.no-loxodromic"),
        6 => dismissed("no loxodromic elements", "kmn6.no-loxodromic"),
        _ => unreachable!("j is checked on construction"),
    }
}

fn merge(vs: Vec<Verdict>) -> Verdict {
    let mut fams: Vec<FamilyTag> = vec![];
    for v in &vs {
        if let Verdict::Described(f) = v {
            for t in f {
                if !fams.contains(t) {
                    fams.push(*t);
                }
            }
        }
    }
    if !fams.is_empty() {
        return Verdict::Described(fams);
    }
    if let Some(v) = vs.iter().find(|v| matches!(v, Verdict::UnresolvedInPaper(_))) {
        return v.clone();
    }
    vs.into_iter().next().unwrap_or_else(|| dismissed("no compatible core form", "structural.core-rank"))
}

fn core_verdict(f: CoreForm, mm: u8, n: u8) -> Verdict {
    use FamilyTag::*;
    let d = dismissed;
    match (f, mm, n) {
        (CoreForm::G1, 1, 0) => Verdict::Described(vec![G1N3]),
        (CoreForm::G1, 2, 0) => Verdict::Described(vec![G1N3, G1N3Second]),
        (CoreForm::G1, 0, 1) => Verdict::Described(vec![G1N4]),
        (CoreForm::G1, 0, 2) => d("Γ1 admits no rank-2 fourth layer", "g1.no-rank2-n4"),
        (CoreForm::G1, _, _) => d("Γ1 admits no mix of third and fourth layers", "g1.no-n3-n4-mix"),

        (CoreForm::G2, 1, 0) => Verdict::Described(vec![G2N3]),
        (CoreForm::G2, 0, 1) => Verdict::Described(vec![G2N4]),
        (CoreForm::G2, _, _) => Verdict::UnresolvedInPaper(format!("the Γ2 lemma does not treat rank pattern m={mm}, n={n}")),

        (CoreForm::G3, 0, 1) => Verdict::Described(vec![G3N4]),
        (CoreForm::G3, 0, 2) => Verdict::Described(vec![G3N4, G3N4Second]),
        (CoreForm::G3, _, _) => d("Γ3 admits no third layer", "g3.no-n3"),

        (CoreForm::G4, 0, 1) => Verdict::Described(vec![G4N4]),
        (CoreForm::G4, 0, 2) => Verdict::Described(vec![G4N4, G4N4Second]),
        (CoreForm::G4, 0, 3) => Verdict::Described(vec![G4N4, G4N4Second, G4N4Third]),
        (CoreForm::G4, _, _) => d("Γ4 admits no third layer", "g4.no-n3"),

        (CoreForm::G5, 1, 0) => Verdict::Described(vec![G5N3]),
        (CoreForm::G5, 0, 1) => Verdict::Described(vec![G5N4]),
        (CoreForm::G5, 0, 2) => Verdict::Described(vec![G5N4, G5N4Second]),
        (CoreForm::G5, 0, 3) => d("Γ5 admits no rank-3 fourth layer", "g5.no-rank3-n4"),
        (CoreForm::G5, _, 0) => d("Γ5 admits no rank-2 third layer", "g5.n3-rank-le-1"),
        (CoreForm::G5, _, _) => d("Γ5: a third layer excludes the fourth layer", "g5.n3-excludes-n4"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows() {
        assert_eq!(lookup_row("310"), Some((3, 1, 0)));
        assert_eq!(lookup_row("211"), Some((2, 1, 1)));
        assert_eq!(lookup_row("130"), Some((1, 3, 0)));
        assert_eq!(lookup_row("302"), None);
        assert!(table_cases().iter().all(|(k, m, n)| k + m + n <= 4));
        assert_eq!(all_cases().len(), 120);
    }

    #[test]
    fn listed_verdicts() {
        let v = admissibility(&CaseId::new(3, 1, 0, 5));
        assert!(matches!(v, Verdict::Dismissed { anchor: "kmn5.no-loxodromic", .. }));
        let v = admissibility(&CaseId::new(2, 2, 0, 4).with_core(CoreForm::G1));
        assert_eq!(v, Verdict::Described(vec![FamilyTag::G1N3, FamilyTag::G1N3Second]));
        assert!(matches!(admissibility(&CaseId::new(1, 1, 1, 4).with_core(CoreForm::G5)), Verdict::Dismissed { .. }));
        assert!(matches!(admissibility(&CaseId::new(2, 0, 1, 2)), Verdict::UnresolvedInPaper(_)));
        assert_eq!(admissibility(&CaseId::new(3, 0, 1, 2)), Verdict::Described(vec![FamilyTag::Inoue]));
        assert_eq!(admissibility(&CaseId::new(2, 1, 0, 1)), Verdict::CommutativeOnly);
        assert_eq!(admissibility(&CaseId::new(2, 0, 0, 3)), Verdict::PurelyParabolic);
    }

    #[test]
    fn forced_ranks_never_described() {
        for c in all_cases() {
            let v = admissibility(&c);
            if matches!(v, Verdict::Described(_)) {
                match c.j {
                    4 => assert!(c.k <= 2),
                    5 => assert_eq!(c.k, 3),
                    6 => assert!(c.k >= 3),
                    1 => unreachable!(),
                    _ => {}
                }
            }
        }
        assert!(matches!(admissibility(&CaseId::new(2, 1, 0, 5)), Verdict::Dismissed { anchor: "structural.rank", .. }));
    }

    #[test]
    fn parse_labels() {
        assert_eq!(CaseId::parse("220(4) G1"), Some(CaseId::new(2, 2, 0, 4).with_core(CoreForm::G1)));
        assert_eq!(CaseId::parse("301(2)"), Some(CaseId::new(3, 0, 1, 2)));
        assert_eq!(CaseId::parse("111(4)/Γ5"), Some(CaseId::new(1, 1, 1, 4).with_core(CoreForm::G5)));
        assert_eq!(CaseId::parse("302(2)"), None);
        assert_eq!(CaseId::parse("220(7)"), None);
    }
}
