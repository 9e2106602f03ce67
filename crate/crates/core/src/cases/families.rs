//! Constructors and validators of the loxodromic generator families.

use crate::classify::{classify_element, ElementClass};
use crate::error::{Error, Result};
use crate::lattice::rank_of_multiplicative;
use crate::parabolic::CoreForm;
use crate::proj::{proj_eq, ProjMatrix};
use crate::scalar::Scalar;
use crate::witness::GroupPresentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    G1N3,
    G1N3Second,
    G1N4,
    G2N3,
    G2N4,
    G3N4,
    G3N4Second,
    G4N4,
    G4N4Second,
    G4N4Third,
    G5N3,
    G5N4,
    G5N4Second,
    Inoue,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 14] = [
        FamilyTag::G1N3,
        FamilyTag::G1N3Second,
        FamilyTag::G1N4,
        FamilyTag::G2N3,
        FamilyTag::G2N4,
        FamilyTag::G3N4,
        FamilyTag::G3N4Second,
        FamilyTag::G4N4,
        FamilyTag::G4N4Second,
        FamilyTag::G4N4Third,
        FamilyTag::G5N3,
        FamilyTag::G5N4,
        FamilyTag::G5N4Second,
        FamilyTag::Inoue,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::G1N3 => "Γ1-N3",
            FamilyTag::G1N3Second => "Γ1-N3-second",
            FamilyTag::G1N4 => "Γ1-N4",
            FamilyTag::G2N3 => "Γ2-N3",
            FamilyTag::G2N4 => "Γ2-N4",
            FamilyTag::G3N4 => "Γ3-N4",
            FamilyTag::G3N4Second => "Γ3-N4-second",
            FamilyTag::G4N4 => "Γ4-N4",
            FamilyTag::G4N4Second => "Γ4-N4-second",
            FamilyTag::G4N4Third => "Γ4-N4-third",
            FamilyTag::G5N3 => "Γ5-N3",
            FamilyTag::G5N4 => "Γ5-N4",
            FamilyTag::G5N4Second => "Γ5-N4-second",
            FamilyTag::Inoue => "Inoue-301(2)",
        }
    }

    /// Accepts the display name, its ASCII spelling (G1-N3) and "Γ1-N3-rank2".
    pub fn parse(s: &str) -> Option<FamilyTag> {
        let norm = s.trim().replace('Γ', "G").to_ascii_lowercase();
        let norm = if norm == "g1-n3-rank2" { "g1-n3-second".to_string() } else { norm };
        let norm = if norm == "inoue" { "inoue-301(2)".to_string() } else { norm };
        FamilyTag::ALL.into_iter().find(|t| t.name().replace('Γ', "G").to_ascii_lowercase() == norm)
    }

    pub fn core(&self) -> Option<CoreForm> {
        use FamilyTag::*;
        match self {
            G1N3 | G1N3Second | G1N4 => Some(CoreForm::G1),
            G2N3 | G2N4 => Some(CoreForm::G2),
            G3N4 | G3N4Second => Some(CoreForm::G3),
            G4N4 | G4N4Second | G4N4Third => Some(CoreForm::G4),
            G5N3 | G5N4 | G5N4Second => Some(CoreForm::G5),
            Inoue => None,
        }
    }

    /// Number of loxodromic generators the family contributes.
    pub fn loxodromic_count(&self) -> usize {
        use FamilyTag::*;
        match self {
            G1N3Second | G3N4Second | G4N4Second | G5N4Second => 2,
            G4N4Third => 3,
            _ => 1,
        }
    }

    pub fn default_params(&self) -> FamilyParams {
        let s = |x: &str| -> Option<Scalar> { Some(x.parse().unwrap()) };
        let d = FamilyParams::default();
        match self {
            FamilyTag::G1N3 => FamilyParams { p: Some(2), q: Some(3), ..d },
            FamilyTag::G1N3Second => {
                let (j, m) = find_jm(2, 1, 3, 1).expect("default search succeeds");
                FamilyParams { p1: Some(2), q1: Some(1), p2: Some(3), q2: Some(1), j: Some(j), m: Some(m), ..d }
            }
            FamilyTag::G1N4 => FamilyParams { p: Some(2), q: Some(3), r: Some(1), ..d },
            FamilyTag::G2N3 => FamilyParams { y: s("i"), p: Some(1), q: Some(1), gamma23: s("1"), ..d },
            FamilyTag::G2N4 => FamilyParams { y: s("i"), p: Some(1), q: Some(1), alpha: s("2"), ..d },
            FamilyTag::G3N4 => FamilyParams { x: s("i"), p: Some(1), q: Some(1), beta: s("2"), ..d },
            FamilyTag::G3N4Second => FamilyParams {
                x: s("i"),
                p1: Some(1),
                q1: Some(1),
                beta: s("2"),
                p2: Some(2),
                q2: Some(1),
                beta2: s("3"),
                n: Some(2),
                m: Some(6),
                ..d
            },
            FamilyTag::G4N4 => FamilyParams { p: Some(2), alpha: s("2"), ..d },
            FamilyTag::G4N4Second => FamilyParams { p: Some(2), alpha: s("2"), q: Some(3), beta: s("3"), j: Some(1), ..d },
            FamilyTag::G4N4Third => FamilyParams {
                p: Some(2),
                alpha: s("2"),
                q: Some(3),
                beta: s("3"),
                j: Some(1),
                r: Some(3),
                delta: s("5"),
                k: Some(1),
                ..d
            },
            FamilyTag::G5N3 => FamilyParams { p: Some(2), gamma23: s("1"), ..d },
            FamilyTag::G5N4 => FamilyParams { alpha: s("2"), p: Some(3), ..d },
            FamilyTag::G5N4Second => FamilyParams { alpha: s("2"), p: Some(2), beta: s("1"), q: Some(3), j: Some(1), ..d },
            FamilyTag::Inoue => d,
        }
    }
}

/// Parameters of every family. Unused fields stay `None`; free scalars
/// (γ₁₂, γ₁₃, …) default to 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FamilyParams {
    pub p: Option<i64>,
    pub q: Option<i64>,
    pub r: Option<i64>,
    pub p1: Option<i64>,
    pub q1: Option<i64>,
    pub p2: Option<i64>,
    pub q2: Option<i64>,
    pub j: Option<i64>,
    pub m: Option<i64>,
    pub n: Option<i64>,
    pub k: Option<i64>,
    pub alpha: Option<Scalar>,
    pub beta: Option<Scalar>,
    /// β of the second generator in Γ3-N4-second.
    pub beta2: Option<Scalar>,
    pub delta: Option<Scalar>,
    pub x: Option<Scalar>,
    pub y: Option<Scalar>,
    pub gamma12: Option<Scalar>,
    pub gamma13: Option<Scalar>,
    pub gamma23: Option<Scalar>,
    pub mu12: Option<Scalar>,
    pub mu13: Option<Scalar>,
    pub mu23: Option<Scalar>,
    pub eta13: Option<Scalar>,
    pub z: Option<Scalar>,
}

impl FamilyParams {
    pub fn integer_fields(&self) -> [(&'static str, Option<i64>); 11] {
        [
            ("p", self.p),
            ("q", self.q),
            ("r", self.r),
            ("p1", self.p1),
            ("q1", self.q1),
            ("p2", self.p2),
            ("q2", self.q2),
            ("j", self.j),
            ("m", self.m),
            ("n", self.n),
            ("k", self.k),
        ]
    }

    pub fn scalar_fields(&self) -> [(&'static str, &Option<Scalar>); 14] {
        [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("beta2", &self.beta2),
            ("delta", &self.delta),
            ("x", &self.x),
            ("y", &self.y),
            ("gamma12", &self.gamma12),
            ("gamma13", &self.gamma13),
            ("gamma23", &self.gamma23),
            ("mu12", &self.mu12),
            ("mu13", &self.mu13),
            ("mu23", &self.mu23),
            ("eta13", &self.eta13),
            ("z", &self.z),
        ]
    }

    pub fn scalar_field_mut(&mut self, name: &str) -> Option<&mut Option<Scalar>> {
        Some(match name {
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "beta2" => &mut self.beta2,
            "delta" => &mut self.delta,
            "x" => &mut self.x,
            "y" => &mut self.y,
            "gamma12" => &mut self.gamma12,
            "gamma13" => &mut self.gamma13,
            "gamma23" => &mut self.gamma23,
            "mu12" => &mut self.mu12,
            "mu13" => &mut self.mu13,
            "mu23" => &mut self.mu23,
            "eta13" => &mut self.eta13,
            "z" => &mut self.z,
            _ => return None,
        })
    }

    pub fn int_field_mut(&mut self, name: &str) -> Option<&mut Option<i64>> {
        Some(match name {
            "p" => &mut self.p,
            "q" => &mut self.q,
            "r" => &mut self.r,
            "p1" => &mut self.p1,
            "q1" => &mut self.q1,
            "p2" => &mut self.p2,
            "q2" => &mut self.q2,
            "j" => &mut self.j,
            "m" => &mut self.m,
            "n" => &mut self.n,
            "k" => &mut self.k,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub family: FamilyTag,
    pub core: CoreForm,
    pub core_param: Option<Scalar>,
    /// The loxodromic generators, the family's own generator last.
    pub loxodromic: Vec<ProjMatrix>,
    /// Canonical core generators followed by the loxodromic ones.
    pub group: GroupPresentation,
    /// Parameters as used, with derived entries (μ₁₂, z, …) filled in.
    pub params: FamilyParams,
    pub notes: Vec<String>,
}

impl Construction {
    pub fn generator(&self) -> &ProjMatrix {
        self.loxodromic.last().unwrap()
    }

    pub fn core_group(&self) -> GroupPresentation {
        GroupPresentation::new(self.core.generators(self.core_param.as_ref()))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Validation {
    pub params: Option<FamilyParams>,
    /// One entry per failed constraint.
    pub diagnostics: Vec<String>,
    /// Informational findings (branches taken, printed side conditions).
    pub notes: Vec<String>,
}

fn missing(name: &str) -> Error {
    Error::Constraint(format!("missing parameter {name}"))
}

fn int(v: Option<i64>, name: &str) -> Result<i64> {
    v.ok_or_else(|| missing(name))
}

fn sc(v: &Option<Scalar>, name: &str) -> Result<Scalar> {
    v.clone().ok_or_else(|| missing(name))
}

fn free(v: &Option<Scalar>) -> Scalar {
    v.clone().unwrap_or_else(Scalar::zero)
}

fn si(n: i64) -> Scalar {
    Scalar::int(n)
}

fn inv(s: &Scalar, name: &str) -> Result<Scalar> {
    s.inv().map_err(|_| Error::Constraint(format!("{name} must be nonzero")))
}

fn mat(r: [[Scalar; 3]; 3]) -> Result<ProjMatrix> {
    ProjMatrix::new(r)
}

fn upper(a: Scalar, b: Scalar, c: Scalar, d: Scalar, e: Scalar, f: Scalar) -> Result<ProjMatrix> {
    let z = Scalar::zero;
    mat([[a, b, c], [z(), d, e], [z(), z(), f]])
}

fn req(fails: &mut Vec<String>, ok: bool, msg: &str) {
    if !ok {
        fails.push(msg.to_string());
    }
}

/// Whether s ∈ ℤ + ℤ·t for non-real t.
fn in_z_span(s: &Scalar, t: &Scalar) -> bool {
    let (a, b) = z_span_coords(s, t);
    a.is_integer() && b.is_integer()
}

/// Real coordinates (a, b) with s = a + b·t, for non-real t.
fn z_span_coords(s: &Scalar, t: &Scalar) -> (Scalar, Scalar) {
    let b = &s.im() / &t.im();
    let a = &s.re() - &(&b * &t.re());
    (a, b)
}

fn core_param_check(fails: &mut Vec<String>, v: &Scalar, name: &str) {
    req(fails, !v.is_real(), &format!("{name} ∉ ℝ"));
}

/// The closure conditions making multiplication by p + q·t preserve ℤ + ℤ·t.
fn pair_conditions(fails: &mut Vec<String>, p: i64, q: i64, t: &Scalar, tn: &str) {
    let qs = si(q);
    let c1 = &si(p) - &(&qs * &t.norm_sqr());
    let c2 = &(&si(p) + &qs) + &(&(&si(2) * &qs) * &t.re());
    req(fails, c1.is_integer(), &format!("p − q|{tn}|² ∈ ℤ"));
    req(fails, c2.is_integer(), &format!("p + q + 2q·Re({tn}) ∈ ℤ"));
}

fn excluded(fails: &mut Vec<String>, v: i64, set: &[i64], name: &str) {
    if set.contains(&v) {
        let list: Vec<String> = set.iter().map(|x| x.to_string()).collect();
        fails.push(format!("{name} ∈ ℤ∖{{{}}}", list.join(",")));
    }
}

/// (1 − p₁)(p₁q₂ + p₂q₁), the denominator of μ₁₂.
fn g1_second_den(p1: i64, q1: i64, p2: i64, q2: i64) -> i64 {
    p1 * q2 + p2 * q1
}

fn g1_second_mu(p1: i64, q1: i64, p2: i64, q2: i64, j: i64, m: i64) -> Option<(Scalar, Scalar)> {
    let den = g1_second_den(p1, q1, p2, q2);
    if den == 0 || p1 == 1 {
        return None;
    }
    let one_p = 1 - p1;
    let mu12 = Scalar::ratio(-p1 * p2 * (m + j * p1 * p2), one_p * den);
    let mu13 = Scalar::ratio(p2 * (m * q1 + j * p1 * p1 * (p2 * q1 - one_p * q2)), one_p * one_p * den);
    Some((mu12, mu13))
}

fn g1_second_hard(p1: i64, q1: i64, p2: i64, q2: i64, j: i64, m: i64) -> bool {
    let den = g1_second_den(p1, q1, p2, q2);
    den != 0 && (p1 * p2 * (m + j * p1 * p2)) % den == 0
}

/// The divisibility conditions as printed alongside the μ formulas.
fn g1_second_printed(p1: i64, q1: i64, p2: i64, q2: i64, j: i64, m: i64) -> bool {
    let d = p1 * p2 + p1 * q2;
    d != 0 && (m + j * p1 * p2) % d == 0 && (m * p1 * q2 - j * p1 * p2 * p2 * q1) % d == 0
}

/// Bounded search |j|, |m| ≤ 100 for an integer pair making the Γ1 rank-2
/// commutator integral with μ₁₂, μ₁₃ ≠ 0; pairs also meeting the printed
/// divisibility conditions are preferred.
pub fn find_jm(p1: i64, q1: i64, p2: i64, q2: i64) -> Option<(i64, i64)> {
    let mut order: Vec<(i64, i64)> = (-100..=100).flat_map(|j| (-100..=100).map(move |m| (j, m))).collect();
    order.sort_by_key(|&(j, m)| (j.abs().max(m.abs()), j.abs() + m.abs(), -j, -m));
    let good = |&(j, m): &(i64, i64)| {
        g1_second_hard(p1, q1, p2, q2, j, m)
            && g1_second_mu(p1, q1, p2, q2, j, m).is_some_and(|(a, b)| !a.is_zero() && !b.is_zero())
    };
    order
        .iter()
        .find(|c| good(c) && g1_second_printed(p1, q1, p2, q2, c.0, c.1))
        .or_else(|| order.iter().find(|c| good(c)))
        .copied()
}

/// Failed constraints and informational notes for a parameter set.
fn check(tag: FamilyTag, p: &FamilyParams) -> Result<(Vec<String>, Vec<String>)> {
    let mut f = vec![];
    let mut notes = vec![];
    use FamilyTag::*;
    match tag {
        G1N3 => {
            excluded(&mut f, int(p.p, "p")?, &[-1, 0, 1], "p");
            req(&mut f, int(p.q, "q")? != 0, "q ∈ ℤ∖{0}");
        }
        G1N3Second => {
            let (p1, q1, p2, q2) = (int(p.p1, "p1")?, int(p.q1, "q1")?, int(p.p2, "p2")?, int(p.q2, "q2")?);
            let (j, m) = (int(p.j, "j")?, int(p.m, "m")?);
            excluded(&mut f, p1, &[-1, 0, 1], "p1");
            excluded(&mut f, p2, &[-1, 0, 1], "p2");
            req(&mut f, q1 != 0, "q1 ∈ ℤ∖{0}");
            req(&mut f, q2 != 0, "q2 ∈ ℤ∖{0}");
            req(&mut f, g1_second_den(p1, q1, p2, q2) != 0, "p1·q2 + p2·q1 ≠ 0");
            if f.is_empty() {
                req(&mut f, g1_second_hard(p1, q1, p2, q2, j, m), "(p1·q2 + p2·q1) | p1·p2·(m + j·p1·p2)");
                let printed = g1_second_printed(p1, q1, p2, q2, j, m);
                notes.push(format!("printed divisibility conditions {}", if printed { "hold" } else { "fail" }));
                if rank_of_multiplicative(&[si(p1), si(p2)]).map_or(false, |r| r < 2) {
                    notes.push("p1 and p2 are multiplicatively dependent, so N3 has rank 1".into());
                }
            }
        }
        G1N4 => {
            req(&mut f, int(p.p, "p")? != 0, "p ∈ ℤ∖{0}");
            req(&mut f, int(p.q, "q")? != 0, "q ∈ ℤ∖{0}");
            int(p.r, "r")?;
        }
        G2N3 | G2N4 => {
            let y = sc(&p.y, "y")?;
            let (pp, qq) = (int(p.p, "p")?, int(p.q, "q")?);
            core_param_check(&mut f, &y, "y");
            req(&mut f, pp != 0 || qq != 0, "|p| + |q| ≠ 0");
            if f.is_empty() {
                let z = &si(pp) + &(&si(qq) * &y);
                req(&mut f, !z.norm_sqr().is_one(), "|z_{p,q}| ≠ 1");
                pair_conditions(&mut f, pp, qq, &y, "y");
                if tag == G2N3 {
                    req(&mut f, !free(&p.gamma23).is_zero(), "γ23 ≠ 0");
                } else {
                    let a = sc(&p.alpha, "alpha")?;
                    req(&mut f, !a.is_zero(), "α ≠ 0");
                    req(&mut f, !(&z * &z).approx_eq(&a.pow(3)), "z_{p,q}² ≠ α³");
                }
            }
        }
        G3N4 | G3N4Second => {
            let x = sc(&p.x, "x")?;
            core_param_check(&mut f, &x, "x");
            let pairs: Vec<(i64, i64, Scalar, &str)> = if tag == G3N4 {
                vec![(int(p.p, "p")?, int(p.q, "q")?, sc(&p.beta, "beta")?, "")]
            } else {
                vec![
                    (int(p.p1, "p1")?, int(p.q1, "q1")?, sc(&p.beta, "beta")?, "1"),
                    (int(p.p2, "p2")?, int(p.q2, "q2")?, sc(&p.beta2, "beta2")?, "2"),
                ]
            };
            for (pp, qq, b, i) in &pairs {
                req(&mut f, *pp != 0 || *qq != 0, &format!("|p{i}| + |q{i}| ≠ 0"));
                req(&mut f, !b.is_zero(), &format!("β{i} ≠ 0"));
                if !x.is_real() {
                    pair_conditions(&mut f, *pp, *qq, &x, "x");
                    let w = &si(*pp) + &(&si(*qq) * &x);
                    req(&mut f, !w.is_zero() && !(&w * &b.pow(3)).is_one(), &format!("(p{i} + q{i}x)·β{i}³ ≠ 1"));
                }
            }
            if tag == G3N4Second && f.is_empty() {
                let (n, m) = (int(p.n, "n")?, int(p.m, "m")?);
                let w1 = &si(pairs[0].0) + &(&si(pairs[0].1) * &x);
                let w2 = &si(pairs[1].0) + &(&si(pairs[1].1) * &x);
                req(&mut f, !w1.is_one(), "p1 + q1x ≠ 1");
                if f.is_empty() {
                    let mu12 = g3_second_mu12(&x, &w1, &w2, n, m);
                    let c6 = &(&mu12 * &(&w1 - &Scalar::one())) / &(&w1 * &w2);
                    req(&mut f, in_z_span(&c6, &x), "μ12(w1 − 1)/(w1·w2) ∈ ℤ + ℤx");
                }
            }
        }
        G4N4 | G4N4Second | G4N4Third => {
            let pp = int(p.p, "p")?;
            let a = sc(&p.alpha, "alpha")?;
            excluded(&mut f, pp, &[0, 1], "p");
            req(&mut f, !a.is_zero() && !a.norm_sqr().is_one(), "|α| ≠ 1");
            req(&mut f, !(&si(pp) * &a.pow(3)).is_one(), "p·α³ ≠ 1");
            if tag != G4N4 && f.is_empty() {
                let qq = int(p.q, "q")?;
                let b = sc(&p.beta, "beta")?;
                int(p.j, "j")?;
                req(&mut f, qq != 0, "q ∈ ℤ∖{0}");
                req(&mut f, !b.is_zero(), "β ≠ 0");
                req(&mut f, !(&si(qq) * &b.pow(3)).is_one(), "q·β³ ≠ 1");
                let unit = (&si(pp * pp) * &a.pow(3)).is_one();
                notes.push(format!("branch p²α³ {} 1", if unit { "=" } else { "≠" }));
                if !unit {
                    req(&mut f, free(&p.mu13).is_zero(), "μ13 = 0 when p²α³ ≠ 1");
                }
            }
            if tag == G4N4Third && f.is_empty() {
                let (qq, j) = (int(p.q, "q")?, int(p.j, "j")?);
                let (r, k) = (int(p.r, "r")?, int(p.k, "k")?);
                let d = sc(&p.delta, "delta")?;
                excluded(&mut f, r, &[-1, 0, 1], "r");
                req(&mut f, !d.is_zero(), "δ ≠ 0");
                req(&mut f, !(&si(r) * &d.pow(3)).is_one(), "r·δ³ ≠ 1");
                let b = sc(&p.beta, "beta")?;
                if (&si(qq * qq) * &b.pow(3)).is_one() {
                    req(&mut f, free(&p.mu13).is_zero(), "μ13 = 0 when q²β³ = 1");
                }
                let lhs = k * r * (1 - qq);
                let rhs = j * qq * (1 - r);
                let div = qq * r * (1 - pp);
                if lhs == rhs {
                    notes.push("commuting branch kr(1−q) = jq(1−r)".into());
                } else if div != 0 && (pp * (lhs - rhs)) % div == 0 {
                    notes.push("divisibility branch qr(1−p) | p(kr(1−q) − jq(1−r))".into());
                } else {
                    f.push("kr(1−q) = jq(1−r) or qr(1−p) | p(kr(1−q) − jq(1−r))".into());
                }
            }
        }
        G5N3 => {
            excluded(&mut f, int(p.p, "p")?, &[-1, 0, 1], "p");
            req(&mut f, !free(&p.gamma23).is_zero(), "γ23 ≠ 0");
        }
        G5N4 | G5N4Second => {
            let a = sc(&p.alpha, "alpha")?;
            let pp = int(p.p, "p")?;
            req(&mut f, !a.is_zero(), "α ≠ 0");
            req(&mut f, pp != 0, "p ∈ ℤ∖{0}");
            req(&mut f, !si(pp * pp).approx_eq(&a.pow(3)), "p² ≠ α³");
            if tag == G5N4Second {
                let b = sc(&p.beta, "beta")?;
                let qq = int(p.q, "q")?;
                req(&mut f, pp != 1, "p ≠ 1");
                req(&mut f, !b.is_zero(), "β ≠ 0");
                req(&mut f, qq != 0, "q ∈ ℤ∖{0}");
                req(&mut f, int(p.j, "j")? != 0, "j ∈ ℤ∖{0}");
                req(&mut f, !si(qq * qq).approx_eq(&b.pow(3)), "q² ≠ β³");
            }
        }
        Inoue => return Err(Error::Invalid("the Inoue family is built from an integer matrix".into())),
    }
    Ok((f, notes))
}

fn g3_second_mu12(x: &Scalar, w1: &Scalar, w2: &Scalar, n: i64, m: i64) -> Scalar {
    let num = &(&si(n) + &(&si(m) * x)) - &(&(x + &Scalar::one()) * w2);
    &num / &(&Scalar::one() - w1)
}

fn g4_eta13(p: &FamilyParams) -> Result<Scalar> {
    let (q, r) = (si(int(p.q, "q")?), si(int(p.r, "r")?));
    let (b, d) = (sc(&p.beta, "beta")?, sc(&p.delta, "delta")?);
    let mu13 = free(&p.mu13);
    if mu13.is_zero() {
        return Ok(Scalar::zero());
    }
    let num = &(&(&q * &(&b * &b)) * &mu13) * &(&Scalar::one() - &(&(&r * &r) * &d.pow(3)));
    let den = &(&r * &(&d * &d)) * &(&Scalar::one() - &(&(&q * &q) * &b.pow(3)));
    Ok(&num / &den)
}

/// Loxodromic generators, in order, with derived parameters filled in.
fn build(tag: FamilyTag, p: &FamilyParams) -> Result<(Vec<ProjMatrix>, FamilyParams)> {
    use FamilyTag::*;
    let mut out = p.clone();
    let z = Scalar::zero;
    let one = Scalar::one;
    let gens = match tag {
        G1N3 => {
            let (pp, qq) = (int(p.p, "p")?, int(p.q, "q")?);
            vec![upper(si(pp), free(&p.gamma12), free(&p.gamma13), one(), Scalar::ratio(qq, pp), one())?]
        }
        G1N3Second => {
            let (p1, q1, p2, q2) = (int(p.p1, "p1")?, int(p.q1, "q1")?, int(p.p2, "p2")?, int(p.q2, "q2")?);
            let (j, m) = (int(p.j, "j")?, int(p.m, "m")?);
            let (mu12, mu13) = g1_second_mu(p1, q1, p2, q2, j, m).ok_or_else(|| Error::Constraint("p1·q2 + p2·q1 ≠ 0".into()))?;
            for (given, val, nm) in [(&p.mu12, &mu12, "μ12"), (&p.mu13, &mu13, "μ13")] {
                if given.as_ref().is_some_and(|g| !g.approx_eq(val)) {
                    return Err(Error::Constraint(format!("{nm} disagrees with its formula")));
                }
            }
            out.mu12 = Some(mu12.clone());
            out.mu13 = Some(mu13.clone());
            let g = upper(si(p1), z(), z(), one(), Scalar::ratio(q1, p1), one())?;
            let mu = upper(si(p2), mu12, mu13, one(), Scalar::ratio(q2, p2), one())?;
            vec![g, mu]
        }
        G1N4 => {
            let (pp, qq, r) = (int(p.p, "p")?, int(p.q, "q")?, int(p.r, "r")?);
            vec![upper(si(pp * qq), free(&p.gamma12), free(&p.gamma13), si(qq), si(r), si(pp))?]
        }
        G2N3 | G2N4 => {
            let y = sc(&p.y, "y")?;
            let zz = &si(int(p.p, "p")?) + &(&si(int(p.q, "q")?) * &y);
            out.z = Some(zz.clone());
            if tag == G2N3 {
                vec![upper(zz, free(&p.gamma12), free(&p.gamma13), one(), free(&p.gamma23), one())?]
            } else {
                let a = sc(&p.alpha, "alpha")?;
                let ai = inv(&a, "α")?;
                let d2 = &(&ai * &ai) * &zz;
                let d3 = &a * &inv(&zz, "z")?;
                vec![upper(a, free(&p.gamma12), free(&p.gamma13), d2, free(&p.gamma23), d3)?]
            }
        }
        G3N4 => {
            let x = sc(&p.x, "x")?;
            let w = &si(int(p.p, "p")?) + &(&si(int(p.q, "q")?) * &x);
            let b = sc(&p.beta, "beta")?;
            let d3 = inv(&(&w * &b.pow(3)), "(p+qx)β³")?;
            vec![upper(w, free(&p.gamma12), free(&p.gamma13), one(), z(), d3)?]
        }
        G3N4Second => {
            let x = sc(&p.x, "x")?;
            let w1 = &si(int(p.p1, "p1")?) + &(&si(int(p.q1, "q1")?) * &x);
            let w2 = &si(int(p.p2, "p2")?) + &(&si(int(p.q2, "q2")?) * &x);
            let (b1, b2) = (sc(&p.beta, "beta")?, sc(&p.beta2, "beta2")?);
            if w1.is_one() {
                return Err(Error::Constraint("p1 + q1x ≠ 1".into()));
            }
            let mu12 = g3_second_mu12(&x, &w1, &w2, int(p.n, "n")?, int(p.m, "m")?);
            if p.mu12.as_ref().is_some_and(|g| !g.approx_eq(&mu12)) {
                return Err(Error::Constraint("μ12 disagrees with its formula".into()));
            }
            out.mu12 = Some(mu12.clone());
            let g = upper(w1.clone(), z(), z(), one(), z(), inv(&(&w1 * &b1.pow(3)), "w1β³")?)?;
            let mu = upper(w2.clone(), mu12, z(), one(), z(), inv(&(&w2 * &b2.pow(3)), "w2β2³")?)?;
            vec![g, mu]
        }
        G4N4 | G4N4Second | G4N4Third => {
            let pp = int(p.p, "p")?;
            let a = sc(&p.alpha, "alpha")?;
            let last = |s: i64, v: &Scalar| -> Result<Scalar> { inv(&(&si(s) * &(v * v)), "pα²") };
            let (g12, g13) = if tag == G4N4 { (free(&p.gamma12), free(&p.gamma13)) } else { (z(), z()) };
            let mut v = vec![upper(&si(pp) * &a, g12, g13, a.clone(), z(), last(pp, &a)?)?];
            if tag != G4N4 {
                let (qq, j) = (int(p.q, "q")?, int(p.j, "j")?);
                let b = sc(&p.beta, "beta")?;
                let m12 = &b * &Scalar::ratio(j * pp * qq, 1 - pp);
                v.push(upper(&si(qq) * &b, m12, free(&p.mu13), b.clone(), z(), last(qq, &b)?)?);
            }
            if tag == G4N4Third {
                let (r, k) = (int(p.r, "r")?, int(p.k, "k")?);
                let d = sc(&p.delta, "delta")?;
                let e13 = g4_eta13(p)?;
                if p.eta13.as_ref().is_some_and(|g| !g.approx_eq(&e13)) {
                    return Err(Error::Constraint("η13 disagrees with its formula".into()));
                }
                out.eta13 = Some(e13.clone());
                let e12 = &d * &Scalar::ratio(k * pp * r, 1 - pp);
                v.push(upper(&si(r) * &d, e12, e13, d.clone(), z(), last(r, &d)?)?);
            }
            v
        }
        G5N3 => {
            let pp = int(p.p, "p")?;
            vec![upper(si(pp), free(&p.gamma12), free(&p.gamma13), one(), free(&p.gamma23), one())?]
        }
        G5N4 | G5N4Second => {
            let a = sc(&p.alpha, "alpha")?;
            let pp = int(p.p, "p")?;
            let ai = inv(&a, "α")?;
            let (g12, g13, g23) =
                if tag == G5N4 { (free(&p.gamma12), free(&p.gamma13), free(&p.gamma23)) } else { (z(), z(), z()) };
            let mut v = vec![upper(a.clone(), g12, g13, &si(pp) * &(&ai * &ai), g23, &a / &si(pp))?];
            if tag == G5N4Second {
                let b = sc(&p.beta, "beta")?;
                let (qq, j) = (int(p.q, "q")?, int(p.j, "j")?);
                let bi = inv(&b, "β")?;
                let m13 = &b * &Scalar::ratio(j * pp, 1 - pp);
                v.push(upper(b.clone(), z(), m13, &si(qq) * &(&bi * &bi), z(), &b / &si(qq))?);
            }
            v
        }
        Inoue => return Err(Error::Invalid("the Inoue family is built from an integer matrix".into())),
    };
    Ok((gens, out))
}

fn core_param(tag: FamilyTag, p: &FamilyParams) -> Option<Scalar> {
    match tag.core() {
        Some(CoreForm::G2) => p.y.clone(),
        Some(CoreForm::G3) => p.x.clone(),
        _ => None,
    }
}

fn lox_failures(gens: &[ProjMatrix]) -> Vec<String> {
    let mut f = vec![];
    for (i, g) in gens.iter().enumerate() {
        match classify_element(g) {
            Ok(ElementClass::ComplexHomothetyIII(_)) => f.push(format!("generator {} is a type III complex homothety", i + 1)),
            Ok(c) if !c.is_loxodromic() => f.push(format!("generator {} is not loxodromic ({})", i + 1, c.name())),
            Ok(_) => {}
            Err(e) => f.push(format!("generator {}: {e}", i + 1)),
        }
    }
    f
}

pub fn construct(tag: FamilyTag, params: &FamilyParams) -> Result<Construction> {
    let (fails, mut notes) = check(tag, params)?;
    if let Some(first) = fails.first() {
        return Err(Error::Constraint(first.clone()));
    }
    let (lox, used) = build(tag, params)?;
    if let Some(first) = lox_failures(&lox).first() {
        return Err(Error::Constraint(first.clone()));
    }
    let core = tag.core().unwrap();
    let cp = core_param(tag, params);
    let mut group = GroupPresentation::default();
    let core_labels = ["g_a", "g_b"];
    for (i, g) in core.generators(cp.as_ref()).into_iter().enumerate() {
        group.push(core_labels[i], g);
    }
    for (i, g) in lox.iter().enumerate() {
        group.push(["γ", "μ", "η"][i], g.clone());
    }
    if tag == FamilyTag::G1N3Second {
        notes.push("γ is taken with γ12 = γ13 = 0".into());
    }
    Ok(Construction { family: tag, core, core_param: cp, loxodromic: lox, group, params: used, notes })
}

fn ratio(a: &Scalar, b: &Scalar) -> std::result::Result<Scalar, String> {
    b.inv().map(|bi| a * &bi).map_err(|_| "division by a zero entry".to_string())
}

fn to_int(s: &Scalar, what: &str) -> std::result::Result<i64, String> {
    s.as_i64().ok_or_else(|| format!("{what} ∈ ℤ (got {s})"))
}

/// Parameters read off the normalized generator, using `ctx` for the
/// parameters of the earlier generators and the core.
fn extract(tag: FamilyTag, g: &ProjMatrix, ctx: &FamilyParams) -> std::result::Result<FamilyParams, String> {
    use FamilyTag::*;
    if !g.is_upper_triangular() {
        return Err("requires upper triangular".into());
    }
    let e = |i: usize, j: usize| g.get(i, j).clone();
    let mut p = ctx.clone();
    let need = |v: &Option<Scalar>, n: &str| v.clone().ok_or_else(|| format!("context needs {n}"));
    let needi = |v: Option<i64>, n: &str| v.ok_or_else(|| format!("context needs {n}"));
    match tag {
        G1N3 | G5N3 => {
            let pp = to_int(&e(0, 0), "p")?;
            if [-1, 0, 1].contains(&pp) {
                return Err("p ∈ ℤ∖{-1,0,1}".into());
            }
            p.p = Some(pp);
            if tag == G1N3 {
                p.q = Some(to_int(&(&e(1, 2) * &si(pp)), "q")?);
            } else {
                p.gamma23 = Some(e(1, 2));
            }
            p.gamma12 = Some(e(0, 1));
            p.gamma13 = Some(e(0, 2));
        }
        G1N3Second => {
            let (p1, q1) = (needi(ctx.p1, "p1")?, needi(ctx.q1, "q1")?);
            let p2 = to_int(&e(0, 0), "p2")?;
            let q2 = to_int(&(&e(1, 2) * &si(p2)), "q2")?;
            let den = g1_second_den(p1, q1, p2, q2);
            if den == 0 || p1 == 1 || p1 == 0 || p2 == 0 {
                return Err("p1·q2 + p2·q1 ≠ 0".into());
            }
            let (mu12, mu13) = (e(0, 1), e(0, 2));
            let s = &(&(-&mu12) * &si((1 - p1) * den)) / &si(p1 * p2);
            let t = &(&mu13 * &si((1 - p1) * (1 - p1) * den)) / &si(p2);
            let jv = &(&t - &(&s * &si(q1))) / &si(p1 * (p1 - 1) * den);
            let j = to_int(&jv, "j")?;
            let m = to_int(&(&s - &si(j * p1 * p2)), "m")?;
            p.p2 = Some(p2);
            p.q2 = Some(q2);
            p.j = Some(j);
            p.m = Some(m);
            p.mu12 = Some(mu12);
            p.mu13 = Some(mu13);
        }
        G1N4 => {
            let pv = ratio(&e(0, 0), &e(1, 1))?;
            let pp = to_int(&pv, "p")?;
            p.p = Some(pp);
            p.q = Some(to_int(&e(0, 0), "q")?);
            p.r = Some(to_int(&(&e(1, 2) * &si(pp)), "r")?);
            p.gamma12 = Some(&e(0, 1) * &si(pp));
            p.gamma13 = Some(&e(0, 2) * &si(pp));
        }
        G2N3 | G2N4 => {
            let y = need(&ctx.y, "y")?;
            if y.is_real() {
                return Err("y ∉ ℝ".into());
            }
            let zz = e(0, 0);
            let (a, b) = z_span_coords(&zz, &y);
            p.p = Some(to_int(&a, "p")?);
            p.q = Some(to_int(&b, "q")?);
            p.z = Some(zz.clone());
            if tag == G2N3 {
                p.gamma12 = Some(e(0, 1));
                p.gamma13 = Some(e(0, 2));
                p.gamma23 = Some(e(1, 2));
            } else {
                let a3 = ratio(&(&zz * &zz), &e(1, 1))?;
                let a = a3.cbrt();
                let s = ratio(&a, &zz)?;
                p.alpha = Some(a);
                p.gamma12 = Some(&e(0, 1) * &s);
                p.gamma13 = Some(&e(0, 2) * &s);
                p.gamma23 = Some(&e(1, 2) * &s);
            }
        }
        G3N4 | G3N4Second => {
            let x = need(&ctx.x, "x")?;
            if x.is_real() {
                return Err("x ∉ ℝ".into());
            }
            // normalized by (3,3): diag(w²β³, wβ³, 1)
            let w = ratio(&e(0, 0), &e(1, 1))?;
            let (a, b) = z_span_coords(&w, &x);
            let (pp, qq) = (to_int(&a, "p")?, to_int(&b, "q")?);
            let beta = ratio(&e(1, 1), &w)?.cbrt();
            let g22 = e(1, 1);
            if tag == G3N4 {
                p.p = Some(pp);
                p.q = Some(qq);
                p.beta = Some(beta);
                p.gamma12 = Some(ratio(&e(0, 1), &g22)?);
                p.gamma13 = Some(ratio(&e(0, 2), &g22)?);
            } else {
                let w1 = &si(needi(ctx.p1, "p1")?) + &(&si(needi(ctx.q1, "q1")?) * &x);
                p.p2 = Some(pp);
                p.q2 = Some(qq);
                p.beta2 = Some(beta);
                let mu12 = ratio(&e(0, 1), &g22)?;
                let nm = &(&mu12 * &(&Scalar::one() - &w1)) + &(&(&x + &Scalar::one()) * &w);
                let (nv, mv) = z_span_coords(&nm, &x);
                p.n = Some(to_int(&nv, "n")?);
                p.m = Some(to_int(&mv, "m")?);
                p.mu12 = Some(mu12);
            }
        }
        G4N4 | G4N4Second | G4N4Third => {
            let pv = ratio(&e(0, 0), &e(1, 1))?;
            let s = to_int(&pv, if tag == G4N4 { "p" } else if tag == G4N4Second { "q" } else { "r" })?;
            if s == 0 {
                return Err("leading ratio must be nonzero".into());
            }
            let c3 = &e(1, 1) / &si(s);
            let c = c3.cbrt();
            let c2 = &c * &c;
            let lead = &(&si(s) * &c2) * &Scalar::one();
            match tag {
                G4N4 => {
                    p.p = Some(s);
                    p.alpha = Some(c);
                    p.gamma12 = Some(&e(0, 1) / &lead);
                    p.gamma13 = Some(&e(0, 2) / &lead);
                }
                G4N4Second => {
                    let pp = needi(ctx.p, "p")?;
                    if pp == 0 {
                        return Err("p ≠ 0".into());
                    }
                    let jv = &(&e(0, 1) * &si(1 - pp)) / &(&si(pp * s) * &e(1, 1));
                    p.q = Some(s);
                    p.beta = Some(c);
                    p.j = Some(to_int(&jv, "j")?);
                    p.mu13 = Some(&e(0, 2) / &lead);
                }
                _ => {
                    let pp = needi(ctx.p, "p")?;
                    if pp == 0 {
                        return Err("p ≠ 0".into());
                    }
                    let kv = &(&e(0, 1) * &si(1 - pp)) / &(&si(pp * s) * &e(1, 1));
                    p.r = Some(s);
                    p.delta = Some(c);
                    p.k = Some(to_int(&kv, "k")?);
                    p.eta13 = Some(&e(0, 2) / &lead);
                }
            }
        }
        G5N4 | G5N4Second => {
            let lead = to_int(&e(0, 0), if tag == G5N4 { "p" } else { "q" })?;
            let c3 = ratio(&si(lead * lead), &e(1, 1))?;
            let c = c3.cbrt();
            let s = ratio(&c, &si(lead))?;
            if tag == G5N4 {
                p.p = Some(lead);
                p.alpha = Some(c);
                p.gamma12 = Some(&e(0, 1) * &s);
                p.gamma13 = Some(&e(0, 2) * &s);
                p.gamma23 = Some(&e(1, 2) * &s);
            } else {
                let pp = needi(ctx.p, "p")?;
                if pp == 0 {
                    return Err("p ≠ 0".into());
                }
                let jv = &(&e(0, 2) * &si(1 - pp)) / &si(pp * lead);
                p.q = Some(lead);
                p.beta = Some(c);
                p.j = Some(to_int(&jv, "j")?);
            }
        }
        Inoue => return Err("the Inoue family is validated by its relations".into()),
    }
    Ok(p)
}

/// Reads the family's own generator off `g` and checks every constraint.
/// `context` carries the earlier generators' and the core's parameters.
pub fn validate(tag: FamilyTag, g: &ProjMatrix, context: &FamilyParams) -> Validation {
    let mut v = Validation::default();
    let params = match extract(tag, g, context) {
        Ok(p) => p,
        Err(d) => {
            v.diagnostics.push(d);
            return v;
        }
    };
    match check(tag, &params) {
        Ok((fails, notes)) => {
            v.diagnostics.extend(fails);
            v.notes.extend(notes);
        }
        Err(e) => v.diagnostics.push(e.to_string()),
    }
    if v.diagnostics.is_empty() {
        match build(tag, &params) {
            Ok((gens, full)) => {
                if !proj_eq(gens.last().unwrap(), g) {
                    v.diagnostics.push("matrix does not have the family's shape".into());
                }
                v.diagnostics.extend(lox_failures(std::slice::from_ref(gens.last().unwrap())));
                if v.diagnostics.is_empty() {
                    v.params = Some(full);
                }
            }
            Err(e) => v.diagnostics.push(e.to_string()),
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proj::commutator;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }
    fn rows(r: [[&str; 3]; 3]) -> ProjMatrix {
        ProjMatrix::new(r.map(|row| row.map(s))).unwrap()
    }

    #[test]
    fn listed_constructions() {
        let c = construct(FamilyTag::G1N3, &FamilyParams { p: Some(2), q: Some(3), ..Default::default() }).unwrap();
        assert!(proj_eq(c.generator(), &rows([["2", "0", "0"], ["0", "1", "3/2"], ["0", "0", "1"]])));
        let c = construct(FamilyTag::G1N4, &FamilyTag::G1N4.default_params()).unwrap();
        assert!(proj_eq(c.generator(), &rows([["6", "0", "0"], ["0", "3", "1"], ["0", "0", "2"]])));
        let p = FamilyParams { p1: Some(2), q1: Some(1), p2: Some(2), q2: Some(1), j: Some(3), m: Some(6), ..Default::default() };
        let c = construct(FamilyTag::G1N3Second, &p).unwrap();
        assert_eq!((c.params.mu12.clone().unwrap(), c.params.mu13.clone().unwrap()), (s("18"), s("21")));
        assert!(proj_eq(c.generator(), &rows([["2", "18", "21"], ["0", "1", "1/2"], ["0", "0", "1"]])));
        let p = FamilyParams { alpha: s("2").into(), p: Some(2), beta: Some(s("1")), q: Some(3), j: Some(1), ..Default::default() };
        let c = construct(FamilyTag::G5N4Second, &p).unwrap();
        assert!(proj_eq(c.generator(), &rows([["1", "0", "-2"], ["0", "3", "0"], ["0", "0", "1/3"]])));
        let c = construct(FamilyTag::G2N3, &FamilyTag::G2N3.default_params()).unwrap();
        assert!(proj_eq(c.generator(), &rows([["1+1i", "0", "0"], ["0", "1", "1"], ["0", "0", "1"]])));
    }

    #[test]
    fn listed_validations() {
        let g = ProjMatrix::new([
            [Scalar::float(2.0, 0.0), Scalar::float(0.5, 0.0), Scalar::float(1.3, 0.0)],
            [Scalar::zero(), Scalar::float(1.0, 0.0), Scalar::float(1.5, 0.0)],
            [Scalar::zero(), Scalar::zero(), Scalar::float(1.0, 0.0)],
        ])
        .unwrap();
        let v = validate(FamilyTag::G1N3, &g, &FamilyParams::default());
        let p = v.params.expect("valid");
        assert_eq!((p.p, p.q), (Some(2), Some(3)));
        let bad = rows([["1", "0", "0"], ["0", "1", "3/2"], ["0", "0", "1"]]);
        let v = validate(FamilyTag::G1N3, &bad, &FamilyParams::default());
        assert!(v.params.is_none());
        assert!(v.diagnostics.iter().any(|d| d.contains("p ∈ ℤ∖{-1,0,1}")), "{:?}", v.diagnostics);
        let mut f = vec![];
        pair_conditions(&mut f, 1, 1, &Scalar::i(), "x");
        assert!(f.is_empty());
    }

    #[test]
    fn defaults_round_trip() {
        for tag in FamilyTag::ALL.into_iter().filter(|t| *t != FamilyTag::Inoue) {
            let params = tag.default_params();
            let c = construct(tag, &params).unwrap_or_else(|e| panic!("{}: {e}", tag.name()));
            let v = validate(tag, c.generator(), &params);
            let got = v.params.unwrap_or_else(|| panic!("{}: {:?}", tag.name(), v.diagnostics));
            assert_eq!(got.integer_fields(), c.params.integer_fields(), "{}", tag.name());
            let (again, _) = build(tag, &got).unwrap();
            assert!(proj_eq(again.last().unwrap(), c.generator()), "{}", tag.name());
        }
    }

    #[test]
    fn both_jm_searches() {
        assert!(g1_second_printed(2, 1, 2, 1, 3, 6));
        let (j, m) = find_jm(2, 1, 3, 1).unwrap();
        assert!(g1_second_hard(2, 1, 3, 1, j, m));
    }

    #[test]
    fn commutators_land_in_core() {
        let c = construct(FamilyTag::G1N3Second, &FamilyTag::G1N3Second.default_params()).unwrap();
        let k = commutator(&c.loxodromic[1], &c.loxodromic[0]);
        let crate::proj::ShapeTag::CoreShape(x, y) = crate::proj::shape_of(&k) else { panic!("{k:?}") };
        assert!(x.is_integer() && y.is_integer());
    }

    #[test]
    fn violations_named() {
        let p = FamilyParams { alpha: Some(s("4")), p: Some(8), ..Default::default() };
        let e = construct(FamilyTag::G5N4, &p).unwrap_err();
        assert_eq!(e, Error::Constraint("p² ≠ α³".into()));
        let e = construct(FamilyTag::G1N3, &FamilyParams { p: Some(2), ..Default::default() }).unwrap_err();
        assert_eq!(e, Error::Constraint("missing parameter q".into()));
    }
}
