//! Normal forms of purely parabolic groups and the reduction of rank ≤ 2
//! Core-shaped groups to Γ1…Γ5.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::classify::{classify_element, TopLevel};
use crate::error::{Error, Result};
use crate::lattice::{complex_to_r2, pair_to_r4, reduce, Discreteness, Lattice};
use crate::proj::{conjugate, is_unipotent, shape_of, ProjMatrix, ShapeTag};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum ParabolicForm {
    FormWMu { w: Lattice, mu_values: Vec<Scalar> },
    FormW { w: Lattice },
    FormRLW { r: Lattice, l_values: Vec<Scalar>, w: Lattice },
    FormWStar { w: Lattice },
    FormNonComm5 { x: Scalar, y: Scalar, p: BigInt, q: BigInt, r: BigInt },
    FormNonComm6 { w: Lattice, a: Scalar, b: Scalar, c: Scalar },
}

impl ParabolicForm {
    pub fn name(&self) -> &'static str {
        match self {
            ParabolicForm::FormWMu { .. } => "FormWMu",
            ParabolicForm::FormW { .. } => "FormW",
            ParabolicForm::FormRLW { .. } => "FormRLW",
            ParabolicForm::FormWStar { .. } => "FormWStar",
            ParabolicForm::FormNonComm5 { .. } => "FormNonComm5",
            ParabolicForm::FormNonComm6 { .. } => "FormNonComm6",
        }
    }

    /// Index 1–6 of the form in the list of parabolic normal forms.
    pub fn index(&self) -> u8 {
        match self {
            ParabolicForm::FormWMu { .. } => 1,
            ParabolicForm::FormW { .. } => 2,
            ParabolicForm::FormRLW { .. } => 3,
            ParabolicForm::FormWStar { .. } => 4,
            ParabolicForm::FormNonComm5 { .. } => 5,
            ParabolicForm::FormNonComm6 { .. } => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recognition {
    pub form: ParabolicForm,
    /// Conditions of the form that were not checked.
    pub unverified: Vec<String>,
}

fn require_discrete(lat: &Lattice, what: &str) -> Result<()> {
    match lat.discrete {
        Discreteness::Discrete => Ok(()),
        Discreteness::NonDiscrete => Err(Error::Constraint(format!("{what} is not discrete"))),
        Discreteness::Unknown => Err(Error::Constraint(format!("discreteness of {what} undecided"))),
    }
}

fn core_xy(g: &ProjMatrix) -> Option<(Scalar, Scalar)> {
    match shape_of(g) {
        ShapeTag::CoreShape(x, y) => Some((x, y)),
        _ => None,
    }
}

pub fn recognize_form(gens: &[ProjMatrix]) -> Result<Recognition> {
    if gens.len() > 4 {
        return Err(Error::TooManyGenerators { got: gens.len(), max: 4 });
    }
    for g in gens {
        let c = classify_element(g)?;
        if c.top_level() == TopLevel::Loxodromic {
            return Err(Error::Invalid(format!("loxodromic generator {g:?}")));
        }
    }
    let gens: Vec<&ProjMatrix> = gens.iter().filter(|g| !g.is_identity()).collect();
    let shapes: Vec<ShapeTag> = gens.iter().map(|g| shape_of(g)).collect();

    if shapes.iter().all(|s| matches!(s, ShapeTag::CoreShape(..))) {
        let pts: Vec<Vec<Scalar>> = gens.iter().map(|g| {
            let (x, y) = core_xy(g).unwrap();
            pair_to_r4(&x, &y)
        }).collect();
        let w = if pts.is_empty() { Lattice::empty(4) } else { reduce(&pts)? };
        require_discrete(&w, "W")?;
        if w.rank > 2 {
            return Err(Error::Constraint(format!("rank(W) = {} exceeds 2", w.rank)));
        }
        return Ok(Recognition { form: ParabolicForm::FormWStar { w }, unverified: vec![] });
    }

    let translation_like = |g: &&ProjMatrix| is_unipotent(g) && g.entry_is_zero(0, 1);
    if gens.iter().all(translation_like) {
        let pts: Vec<Vec<Scalar>> = gens.iter().map(|g| pair_to_r4(g.get(0, 2), g.get(1, 2))).collect();
        let w = reduce(&pts)?;
        return Ok(Recognition { form: ParabolicForm::FormW { w }, unverified: vec![] });
    }

    if let Some(r) = match_wmu(&gens)? {
        return Ok(r);
    }
    if let Some(r) = match_rlw(&gens)? {
        return Ok(r);
    }
    if let Some(r) = match_noncomm(&gens)? {
        return Ok(r);
    }
    Err(Error::Unrecognized("no parabolic normal form matches the generators".into()))
}

/// [[μ, wμ, 0],[0, μ, 0],[0, 0, μ⁻²]]: after scaling (3,3) to 1 the diagonal is (μ³, μ³, 1).
fn match_wmu(gens: &[&ProjMatrix]) -> Result<Option<Recognition>> {
    let mut ws = vec![];
    let mut mus = vec![];
    for g in gens {
        let m = g.rows();
        let ok = g.is_upper_triangular()
            && m[0][0].approx_eq(&m[1][1])
            && g.entry_is_zero(0, 2)
            && g.entry_is_zero(1, 2);
        if !ok {
            return Ok(None);
        }
        ws.push(&m[0][1] / &m[0][0]);
        mus.push(m[0][0].cbrt());
    }
    let pts: Vec<Vec<Scalar>> = ws.iter().map(complex_to_r2).collect();
    let w = reduce(&pts)?;
    require_discrete(&w, "W")?;
    Ok(Some(Recognition { form: ParabolicForm::FormWMu { w, mu_values: mus }, unverified: vec![] }))
}

/// [[1, x, L(x)+x²/2+w],[0, 1, x],[0, 0, 1]].
fn match_rlw(gens: &[&ProjMatrix]) -> Result<Option<Recognition>> {
    let mut xs = vec![];
    let mut ls = vec![];
    let mut ws = vec![];
    for g in gens {
        if !is_unipotent(g) {
            return Ok(None);
        }
        let m = g.rows();
        if !m[0][1].approx_eq(&m[1][2]) {
            return Ok(None);
        }
        let x = m[0][1].clone();
        if x.is_zero_at(g.scale()) {
            ws.push(m[0][2].clone());
        } else {
            let half = Scalar::ratio(1, 2);
            ls.push(&m[0][2] - &(&half * &(&x * &x)));
            xs.push(x);
        }
    }
    if xs.is_empty() {
        return Ok(None);
    }
    let r = reduce(&xs.iter().map(complex_to_r2).collect::<Vec<_>>())?;
    let w = if ws.is_empty() { Lattice::empty(2) } else { reduce(&ws.iter().map(complex_to_r2).collect::<Vec<_>>())? };
    require_discrete(&w, "W")?;
    if w.rank + r.rank > 4 {
        return Err(Error::Constraint("rank(W) + rank(R) exceeds 4".into()));
    }
    let mut unverified = vec![];
    if !r.is_discrete() {
        if w.rank > 1 {
            return Err(Error::Constraint("rank(W) exceeds 1 with R not discrete".into()));
        }
        unverified.push("divergence of L(x_n)+w_n for x_n → 0".to_string());
    }
    if r.rank < xs.len() {
        unverified.push("additivity of L on dependent generators of R".to_string());
    }
    Ok(Some(Recognition { form: ParabolicForm::FormRLW { r, l_values: ls, w }, unverified }))
}

fn match_noncomm(gens: &[&ProjMatrix]) -> Result<Option<Recognition>> {
    if gens.len() != 3 {
        return Ok(None);
    }
    let cores: Vec<(Scalar, Scalar)> = gens.iter().filter_map(|g| core_xy(g)).collect();
    let layer2: Vec<&&ProjMatrix> = gens.iter().filter(|g| shape_of(g) == ShapeTag::TriangularLayer2).collect();
    if cores.len() != 2 || layer2.len() != 1 {
        return Ok(None);
    }
    let t = layer2[0].rows();
    let has = |x: i64, y: i64| cores.iter().any(|(a, b)| a.approx_eq(&Scalar::int(x)) && b.approx_eq(&Scalar::int(y)));
    let g10 = has(1, 0);
    if g10 && has(0, 1) {
        let c = t[1][2].clone();
        let a = &t[0][1] - &c;
        let b = t[0][2].clone();
        if a.is_zero() {
            return Err(Error::Constraint("a must be a nonzero element of W".into()));
        }
        if c.is_real() {
            let one_c = reduce(&[vec![Scalar::one(), Scalar::zero()], vec![c.re(), Scalar::zero()]])?;
            if one_c.rank < 2 {
                return Err(Error::Constraint("{1, c} is Z-linearly dependent".into()));
            }
        }
        let w = reduce(&[complex_to_r2(&a)])?;
        return Ok(Some(Recognition { form: ParabolicForm::FormNonComm6 { w, a, b, c }, unverified: vec![] }));
    }
    if g10 && t[1][2].is_one() {
        let (c, d) = cores.iter().find(|(a, b)| !(a.is_one() && b.is_zero())).cloned().unwrap_or_else(|| cores[1].clone());
        let cq = c.as_rational().ok_or_else(|| Error::Constraint("c = p/q must be rational".into()))?;
        if d.is_zero() {
            return Err(Error::Constraint("d = 1/r must be nonzero".into()));
        }
        let r = d.inv()?.as_integer().ok_or_else(|| Error::Constraint("d = 1/r with r an integer".into()))?;
        let (p, q) = (cq.numer().clone(), cq.denom().clone());
        if !p.gcd(&q).abs().eq(&BigInt::from(1)) && !p.is_zero() {
            return Err(Error::Constraint("p, q must be coprime".into()));
        }
        if !(&r % (&q * &q)).is_zero() {
            return Err(Error::Constraint("q² must divide r".into()));
        }
        let (x, y) = (t[0][1].clone(), t[0][2].clone());
        return Ok(Some(Recognition { form: ParabolicForm::FormNonComm5 { x, y, p, q, r }, unverified: vec![] }));
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoreForm {
    G1,
    G2,
    G3,
    G4,
    G5,
}

impl CoreForm {
    pub const ALL: [CoreForm; 5] = [CoreForm::G1, CoreForm::G2, CoreForm::G3, CoreForm::G4, CoreForm::G5];

    pub fn name(&self) -> &'static str {
        match self {
            CoreForm::G1 => "Γ1",
            CoreForm::G2 => "Γ2",
            CoreForm::G3 => "Γ3",
            CoreForm::G4 => "Γ4",
            CoreForm::G5 => "Γ5",
        }
    }

    pub fn ascii(&self) -> &'static str {
        match self {
            CoreForm::G1 => "G1",
            CoreForm::G2 => "G2",
            CoreForm::G3 => "G3",
            CoreForm::G4 => "G4",
            CoreForm::G5 => "G5",
        }
    }

    pub fn parse(s: &str) -> Option<CoreForm> {
        CoreForm::ALL.into_iter().find(|c| c.name() == s || c.ascii().eq_ignore_ascii_case(s))
    }

    pub fn rank(&self) -> usize {
        match self {
            CoreForm::G1 | CoreForm::G2 | CoreForm::G3 => 2,
            CoreForm::G4 | CoreForm::G5 => 1,
        }
    }

    /// The canonical generators; `param` is y for Γ2 and x for Γ3.
    pub fn generators(&self, param: Option<&Scalar>) -> Vec<ProjMatrix> {
        let p = || param.cloned().expect("Γ2/Γ3 need a parameter");
        match self {
            CoreForm::G1 => vec![ProjMatrix::core_i(1, 0), ProjMatrix::core_i(0, 1)],
            CoreForm::G2 => vec![ProjMatrix::core_i(0, 1), ProjMatrix::core(Scalar::zero(), p())],
            CoreForm::G3 => vec![ProjMatrix::core_i(1, 0), ProjMatrix::core(p(), Scalar::zero())],
            CoreForm::G4 => vec![ProjMatrix::core_i(1, 0)],
            CoreForm::G5 => vec![ProjMatrix::core_i(0, 1)],
        }
    }

    /// The core lattice in ℝ⁴ spanned by the canonical generators.
    pub fn lattice(&self, param: Option<&Scalar>) -> Lattice {
        let pts: Vec<Vec<Scalar>> = self.generators(param).iter().map(|g| {
            let (x, y) = core_xy(g).unwrap();
            pair_to_r4(&x, &y)
        }).collect();
        reduce(&pts).expect("canonical lattice")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalCoreGroup {
    pub tag: CoreForm,
    pub parameter: Option<Scalar>,
    pub conjugator: ProjMatrix,
    /// The generators the conjugator was computed from (a reduced basis when the input was redundant).
    pub sources: Vec<ProjMatrix>,
}

impl CanonicalCoreGroup {
    pub fn canonical_generators(&self) -> Vec<ProjMatrix> {
        self.tag.generators(self.parameter.as_ref())
    }
}

fn rows3(r: [[Scalar; 3]; 3]) -> Result<ProjMatrix> {
    ProjMatrix::new(r)
}

fn block(a: Scalar, b11: Scalar, b12: Scalar, b21: Scalar, b22: Scalar) -> Result<ProjMatrix> {
    let z = Scalar::zero;
    rows3([[a, z(), z()], [z(), b11, b12], [z(), b21, b22]])
}

pub fn canonicalize_core(gens: &[ProjMatrix]) -> Result<CanonicalCoreGroup> {
    if gens.is_empty() || gens.len() > 2 {
        return Err(Error::Invalid("canonicalize_core takes one or two generators".into()));
    }
    let mut pairs = vec![];
    for g in gens {
        pairs.push(core_xy(g).ok_or_else(|| Error::Invalid(format!("generator {g:?} is not CoreShape")))?);
    }
    let pts: Vec<Vec<Scalar>> = pairs.iter().map(|(x, y)| pair_to_r4(x, y)).collect();
    let lat = reduce(&pts)?;
    require_discrete(&lat, "the span of the generators")?;
    if lat.rank == 0 {
        return Err(Error::Invalid("generators are trivial".into()));
    }
    let exact = gens.iter().all(ProjMatrix::is_exact);
    let pairs: Vec<(Scalar, Scalar)> = if lat.rank == pairs.len() {
        pairs
    } else {
        lat.basis.iter().map(|v| (
            &v[0] + &(&v[1] * &Scalar::i()),
            &v[2] + &(&v[3] * &Scalar::i()),
        )).collect()
    };
    let sources: Vec<ProjMatrix> = pairs.iter().map(|(x, y)| ProjMatrix::core(x.clone(), y.clone())).collect();
    let zero_at = |s: &Scalar| s.is_zero_at(1.0);
    let (one, zero) = (Scalar::one, Scalar::zero);
    let out = |tag, parameter, conjugator| Ok(CanonicalCoreGroup { tag, parameter, conjugator, sources: sources.clone() });

    if pairs.len() == 1 {
        let (x, y) = &pairs[0];
        if !zero_at(x) {
            let a4 = if exact {
                block(one(), x.clone(), y.clone(), zero(), one())?
            } else {
                let s = x.sqrt();
                block(s.inv()?, s.clone(), y / &s, zero(), one())?
            };
            return out(CoreForm::G4, None, a4);
        }
        return out(CoreForm::G5, None, ProjMatrix::diag(one(), one(), y.clone())?);
    }
    let ((x1, y1), (x2, y2)) = (&pairs[0], &pairs[1]);
    let det = &(x1 * y2) - &(x2 * y1);
    if !zero_at(x1) && !zero_at(&det) {
        let a1 = if exact {
            block(one(), x1.clone(), y1.clone(), x2.clone(), y2.clone())?
        } else {
            let s = x1.sqrt();
            block(s.inv()?, s.clone(), y1 / &s, x2 / &s, y2 / &s)?
        };
        return out(CoreForm::G1, None, a1);
    }
    if zero_at(x1) && !zero_at(x2) {
        let a = if exact {
            block(one(), x2.clone(), y2.clone(), zero(), y1.clone())?
        } else {
            let s = x2.sqrt();
            block(s.inv()?, s.clone(), y2 / &s, zero(), y1 / &s)?
        };
        return out(CoreForm::G1, None, a);
    }
    if zero_at(x1) && zero_at(x2) {
        let y = y2 / y1;
        if y.is_real() {
            return Err(Error::Constraint("y = y2/y1 is real, so W is not discrete".into()));
        }
        return out(CoreForm::G2, Some(y), ProjMatrix::diag(one(), one(), y1.clone())?);
    }
    let x = x2 / x1;
    if x.is_real() {
        return Err(Error::Constraint("x = x2/x1 is real, so W is not discrete".into()));
    }
    let a3 = if exact {
        block(one(), x1.clone(), y1.clone(), zero(), one())?
    } else {
        let s = x1.sqrt();
        block(s.inv()?, s.clone(), y1 / &s, zero(), one())?
    };
    out(CoreForm::G3, Some(x), a3)
}

/// Conjugate the generators the canonicalization was computed from.
pub fn apply_conjugator(c: &CanonicalCoreGroup) -> Vec<ProjMatrix> {
    c.sources.iter().map(|g| conjugate(&c.conjugator, g)).collect()
}

/// Whether the conjugated generators are the canonical ones (as a set).
pub fn canonical_check(c: &CanonicalCoreGroup) -> bool {
    let images = apply_conjugator(c);
    let canon = c.canonical_generators();
    images.len() == canon.len()
        && images.iter().all(|g| canon.iter().any(|h| crate::proj::proj_eq(g, h)))
        && canon.iter().all(|h| images.iter().any(|g| crate::proj::proj_eq(g, h)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }
    fn g(x: &str, y: &str) -> ProjMatrix {
        ProjMatrix::core(s(x), s(y))
    }

    #[test]
    fn canonical_examples() {
        let c = canonicalize_core(&[g("1", "0"), g("0", "1")]).unwrap();
        assert_eq!(c.tag, CoreForm::G1);
        assert!(c.conjugator.is_identity());

        let c = canonicalize_core(&[g("4", "0"), g("0", "2")]).unwrap();
        assert_eq!(c.tag, CoreForm::G1);
        let expect = ProjMatrix::new([[s("1/2"), s("0"), s("0")], [s("0"), s("2"), s("0")], [s("0"), s("0"), s("1")]]).unwrap();
        assert!(crate::proj::proj_eq(&c.conjugator, &expect));
        assert_eq!(apply_conjugator(&c), vec![ProjMatrix::core_i(1, 0), ProjMatrix::core_i(0, 1)]);

        let c = canonicalize_core(&[g("0", "2"), g("0", "2i")]).unwrap();
        assert_eq!((c.tag, c.parameter.clone()), (CoreForm::G2, Some(Scalar::i())));
        assert_eq!(c.conjugator, ProjMatrix::diag(s("1"), s("1"), s("2")).unwrap());
        assert!(canonical_check(&c));

        let c = canonicalize_core(&[g("3", "0")]).unwrap();
        assert_eq!(c.tag, CoreForm::G4);
        assert_eq!(apply_conjugator(&c), vec![ProjMatrix::core_i(1, 0)]);
    }

    #[test]
    fn branch_errors() {
        assert!(canonicalize_core(&[g("0", "1"), g("0", "2")]).unwrap().tag == CoreForm::G5);
        assert!(canonicalize_core(&[g("1", "0"), g("1/2", "0")]).unwrap().tag == CoreForm::G4);
        let s2 = Scalar::float(2f64.sqrt(), 0.0);
        assert!(canonicalize_core(&[g("0", "1"), ProjMatrix::core(Scalar::zero(), s2)]).is_err());
        assert!(canonicalize_core(&[ProjMatrix::translation_i(0, 1)]).is_err());
    }

    #[test]
    fn order_independent() {
        let a = g("2", "1+i");
        let b = g("0", "3");
        assert_eq!(canonicalize_core(&[a.clone(), b.clone()]).unwrap().tag, canonicalize_core(&[b, a]).unwrap().tag);
    }

    #[test]
    fn float_branch_uses_square_roots() {
        let c = canonicalize_core(&[g("2", "1").to_float(), g("1", "3").to_float()]).unwrap();
        assert_eq!(c.tag, CoreForm::G1);
        assert!(canonical_check(&c));
    }

    #[test]
    fn forms() {
        let r = recognize_form(&[g("1", "0"), g("0", "1")]).unwrap();
        assert!(matches!(&r.form, ParabolicForm::FormWStar { w } if w.rank == 2));
        let r = recognize_form(&[ProjMatrix::translation_i(1, 0), ProjMatrix::translation_i(0, 1)]).unwrap();
        assert!(matches!(&r.form, ParabolicForm::FormW { w } if w.rank == 2));
        let third = ProjMatrix::new([[s("1"), s("1+i"), s("0")], [s("0"), s("1"), s("i")], [s("0"), s("0"), s("1")]]).unwrap();
        let r = recognize_form(&[g("1", "0"), g("0", "1"), third]).unwrap();
        match r.form {
            ParabolicForm::FormNonComm6 { w, a, b, c } => {
                assert_eq!((a, b, c), (Scalar::one(), Scalar::zero(), Scalar::i()));
                assert_eq!(w.rank, 1);
            }
            f => panic!("{f:?}"),
        }
    }

    #[test]
    fn noncomm_rejections() {
        let bad6 = ProjMatrix::new([[s("1"), s("3"), s("0")], [s("0"), s("1"), s("2")], [s("0"), s("0"), s("1")]]).unwrap();
        assert!(recognize_form(&[g("1", "0"), g("0", "1"), bad6]).is_err());
        let t5 = ProjMatrix::new([[s("1"), s("i"), s("2")], [s("0"), s("1"), s("1")], [s("0"), s("0"), s("1")]]).unwrap();
        let ok = recognize_form(&[g("1", "0"), g("1/2", "1/4"), t5.clone()]).unwrap();
        assert!(matches!(ok.form, ParabolicForm::FormNonComm5 { .. }));
        assert!(recognize_form(&[g("1", "0"), g("1/2", "1/2"), t5]).is_err());
    }

    #[test]
    fn rlw_and_wmu() {
        let u = ProjMatrix::new([[s("1"), s("2"), s("5")], [s("0"), s("1"), s("2")], [s("0"), s("0"), s("1")]]).unwrap();
        let r = recognize_form(&[u, g("0", "i")]).unwrap();
        match r.form {
            ParabolicForm::FormRLW { l_values, .. } => assert_eq!(l_values, vec![Scalar::int(3)]),
            f => panic!("{f:?}"),
        }
        let m = ProjMatrix::new([[s("i"), s("i"), s("0")], [s("0"), s("i"), s("0")], [s("0"), s("0"), s("1")]]).unwrap();
        let r = recognize_form(&[m]).unwrap();
        assert!(matches!(r.form, ParabolicForm::FormWMu { .. }));
        assert!(recognize_form(&[ProjMatrix::diag(s("2"), s("1"), s("1")).unwrap()]).is_err());
    }
}
