//! 3×3 matrices up to nonzero scalars.

use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tol};

pub type Rows = [[Scalar; 3]; 3];

/// An element of PSL(3,ℂ), stored as its normalized representative.
///
/// Triangular matrices are scaled so the (3,3) entry is 1; anything else so
/// that its largest-modulus entry (first in row-major order) is 1.
#[derive(Clone, PartialEq)]
pub struct ProjMatrix {
    m: Rows,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeTag {
    Diagonal,
    CoreShape(Scalar, Scalar),
    TranslationShape(Scalar, Scalar),
    TriangularLayer2,
    TriangularLayer3,
    TriangularLayer4,
    NotUpperTriangular,
}

impl ShapeTag {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeTag::Diagonal => "Diagonal",
            ShapeTag::CoreShape(..) => "CoreShape",
            ShapeTag::TranslationShape(..) => "TranslationShape",
            ShapeTag::TriangularLayer2 => "TriangularLayer2",
            ShapeTag::TriangularLayer3 => "TriangularLayer3",
            ShapeTag::TriangularLayer4 => "TriangularLayer4",
            ShapeTag::NotUpperTriangular => "NotUpperTriangular",
        }
    }
}

/// Hashable identity of a projective class: exact entries, or float entries
/// quantized on a 1e-7 grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatKey {
    Exact(Vec<BigRational>),
    Float(Vec<i64>),
}

fn mul_rows(a: &Rows, b: &Rows) -> Rows {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| &(&(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j])) + &(&a[i][2] * &b[2][j]))
    })
}

fn det_rows(m: &Rows) -> Scalar {
    let t1 = &m[0][0] * &(&(&m[1][1] * &m[2][2]) - &(&m[1][2] * &m[2][1]));
    let t2 = &m[0][1] * &(&(&m[1][0] * &m[2][2]) - &(&m[1][2] * &m[2][0]));
    let t3 = &m[0][2] * &(&(&m[1][0] * &m[2][1]) - &(&m[1][1] * &m[2][0]));
    &(&t1 - &t2) + &t3
}

fn adjugate(m: &Rows) -> Rows {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| &(&m[r0][c0] * &m[r1][c1]) - &(&m[r0][c1] * &m[r1][c0]);
    [
        [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
        [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
        [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
    ]
}

fn max_modulus(m: &Rows) -> f64 {
    m.iter().flatten().map(Scalar::modulus).fold(0.0, f64::max)
}

fn any_float(m: &Rows) -> bool {
    m.iter().flatten().any(|s| !s.is_exact())
}

fn lower_zero(m: &Rows, scale: f64) -> bool {
    m[1][0].is_zero_at(scale) && m[2][0].is_zero_at(scale) && m[2][1].is_zero_at(scale)
}

fn normalize(mut m: Rows) -> Result<Rows> {
    if any_float(&m) {
        for s in m.iter_mut().flatten() {
            *s = s.to_float();
        }
    }
    let scale = max_modulus(&m);
    if scale == 0.0 {
        return Err(Error::NotInvertible);
    }
    let exact_triangular = !any_float(&m) && m[1][0].is_zero() && m[2][0].is_zero() && m[2][1].is_zero();
    let singular = if exact_triangular {
        (0..3).any(|i| m[i][i].is_zero())
    } else {
        det_rows(&m).is_zero_at(scale * scale * scale)
    };
    if singular {
        return Err(Error::NotInvertible);
    }
    let pivot = if exact_triangular || lower_zero(&m, scale) {
        m[2][2].clone()
    } else if any_float(&m) {
        m.iter().flatten().max_by(|a, b| a.modulus().partial_cmp(&b.modulus()).unwrap().then(std::cmp::Ordering::Greater)).unwrap().clone()
    } else {
        let mut best = m[0][0].clone();
        let mut bn = best.norm_sqr().as_rational().unwrap();
        for s in m.iter().flatten() {
            let n = s.norm_sqr().as_rational().unwrap();
            if n > bn {
                bn = n;
                best = s.clone();
            }
        }
        best
    };
    let inv = pivot.inv()?;
    for row in m.iter_mut() {
        for s in row.iter_mut() {
            *s = &*s * &inv;
        }
    }
    if any_float(&m) {
        // flush entries that are noise relative to the representative
        let sc = max_modulus(&m);
        for s in m.iter_mut().flatten() {
            if s.is_zero_at(sc) {
                *s = Scalar::float(0.0, 0.0);
            }
        }
    }
    Ok(m)
}

impl ProjMatrix {
    pub fn new(rows: Rows) -> Result<ProjMatrix> {
        Ok(ProjMatrix { m: normalize(rows)? })
    }

    pub fn from_ints(rows: [[i64; 3]; 3]) -> Result<ProjMatrix> {
        ProjMatrix::new(rows.map(|r| r.map(Scalar::int)))
    }

    pub fn identity() -> ProjMatrix {
        ProjMatrix::diag(Scalar::one(), Scalar::one(), Scalar::one()).unwrap()
    }

    pub fn diag(a: Scalar, b: Scalar, c: Scalar) -> Result<ProjMatrix> {
        let z = Scalar::zero;
        ProjMatrix::new([[a, z(), z()], [z(), b, z()], [z(), z(), c]])
    }

    /// g_{x,y} = [[1,x,y],[0,1,0],[0,0,1]].
    pub fn core(x: Scalar, y: Scalar) -> ProjMatrix {
        let (o, z) = (Scalar::one, Scalar::zero);
        ProjMatrix { m: normalize([[o(), x, y], [z(), o(), z()], [z(), z(), o()]]).unwrap() }
    }

    /// h_{x,y} = [[1,0,x],[0,1,y],[0,0,1]].
    pub fn translation(x: Scalar, y: Scalar) -> ProjMatrix {
        let (o, z) = (Scalar::one, Scalar::zero);
        ProjMatrix { m: normalize([[o(), z(), x], [z(), o(), y], [z(), z(), o()]]).unwrap() }
    }

    pub fn core_i(x: i64, y: i64) -> ProjMatrix {
        ProjMatrix::core(Scalar::int(x), Scalar::int(y))
    }

    pub fn translation_i(x: i64, y: i64) -> ProjMatrix {
        ProjMatrix::translation(Scalar::int(x), Scalar::int(y))
    }

    pub fn rows(&self) -> &Rows {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.m[i][j]
    }

    pub fn is_exact(&self) -> bool {
        !any_float(&self.m)
    }

    pub fn to_float(&self) -> ProjMatrix {
        ProjMatrix::new(self.m.clone().map(|r| r.map(|s| s.to_float()))).unwrap()
    }

    pub fn scale(&self) -> f64 {
        max_modulus(&self.m)
    }

    pub fn entry_is_zero(&self, i: usize, j: usize) -> bool {
        self.m[i][j].is_zero_at(self.scale())
    }

    pub fn is_upper_triangular(&self) -> bool {
        lower_zero(&self.m, self.scale())
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_upper_triangular() && self.entry_is_zero(0, 1) && self.entry_is_zero(0, 2) && self.entry_is_zero(1, 2)
    }

    pub fn is_identity(&self) -> bool {
        self.is_diagonal() && self.m[0][0].is_one() && self.m[1][1].is_one()
    }

    pub fn mul(&self, other: &ProjMatrix) -> ProjMatrix {
        ProjMatrix::new(mul_rows(&self.m, &other.m)).expect("product of invertible matrices")
    }

    pub fn inverse(&self) -> ProjMatrix {
        ProjMatrix::new(adjugate(&self.m)).expect("adjugate of invertible matrix")
    }

    pub fn pow(&self, e: i64) -> ProjMatrix {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = ProjMatrix::identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Action on a column vector of homogeneous coordinates.
    pub fn apply(&self, v: &[Scalar; 3]) -> [Scalar; 3] {
        std::array::from_fn(|i| &(&(&self.m[i][0] * &v[0]) + &(&self.m[i][1] * &v[1])) + &(&self.m[i][2] * &v[2]))
    }

    pub fn key(&self) -> MatKey {
        if self.is_exact() {
            let mut v = Vec::with_capacity(18);
            for s in self.m.iter().flatten() {
                if let Scalar::Exact(a, b) = s {
                    v.push(a.clone());
                    v.push(b.clone());
                }
            }
            MatKey::Exact(v)
        } else {
            let f = |x: f64| (x * 1e7).round() as i64;
            MatKey::Float(self.m.iter().flatten().flat_map(|s| {
                let z = s.to_c64();
                [f(z.re), f(z.im)]
            }).collect())
        }
    }

    /// Entrywise max-modulus distance between normalized representatives.
    pub fn distance(&self, other: &ProjMatrix) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.m[i][j].to_c64() - other.m[i][j].to_c64()).norm());
            }
        }
        d
    }
}

impl fmt::Debug for ProjMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.m.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} {} {}", r[0], r[1], r[2])?;
        }
        write!(f, "]")
    }
}

/// Equality in PSL(3,ℂ).
pub fn proj_eq(g: &ProjMatrix, h: &ProjMatrix) -> bool {
    if g.is_exact() && h.is_exact() {
        return g.m == h.m;
    }
    // representatives may differ by the pivot choice; compare via a common nonzero entry
    let (a, b) = (&g.m, &h.m);
    let sg = g.scale();
    let sh = h.scale();
    let mut best = (0, 0);
    let mut bm = -1.0;
    for i in 0..3 {
        for j in 0..3 {
            let v = a[i][j].modulus();
            if v > bm {
                bm = v;
                best = (i, j);
            }
        }
    }
    let (pi, pj) = best;
    if b[pi][pj].is_zero_at(sh) {
        return false;
    }
    let c = &a[pi][pj] / &b[pi][pj];
    let t = Tol::current();
    for i in 0..3 {
        for j in 0..3 {
            let lhs = a[i][j].to_c64();
            let rhs = (&c * &b[i][j]).to_c64();
            if (lhs - rhs).norm() > t.abs.max(t.rel * sg.max(1.0)) {
                return false;
            }
        }
    }
    true
}

pub fn conjugate(a: &ProjMatrix, g: &ProjMatrix) -> ProjMatrix {
    a.mul(g).mul(&a.inverse())
}

pub fn commutator(g: &ProjMatrix, h: &ProjMatrix) -> ProjMatrix {
    g.mul(h).mul(&g.inverse()).mul(&h.inverse())
}

pub fn lambda12(g: &ProjMatrix) -> Result<Scalar> {
    if !g.is_upper_triangular() {
        return Err(Error::NotTriangular);
    }
    Ok(&g.m[0][0] / &g.m[1][1])
}

pub fn lambda23(g: &ProjMatrix) -> Result<Scalar> {
    if !g.is_upper_triangular() {
        return Err(Error::NotTriangular);
    }
    Ok(&g.m[1][1] / &g.m[2][2])
}

pub fn is_unipotent(g: &ProjMatrix) -> bool {
    g.is_upper_triangular() && g.m[0][0].is_one() && g.m[1][1].is_one()
}

/// The (2,3) entry of a unipotent element.
pub fn pi_proj(g: &ProjMatrix) -> Result<Scalar> {
    if !is_unipotent(g) {
        return Err(Error::NotUnipotent);
    }
    Ok(g.m[1][2].clone())
}

pub fn shape_of(g: &ProjMatrix) -> ShapeTag {
    if !g.is_upper_triangular() {
        return ShapeTag::NotUpperTriangular;
    }
    if is_unipotent(g) {
        let m = &g.m;
        if g.entry_is_zero(1, 2) {
            return ShapeTag::CoreShape(m[0][1].clone(), m[0][2].clone());
        }
        if g.entry_is_zero(0, 1) {
            return ShapeTag::TranslationShape(m[0][2].clone(), m[1][2].clone());
        }
        return ShapeTag::TriangularLayer2;
    }
    let l23 = lambda23(g).unwrap();
    if !l23.is_one() {
        return ShapeTag::TriangularLayer4;
    }
    if g.is_diagonal() {
        ShapeTag::Diagonal
    } else {
        ShapeTag::TriangularLayer3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    fn dg(a: &str, b: &str, c: &str) -> ProjMatrix {
        ProjMatrix::diag(s(a), s(b), s(c)).unwrap()
    }

    #[test]
    fn equality_up_to_scalar() {
        let i2 = dg("2", "2", "2");
        assert!(proj_eq(&ProjMatrix::identity(), &i2));
        assert!(proj_eq(&dg("2", "1", "1/2"), &dg("4", "2", "1")));
        assert!(!proj_eq(&ProjMatrix::core_i(1, 0), &ProjMatrix::core_i(0, 1)));
        assert_eq!(ProjMatrix::from_ints([[1, 2, 3], [2, 4, 6], [0, 0, 1]]).unwrap_err(), Error::NotInvertible);
    }

    #[test]
    fn conjugation_examples() {
        let a = dg("2", "1", "1/2");
        assert_eq!(conjugate(&a, &ProjMatrix::core_i(1, 0)), ProjMatrix::core_i(2, 0));
        let a = ProjMatrix::new([
            [s("1/4"), s("0"), s("0")],
            [s("0"), s("2"), s("1")],
            [s("0"), s("0"), s("2")],
        ])
        .unwrap();
        assert_eq!(conjugate(&a, &ProjMatrix::translation_i(1, 1)), ProjMatrix::translation(s("1/8"), s("1")));
    }

    #[test]
    fn commutator_examples() {
        let g = ProjMatrix::core_i(1, 0);
        assert!(commutator(&g, &g).is_identity());
        assert_eq!(commutator(&g, &ProjMatrix::translation_i(0, 1)), ProjMatrix::core_i(0, 1));
        assert_eq!(commutator(&dg("2", "1", "1/2"), &g), g);
    }

    #[test]
    fn characters_and_pi() {
        let g = ProjMatrix::from_ints([[6, 0, 0], [0, 3, 1], [0, 0, 2]]).unwrap();
        assert_eq!(lambda12(&g).unwrap(), Scalar::int(2));
        assert_eq!(lambda23(&g).unwrap(), Scalar::ratio(3, 2));
        let h = ProjMatrix::diag(s("1+i"), s("1"), s("1+i").inv().unwrap()).unwrap();
        assert_eq!(lambda12(&h).unwrap(), s("1+i"));
        assert_eq!(pi_proj(&ProjMatrix::from_ints([[1, 1, 1], [0, 1, 1], [0, 0, 1]]).unwrap()).unwrap(), Scalar::one());
        assert_eq!(pi_proj(&ProjMatrix::translation_i(0, 5)).unwrap(), Scalar::int(5));
        assert_eq!(pi_proj(&ProjMatrix::core_i(3, 4)).unwrap(), Scalar::zero());
        assert!(lambda12(&ProjMatrix::from_ints([[1, 0, 0], [1, 1, 0], [0, 0, 1]]).unwrap()).is_err());
    }

    #[test]
    fn shapes() {
        assert_eq!(shape_of(&ProjMatrix::core_i(2, -3)), ShapeTag::CoreShape(Scalar::int(2), Scalar::int(-3)));
        let g = ProjMatrix::new([[s("2"), s("0"), s("0")], [s("0"), s("1"), s("3/2")], [s("0"), s("0"), s("1")]]).unwrap();
        assert_eq!(shape_of(&g), ShapeTag::TriangularLayer3);
        assert_eq!(shape_of(&dg("6", "3", "2")), ShapeTag::TriangularLayer4);
        assert_eq!(shape_of(&dg("2", "1", "1")), ShapeTag::Diagonal);
        assert_eq!(shape_of(&ProjMatrix::translation_i(1, 2)), ShapeTag::TranslationShape(Scalar::int(1), Scalar::int(2)));
        assert_eq!(shape_of(&ProjMatrix::from_ints([[1, 1, 0], [0, 1, 1], [0, 0, 1]]).unwrap()), ShapeTag::TriangularLayer2);
    }

    #[test]
    fn float_equality() {
        let g = dg("6", "3", "2");
        let f = g.to_float();
        assert!(proj_eq(&g, &f));
        assert!(proj_eq(&f.mul(&f.inverse()), &ProjMatrix::identity()));
    }
}
