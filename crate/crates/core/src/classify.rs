//! Elliptic / parabolic / loxodromic classification of triangular elements.

use crate::error::{Error, Result};
use crate::proj::{ProjMatrix, Rows};
use crate::scalar::{best_rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum ElementClass {
    Identity,
    Elliptic,
    Parabolic,
    Loxoparabolic,
    ComplexHomothetyI(Scalar),
    ComplexHomothetyIII(Scalar),
    RationalScrew,
    IrrationalScrew,
    StronglyLoxodromic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopLevel {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

impl ElementClass {
    pub fn name(&self) -> &'static str {
        match self {
            ElementClass::Identity => "Identity",
            ElementClass::Elliptic => "Elliptic",
            ElementClass::Parabolic => "Parabolic",
            ElementClass::Loxoparabolic => "Loxoparabolic",
            ElementClass::ComplexHomothetyI(_) => "ComplexHomothetyI",
            ElementClass::ComplexHomothetyIII(_) => "ComplexHomothetyIII",
            ElementClass::RationalScrew => "RationalScrew",
            ElementClass::IrrationalScrew => "IrrationalScrew",
            ElementClass::StronglyLoxodromic => "StronglyLoxodromic",
        }
    }

    pub fn top_level(&self) -> TopLevel {
        match self {
            ElementClass::Identity => TopLevel::Identity,
            ElementClass::Elliptic => TopLevel::Elliptic,
            ElementClass::Parabolic => TopLevel::Parabolic,
            _ => TopLevel::Loxodromic,
        }
    }

    pub fn is_loxodromic(&self) -> bool {
        self.top_level() == TopLevel::Loxodromic
    }

    pub fn lambda(&self) -> Option<&Scalar> {
        match self {
            ElementClass::ComplexHomothetyI(l) | ElementClass::ComplexHomothetyIII(l) => Some(l),
            _ => None,
        }
    }
}

/// Rank of a 3×3 matrix by elimination; float pivots below `scale`·tol count as zero.
pub fn rank3(m: &Rows, scale: f64) -> usize {
    let mut a: Vec<Vec<Scalar>> = m.iter().map(|r| r.to_vec()).collect();
    let mut rank = 0;
    for col in 0..3 {
        let pivot = (rank..3)
            .filter(|&r| !a[r][col].is_zero_at(scale))
            .max_by(|&x, &y| a[x][col].modulus().partial_cmp(&a[y][col].modulus()).unwrap());
        let Some(p) = pivot else { continue };
        a.swap(rank, p);
        let inv = a[rank][col].inv().unwrap();
        for r in 0..3 {
            if r != rank && !a[r][col].is_zero_at(0.0) {
                let f = &a[r][col] * &inv;
                for c in 0..3 {
                    let t = &f * &a[rank][c];
                    a[r][c] = &a[r][c] - &t;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn same_modulus(a: &Scalar, b: &Scalar) -> bool {
    a.norm_sqr().approx_eq(&b.norm_sqr())
}

fn diagonalizable(g: &ProjMatrix, ev: &[Scalar; 3]) -> bool {
    let scale = g.scale();
    for (i, l) in ev.iter().enumerate() {
        let mult = ev.iter().filter(|e| e.approx_eq(l)).count();
        if mult == 1 || ev[..i].iter().any(|e| e.approx_eq(l)) {
            continue;
        }
        let mut m = g.rows().clone();
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = &row[k] - l;
        }
        if rank3(&m, scale) != 3 - mult {
            return false;
        }
    }
    true
}

/// Whether `r` (of modulus one) is a root of unity.
///
/// Exact values live in ℚ(i), whose roots of unity are ±1 and ±i. Floats use
/// continued fractions on arg(r)/2π with denominators up to 10⁶, accepting
/// p/q only when the error is below min(1e-9, 1e-3/q²).
pub fn is_root_of_unity(r: &Scalar) -> bool {
    if r.is_exact() {
        let one = Scalar::one();
        return [one.clone(), -one, Scalar::i(), -Scalar::i()].iter().any(|u| u == r);
    }
    if (r.modulus() - 1.0).abs() > 1e-9 {
        return false;
    }
    root_order(r).is_some()
}

/// Order of a float unit-modulus value detected as a root of unity.
pub fn root_order(r: &Scalar) -> Option<i64> {
    let z = r.to_c64();
    let mut x = z.im.atan2(z.re) / (2.0 * std::f64::consts::PI);
    if x < 0.0 {
        x += 1.0;
    }
    let (p, q) = best_rational(x, 1_000_000)?;
    let err = (x - p as f64 / q as f64).abs();
    (err <= 1e-9f64.min(1e-3 / (q as f64 * q as f64))).then_some(q)
}

pub fn eigenvalues(g: &ProjMatrix) -> Result<[Scalar; 3]> {
    if !g.is_upper_triangular() {
        return Err(Error::NotTriangular);
    }
    Ok([g.get(0, 0).clone(), g.get(1, 1).clone(), g.get(2, 2).clone()])
}

/// Eigenvalue moduli divided by their geometric mean.
pub fn normalized_moduli(g: &ProjMatrix) -> Result<[f64; 3]> {
    let ev = eigenvalues(g)?;
    let m = ev.clone().map(|e| e.modulus());
    let gm = (m[0] * m[1] * m[2]).cbrt();
    Ok(m.map(|x| x / gm))
}

pub fn classify_element(g: &ProjMatrix) -> Result<ElementClass> {
    let ev = eigenvalues(g)?;
    if g.is_identity() {
        return Ok(ElementClass::Identity);
    }
    let [a, b, c] = &ev;
    let (ab, bc, ac) = (same_modulus(a, b), same_modulus(b, c), same_modulus(a, c));
    if ab && bc {
        return Ok(if diagonalizable(g, &ev) { ElementClass::Elliptic } else { ElementClass::Parabolic });
    }
    let pair = if a.approx_eq(b) {
        Some((a, 2))
    } else if b.approx_eq(c) {
        Some((b, 0))
    } else if a.approx_eq(c) {
        Some((a, 1))
    } else {
        None
    };
    if let Some((rep, odd_pos)) = pair {
        if !diagonalizable(g, &ev) {
            return Ok(ElementClass::Loxoparabolic);
        }
        let lambda = (rep / &ev[odd_pos]).cbrt();
        return Ok(if odd_pos == 2 { ElementClass::ComplexHomothetyIII(lambda) } else { ElementClass::ComplexHomothetyI(lambda) });
    }
    let screw_pair = if ab {
        Some((a, b))
    } else if bc {
        Some((b, c))
    } else if ac {
        Some((a, c))
    } else {
        None
    };
    match screw_pair {
        Some((x, y)) => {
            if is_root_of_unity(&(x / y)) {
                Ok(ElementClass::RationalScrew)
            } else {
                Ok(ElementClass::IrrationalScrew)
            }
        }
        None => Ok(ElementClass::StronglyLoxodromic),
    }
}

/// Smallest n ≤ bound with gⁿ the projective identity.
pub fn is_torsion(g: &ProjMatrix, order_bound: u32) -> Option<u32> {
    let mut acc = g.clone();
    for n in 1..=order_bound {
        if acc.is_identity() {
            return Some(n);
        }
        acc = acc.mul(g);
    }
    None
}
