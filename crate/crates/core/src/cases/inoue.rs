//! The 301(2) presentation built from an integer matrix with one real
//! eigenvalue above 1 and a complex-conjugate pair.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::proj::{conjugate, ProjMatrix};
use crate::scalar::Scalar;
use crate::witness::GroupPresentation;

#[derive(Debug, Clone, PartialEq)]
pub struct InoueGroup {
    pub matrix: [[i64; 3]; 3],
    /// h_{x₁,y₁}, h_{x₂,y₂}, h_{x₃,y₃}, then γ = Diag(α²β, αβ², 1).
    pub presentation: GroupPresentation,
    pub lambda_real: f64,
    pub lambda_complex: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// Largest distance between γh_iγ⁻¹ and Π_j h_j^{A_ij}.
    pub relation_error: f64,
}

fn det3(a: &[[i64; 3]; 3]) -> i64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Roots of t³ + c₂t² + c₁t + c₀ by Durand–Kerner, polished by Newton steps.
fn cubic_roots(c2: f64, c1: f64, c0: f64) -> [Complex64; 3] {
    let f = |t: Complex64| ((t + c2) * t + c1) * t + c0;
    let df = |t: Complex64| (t * 3.0 + 2.0 * c2) * t + c1;
    let seed = Complex64::new(0.4, 0.9);
    let mut r = [Complex64::new(1.0, 0.0), seed, seed * seed];
    for _ in 0..500 {
        let prev = r;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if j != i {
                    den *= r[i] - r[j];
                }
            }
            r[i] -= f(r[i]) / den;
        }
        if (0..3).all(|i| (r[i] - prev[i]).norm() < 1e-15 * (1.0 + r[i].norm())) {
            break;
        }
    }
    for t in r.iter_mut() {
        for _ in 0..3 {
            let d = df(*t);
            if d.norm() > 0.0 {
                *t -= f(*t) / d;
            }
        }
    }
    r
}

fn cross(u: [Complex64; 3], w: [Complex64; 3]) -> [Complex64; 3] {
    [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]]
}

/// A null vector of A − λI: the largest cross product of two of its rows.
fn eigenvector(a: &[[i64; 3]; 3], lambda: Complex64) -> [Complex64; 3] {
    let rows: Vec<[Complex64; 3]> = (0..3)
        .map(|i| std::array::from_fn(|j| Complex64::new(a[i][j] as f64, 0.0) - if i == j { lambda } else { Complex64::new(0.0, 0.0) }))
        .collect();
    let mut best = [Complex64::new(0.0, 0.0); 3];
    let mut size = -1.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = cross(rows[i], rows[j]);
        let s: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if s > size {
            size = s;
            best = c;
        }
    }
    let n = size.sqrt();
    best.map(|z| z / n)
}

pub fn inoue_from_integer_matrix(a: [[i64; 3]; 3]) -> Result<InoueGroup> {
    if det3(&a) != 1 {
        return Err(Error::Constraint("det A = 1".into()));
    }
    let tr = (a[0][0] + a[1][1] + a[2][2]) as f64;
    let minors = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) + (a[0][0] * a[2][2] - a[0][2] * a[2][0])
        + (a[1][1] * a[2][2] - a[1][2] * a[2][1]);
    let roots = cubic_roots(-tr, minors as f64, -1.0);
    let real_tol = 1e-9;
    let lambda_r = roots
        .iter()
        .filter(|z| z.im.abs() <= real_tol * z.norm().max(1.0) && z.re > 1.0 + 1e-12)
        .map(|z| z.re)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |y| y.max(x))));
    let Some(lambda_r) = lambda_r else {
        return Err(Error::Constraint("no real eigenvalue > 1".into()));
    };
    let Some(&lambda_c) = roots.iter().find(|z| z.im > real_tol * z.norm().max(1.0)) else {
        return Err(Error::Constraint("α ≠ 1 and αβ² ∉ ℝ violated".into()));
    };
    let x = eigenvector(&a, Complex64::new(lambda_r, 0.0));
    // the real null vector, made real by removing a common phase
    let k = (0..3).max_by(|&i, &j| x[i].norm().partial_cmp(&x[j].norm()).unwrap()).unwrap();
    let phase = x[k].conj() / x[k].norm();
    let x: [f64; 3] = x.map(|z| (z * phase).re);
    let y = eigenvector(&a, lambda_c);

    let ab = (Complex64::new(lambda_r, 0.0) * lambda_c).powf(1.0 / 3.0);
    let alpha = lambda_r / ab;
    let beta = lambda_c / ab;
    if (alpha - 1.0).norm() < 1e-12 {
        return Err(Error::Constraint("α ≠ 1 and αβ² ∉ ℝ violated".into()));
    }
    let f = |z: Complex64| Scalar::from_c64(z);
    let mut p = GroupPresentation::default();
    for i in 0..3 {
        p.push(&format!("h{}", i + 1), ProjMatrix::translation(Scalar::float(x[i], 0.0), f(y[i])));
    }
    p.push("γ", ProjMatrix::diag(Scalar::float(lambda_r, 0.0), f(lambda_c), Scalar::float(1.0, 0.0))?);
    let relation_error = relation_error(&p, &a);
    Ok(InoueGroup { matrix: a, presentation: p, lambda_real: lambda_r, lambda_complex: lambda_c, alpha, beta, relation_error })
}

/// max_i d(γh_iγ⁻¹, h₁^{A_i1} h₂^{A_i2} h₃^{A_i3}).
pub fn relation_error(p: &GroupPresentation, a: &[[i64; 3]; 3]) -> f64 {
    let g = &p.generators[3];
    (0..3)
        .map(|i| {
            let lhs = conjugate(g, &p.generators[i]);
            let rhs = (0..3).fold(ProjMatrix::identity(), |acc, j| acc.mul(&p.generators[j].pow(a[i][j])));
            lhs.distance(&rhs)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plastic_number() {
        let g = inoue_from_integer_matrix([[0, 1, 0], [0, 0, 1], [1, 1, 0]]).unwrap();
        assert!((g.lambda_real - 1.324_717_957_244_746).abs() < 1e-12);
        assert!(g.relation_error < 1e-9);
        let l = (g.alpha * g.alpha * g.beta, g.alpha * g.beta * g.beta);
        assert!((l.0 - g.lambda_real).norm() < 1e-12 && (l.1 - g.lambda_complex).norm() < 1e-12);
    }

    #[test]
    fn rejected_spectra() {
        let e = inoue_from_integer_matrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap_err();
        assert_eq!(e, Error::Constraint("no real eigenvalue > 1".into()));
        let e = inoue_from_integer_matrix([[2, 1, 0], [1, 1, 0], [0, 0, 1]]).unwrap_err();
        assert_eq!(e, Error::Constraint("α ≠ 1 and αβ² ∉ ℝ violated".into()));
        assert!(inoue_from_integer_matrix([[2, 0, 0], [0, 1, 0], [0, 0, 1]]).is_err());
    }
}
