//! Finitely generated additive subgroups of ℝ² and ℝ⁴.
//!
//! Rational generators are reduced exactly with a Hermite normal form. Float
//! generators are split into an ℝ-independent part B and the rest; the group
//! is discrete iff every remaining generator has rational coordinates with
//! respect to B. Rationality is decided by a bounded search: a coordinate
//! vector c counts as rational when some q ≤ 10⁴ makes ‖q·v − Σ round(q·c_j)·b_j‖
//! smaller than 1e-7 times the largest generator norm.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{best_rational, Scalar};

pub const MAX_GENERATORS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBounds {
    pub coeff_bound: i64,
    pub threshold: f64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { coeff_bound: 10_000, threshold: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discreteness {
    Discrete,
    NonDiscrete,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub ambient: usize,
    pub generators: Vec<Vec<Scalar>>,
    /// A ℤ-basis when discrete; a maximal ℤ-independent subset of the generators otherwise.
    pub basis: Vec<Vec<Scalar>>,
    pub rank: usize,
    pub discrete: Discreteness,
}

impl Lattice {
    pub fn empty(ambient: usize) -> Lattice {
        Lattice { ambient, generators: vec![], basis: vec![], rank: 0, discrete: Discreteness::Discrete }
    }

    pub fn is_discrete(&self) -> bool {
        self.discrete == Discreteness::Discrete
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        matches!(member(v, self), Ok(Some(_)))
    }
}

/// ℂ → ℝ².
pub fn complex_to_r2(z: &Scalar) -> Vec<Scalar> {
    vec![z.re(), z.im()]
}

/// ℂ² → ℝ⁴.
pub fn pair_to_r4(x: &Scalar, y: &Scalar) -> Vec<Scalar> {
    vec![x.re(), x.im(), y.re(), y.im()]
}

pub fn reduce(generators: &[Vec<Scalar>]) -> Result<Lattice> {
    if generators.len() > MAX_GENERATORS {
        return Err(Error::TooManyGenerators { got: generators.len(), max: MAX_GENERATORS });
    }
    reduce_with(generators, SearchBounds::default())
}

/// `reduce` without the generator cap, for lattices spanned by many sampled points.
pub fn reduce_many(generators: &[Vec<Scalar>], ambient: usize) -> Result<Lattice> {
    if generators.is_empty() {
        return Ok(Lattice::empty(ambient));
    }
    reduce_with(generators, SearchBounds::default())
}

pub fn reduce_with(generators: &[Vec<Scalar>], bounds: SearchBounds) -> Result<Lattice> {
    let Some(first) = generators.first() else {
        return Ok(Lattice::empty(2));
    };
    let ambient = first.len();
    if !(ambient == 2 || ambient == 4) || generators.iter().any(|g| g.len() != ambient) {
        return Err(Error::Dimension);
    }
    if generators.iter().flatten().any(|s| !s.is_real()) {
        return Err(Error::Invalid("lattice coordinates must be real".into()));
    }
    let exact: Option<Vec<Vec<BigRational>>> =
        generators.iter().map(|g| g.iter().map(Scalar::as_rational).collect()).collect();
    let mut lat = match exact {
        Some(rows) => reduce_exact(&rows, ambient),
        None => reduce_float(generators, ambient, bounds),
    };
    lat.generators = generators.to_vec();
    Ok(lat)
}

fn lcm_denoms(rows: &[Vec<BigRational>]) -> BigInt {
    rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Row Hermite normal form; returns the nonzero rows.
pub fn hnf(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        loop {
            let Some(p) = (r..rows.len()).filter(|&i| !rows[i][c].is_zero()).min_by_key(|&i| rows[i][c].abs()) else {
                break;
            };
            rows.swap(r, p);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let f = rows[i][c].div_floor(&rows[r][c]);
                for k in 0..ncols {
                    let t = &f * &rows[r][k];
                    rows[i][k] -= t;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for k in 0..ncols {
                rows[r][k] = -rows[r][k].clone();
            }
        }
        for i in 0..r {
            let f = rows[i][c].div_floor(&rows[r][c]);
            if !f.is_zero() {
                for k in 0..ncols {
                    let t = &f * &rows[r][k];
                    rows[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

fn reduce_exact(rows: &[Vec<BigRational>], ambient: usize) -> Lattice {
    let d = lcm_denoms(rows);
    let ints: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * BigRational::from_integer(d.clone())).to_integer()).collect())
        .collect();
    let h = hnf(ints);
    let basis: Vec<Vec<Scalar>> = h
        .iter()
        .map(|r| r.iter().map(|x| Scalar::real(BigRational::new(x.clone(), d.clone()))).collect())
        .collect();
    Lattice { ambient, generators: vec![], rank: basis.len(), basis, discrete: Discreteness::Discrete }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve a small dense system by partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for k in c..n {
                a[i][k] -= f * a[c][k];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Coordinates of v in the ℝ-span of `basis` (least squares) and the residual norm.
fn coords(basis: &[Vec<f64>], v: &[f64]) -> (Vec<f64>, f64) {
    if basis.is_empty() {
        return (vec![], norm(v));
    }
    let g: Vec<Vec<f64>> = basis.iter().map(|b| basis.iter().map(|c| dot(b, c)).collect()).collect();
    let rhs: Vec<f64> = basis.iter().map(|b| dot(b, v)).collect();
    let c = solve(g, rhs).unwrap_or_else(|| vec![0.0; basis.len()]);
    let mut r = v.to_vec();
    for (ci, b) in c.iter().zip(basis) {
        for (rk, bk) in r.iter_mut().zip(b) {
            *rk -= ci * bk;
        }
    }
    (c, norm(&r))
}

fn combine(basis: &[Vec<f64>], c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; basis.first().map_or(0, Vec::len)];
    for (ci, b) in c.iter().zip(basis) {
        for (o, bk) in out.iter_mut().zip(b) {
            *o += ci * bk;
        }
    }
    out
}

/// A common denominator q ≤ bound making `c` integral up to the threshold, with the numerators.
fn rational_coords(basis: &[Vec<f64>], c: &[f64], bounds: SearchBounds, scale: f64) -> Option<(i64, Vec<i64>)> {
    let residual_ok = |q: i64| -> Option<Vec<i64>> {
        let nums: Vec<f64> = c.iter().map(|x| (x * q as f64).round()).collect();
        let diff: Vec<f64> = c.iter().zip(&nums).map(|(x, n)| x * q as f64 - n).collect();
        (norm(&combine(basis, &diff)) < bounds.threshold * scale).then(|| nums.iter().map(|&n| n as i64).collect())
    };
    let mut q: i64 = 1;
    for x in c {
        let (_, d) = best_rational(*x, bounds.coeff_bound)?;
        q = q.lcm(&d);
        if q > bounds.coeff_bound {
            break;
        }
    }
    if q <= bounds.coeff_bound {
        if let Some(n) = residual_ok(q) {
            return Some((q, n));
        }
    }
    None
}

fn reduce_float(generators: &[Vec<Scalar>], ambient: usize, bounds: SearchBounds) -> Lattice {
    let vecs: Vec<Vec<f64>> = generators.iter().map(|g| g.iter().map(Scalar::re_f64).collect()).collect();
    let scale = vecs.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut discrete = Discreteness::Discrete;
    let mut b: Vec<Vec<f64>> = vec![];
    let mut extras: Vec<Vec<f64>> = vec![];
    for v in &vecs {
        let n = norm(v);
        if n <= 1e-12 * scale.max(1.0) {
            continue;
        }
        let (_, res) = coords(&b, v);
        let rel = res / n;
        if rel > 1e-6 {
            b.push(v.clone());
        } else if rel < 1e-9 {
            extras.push(v.clone());
        } else {
            discrete = Discreteness::Unknown;
            b.push(v.clone());
        }
    }
    // ℚ-independent irrational extras, as coordinate vectors in B
    let mut irr: Vec<Vec<f64>> = vec![];
    let mut irr_vecs: Vec<Vec<f64>> = vec![];
    let mut rational: Vec<(i64, Vec<i64>)> = vec![];
    for v in &extras {
        let (c, _) = coords(&b, v);
        match rational_coords(&b, &c, bounds, scale) {
            Some(r) => rational.push(r),
            None => {
                let set: Vec<Vec<f64>> = b.iter().chain(&irr_vecs).cloned().collect();
                if irr_vecs.len() < 8 && !q_dependent(&set, v, scale) {
                    irr.push(c);
                    irr_vecs.push(v.clone());
                }
            }
        }
    }
    if !irr.is_empty() {
        let basis: Vec<Vec<Scalar>> =
            b.iter().chain(&irr_vecs).map(|v| v.iter().map(|&x| Scalar::float(x, 0.0)).collect()).collect();
        return Lattice { ambient, generators: vec![], rank: basis.len(), basis, discrete: Discreteness::NonDiscrete };
    }
    let r = b.len();
    let den = rational.iter().fold(1i64, |acc, (q, _)| acc.lcm(q));
    let mut rows: Vec<Vec<BigInt>> = (0..r)
        .map(|i| (0..r).map(|j| BigInt::from(if i == j { den } else { 0 })).collect())
        .collect();
    for (q, nums) in &rational {
        let f = den / q;
        rows.push(nums.iter().map(|n| BigInt::from(n * f)).collect());
    }
    let h = hnf(rows);
    let basis: Vec<Vec<Scalar>> = h
        .iter()
        .map(|row| {
            let c: Vec<f64> = row.iter().map(|x| x.to_f64().unwrap() / den as f64).collect();
            combine(&b, &c).into_iter().map(|x| Scalar::float(x, 0.0)).collect()
        })
        .collect();
    Lattice { ambient, generators: vec![], rank: basis.len(), basis, discrete }
}

/// Whether v is a ℚ-combination of the ℚ-independent `set`, by LLL on the
/// embedding rows [e_i | M·v_i]. Relations need coefficients ≤ 1000 and a
/// residual below 1e-10·scale.
fn q_dependent(set: &[Vec<f64>], v: &[f64], scale: f64) -> bool {
    if set.is_empty() {
        return false;
    }
    let mut all = set.to_vec();
    all.push(v.to_vec());
    let n = all.len();
    let d = v.len();
    let big = 1e10 / scale.max(1e-300);
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = vec![0.0; n + d];
            r[i] = 1.0;
            for k in 0..d {
                r[n + k] = big * all[i][k];
            }
            r
        })
        .collect();
    lll(&mut rows, 0.75);
    rows.iter().any(|r| {
        let a = &r[..n];
        if a[n - 1] == 0.0 || a.iter().any(|x| x.abs() > 1000.0) {
            return false;
        }
        let res: Vec<f64> = (0..d).map(|k| (0..n).map(|i| a[i] * all[i][k]).sum()).collect();
        norm(&res) <= 1e-10 * scale
    })
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = b.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut nsq = vec![0.0; n];
    for i in 0..n {
        let mut w = b[i].clone();
        for j in 0..i {
            mu[i][j] = if nsq[j] > 0.0 { dot(&b[i], &star[j]) / nsq[j] } else { 0.0 };
            for (wk, sk) in w.iter_mut().zip(&star[j]) {
                *wk -= mu[i][j] * sk;
            }
        }
        nsq[i] = dot(&w, &w);
        star.push(w);
    }
    (nsq, mu)
}

fn lll(b: &mut [Vec<f64>], delta: f64) {
    let n = b.len();
    let mut k = 1;
    let mut steps = 0;
    while k < n && steps < 20_000 {
        steps += 1;
        for j in (0..k).rev() {
            let (_, mu) = gram_schmidt(b);
            let q = mu[k][j].round();
            if q != 0.0 {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
            }
        }
        let (nsq, mu) = gram_schmidt(b);
        if nsq[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * nsq[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

/// Integer coefficients of v in the lattice basis, if v is a member.
pub fn member(v: &[Scalar], lat: &Lattice) -> Result<Option<Vec<BigInt>>> {
    if !lat.is_discrete() {
        return Err(Error::MembershipUndecidable);
    }
    if v.len() != lat.ambient {
        return Err(Error::Dimension);
    }
    let exact_v: Option<Vec<BigRational>> = v.iter().map(Scalar::as_rational).collect();
    let exact_b: Option<Vec<Vec<BigRational>>> =
        lat.basis.iter().map(|r| r.iter().map(Scalar::as_rational).collect()).collect();
    if let (Some(mut w), Some(basis)) = (exact_v.clone(), exact_b) {
        let mut out = Vec::with_capacity(basis.len());
        for row in &basis {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
            let c = &w[p] / &row[p];
            if !c.is_integer() {
                return Ok(None);
            }
            for (wk, rk) in w.iter_mut().zip(row) {
                *wk -= &c * rk;
            }
            out.push(c.to_integer());
        }
        return Ok(w.iter().all(Zero::is_zero).then_some(out));
    }
    if !v.iter().all(Scalar::is_real) {
        return Ok(None);
    }
    let basis: Vec<Vec<f64>> = lat.basis.iter().map(|r| r.iter().map(Scalar::re_f64).collect()).collect();
    let fv: Vec<f64> = v.iter().map(Scalar::re_f64).collect();
    let (c, _) = coords(&basis, &fv);
    let n: Vec<f64> = c.iter().map(|x| x.round()).collect();
    let back = combine(&basis, &n);
    let scale = basis.iter().map(|b| norm(b)).fold(norm(&fv), f64::max).max(1.0);
    let t = crate::scalar::Tol::current();
    let diff: Vec<f64> = fv.iter().zip(&back).map(|(a, b)| a - b).collect();
    if norm(&diff) <= t.abs.max(t.rel * scale) * 10.0 {
        Ok(Some(n.iter().map(|&x| BigInt::from(x as i64)).collect()))
    } else {
        Ok(None)
    }
}

/// Whether v lies in the ℚ-span of the lattice basis: least-squares
/// coordinates that are rationals with denominator ≤ 10⁴ and reproduce v to
/// 1e-9 relative.
pub fn in_rational_span(v: &[Scalar], lat: &Lattice) -> bool {
    if v.len() != lat.ambient || !v.iter().all(Scalar::is_real) {
        return false;
    }
    let basis: Vec<Vec<f64>> = lat.basis.iter().map(|r| r.iter().map(Scalar::re_f64).collect()).collect();
    let fv: Vec<f64> = v.iter().map(Scalar::re_f64).collect();
    let scale = basis.iter().map(|b| norm(b)).fold(norm(&fv), f64::max).max(1e-300);
    let (c, res) = coords(&basis, &fv);
    if res > 1e-9 * scale {
        return false;
    }
    let q: Option<Vec<f64>> = c
        .iter()
        .map(|x| best_rational(*x, 10_000).map(|(n, d)| n as f64 / d as f64))
        .collect();
    let Some(q) = q else { return false };
    let diff: Vec<f64> = fv.iter().zip(combine(&basis, &q)).map(|(a, b)| a - b).collect();
    norm(&diff) <= 1e-9 * scale
}

/// Torsion-free rank of the multiplicative group generated by `values`.
pub fn rank_of_multiplicative(values: &[Scalar]) -> Result<usize> {
    if values.len() > MAX_GENERATORS {
        return Err(Error::TooManyGenerators { got: values.len(), max: MAX_GENERATORS });
    }
    rank_of_multiplicative_many(values)
}

pub fn rank_of_multiplicative_many(values: &[Scalar]) -> Result<usize> {
    if values.iter().any(|v| v.is_zero_at(0.0)) {
        return Err(Error::ZeroValue);
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut gens: Vec<Vec<Scalar>> = vec![vec![Scalar::float(0.0, 0.0), Scalar::float(two_pi, 0.0)]];
    for v in values {
        if v.is_one() {
            continue;
        }
        let z = v.to_c64();
        gens.push(vec![Scalar::float(z.norm().ln(), 0.0), Scalar::float(z.im.atan2(z.re), 0.0)]);
    }
    let lat = reduce_with(&gens, SearchBounds::default())?;
    Ok(lat.rank - 1)
}

/// Torsion-free rank of the group generated by pairs in (ℂ*)².
pub fn rank_of_multiplicative_pairs(values: &[(Scalar, Scalar)]) -> Result<usize> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let zero = || Scalar::float(0.0, 0.0);
    let mut gens: Vec<Vec<Scalar>> = vec![
        vec![zero(), Scalar::float(two_pi, 0.0), zero(), zero()],
        vec![zero(), zero(), zero(), Scalar::float(two_pi, 0.0)],
    ];
    for (a, b) in values {
        if a.is_zero_at(0.0) || b.is_zero_at(0.0) {
            return Err(Error::ZeroValue);
        }
        if a.is_one() && b.is_one() {
            continue;
        }
        let mut row = vec![];
        for z in [a.to_c64(), b.to_c64()] {
            row.push(Scalar::float(z.norm().ln(), 0.0));
            row.push(Scalar::float(z.im.atan2(z.re), 0.0));
        }
        gens.push(row);
    }
    let lat = reduce_with(&gens, SearchBounds::default())?;
    Ok(lat.rank - 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[&str]) -> Vec<Scalar> {
        xs.iter().map(|x| x.parse().unwrap()).collect()
    }

    #[test]
    fn exact_reduction() {
        let lat = reduce(&[v(&["1", "0"]), v(&["0", "1"]), v(&["2", "3"])]).unwrap();
        assert_eq!(lat.rank, 2);
        assert_eq!(lat.basis, vec![v(&["1", "0"]), v(&["0", "1"])]);
        assert!(lat.is_discrete());
        let half = reduce(&[v(&["1", "0"]), v(&["1/2", "0"])]).unwrap();
        assert_eq!(half.rank, 1);
        assert_eq!(half.basis, vec![v(&["1/2", "0"])]);
    }

    #[test]
    fn irrational_is_dense() {
        let s2 = Scalar::float(2f64.sqrt(), 0.0);
        let lat = reduce(&[v(&["1", "0"]), vec![s2, Scalar::float(0.0, 0.0)]]).unwrap();
        assert_eq!(lat.discrete, Discreteness::NonDiscrete);
        assert!(member(&v(&["1", "0"]), &lat).is_err());
    }

    #[test]
    fn float_rational_relation_is_discrete() {
        let f = |x: f64, y: f64| vec![Scalar::float(x, 0.0), Scalar::float(y, 0.0)];
        let lat = reduce(&[f(1.0, 0.0), f(0.5, 0.0), f(0.0, 2f64.sqrt())]).unwrap();
        assert!(lat.is_discrete());
        assert_eq!(lat.rank, 2);
        assert!(lat.contains(&f(1.5, -2f64.sqrt())));
        assert!(!lat.contains(&f(0.25, 0.0)));
    }

    #[test]
    fn membership() {
        let lat = reduce(&[v(&["1", "0"]), v(&["0", "1"])]).unwrap();
        assert_eq!(member(&v(&["2", "-3"]), &lat).unwrap(), Some(vec![BigInt::from(2), BigInt::from(-3)]));
        assert_eq!(member(&v(&["1/2", "0"]), &lat).unwrap(), None);
    }

    #[test]
    fn multiplicative_ranks() {
        let r = |xs: &[&str]| rank_of_multiplicative(&v(xs)).unwrap();
        assert_eq!(r(&["1"]), 0);
        assert_eq!(r(&["2"]), 1);
        assert_eq!(r(&["2", "3"]), 2);
        assert_eq!(r(&["2", "4"]), 1);
        assert_eq!(r(&["2", "3", "6"]), 2);
        assert_eq!(r(&["i", "-1"]), 0);
        assert_eq!(r(&["3/5+4/5i"]), 1);
        assert_eq!(r(&["2i"]), 1);
        assert!(rank_of_multiplicative(&v(&["0"])).is_err());
    }

    #[test]
    fn generator_cap() {
        let g = vec![v(&["1", "0"]); 7];
        assert!(matches!(reduce(&g), Err(Error::TooManyGenerators { .. })));
        assert_eq!(reduce_many(&g, 2).unwrap().rank, 1);
    }

    #[test]
    fn hnf_small() {
        let h = hnf(vec![vec![BigInt::from(4), BigInt::from(6)], vec![BigInt::from(6), BigInt::from(9)]]);
        assert_eq!(h, vec![vec![BigInt::from(2), BigInt::from(3)]]);
    }

    #[test]
    fn several_irrationals() {
        let f = |x: f64| vec![Scalar::float(x, 0.0), Scalar::float(0.0, 0.0)];
        let (r2, r3) = (2f64.sqrt(), 3f64.sqrt());
        let lat = reduce(&[f(1.0), f(r2), f(r3)]).unwrap();
        assert_eq!((lat.rank, lat.discrete), (3, Discreteness::NonDiscrete));
        let lat = reduce(&[f(1.0), f(r2), f(1.0 + 2.0 * r2), f(3.0 - r2)]).unwrap();
        assert_eq!((lat.rank, lat.discrete), (2, Discreteness::NonDiscrete));
    }

    #[test]
    fn pair_ranks() {
        let s = |x: &str| -> Scalar { x.parse().unwrap() };
        let pairs = [(s("3"), s("2")), (s("5"), s("2")), (s("1"), s("4"))];
        assert_eq!(rank_of_multiplicative_pairs(&pairs).unwrap(), 3);
        let pairs = [(s("3"), s("2")), (s("9"), s("4"))];
        assert_eq!(rank_of_multiplicative_pairs(&pairs).unwrap(), 1);
    }
}
