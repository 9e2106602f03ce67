//! Finite balls in the Cayley graph and the checks built on them: layer
//! ranks, normality, escape sequences and cone invariance.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::lattice::{complex_to_r2, in_rational_span, member, pair_to_r4, rank_of_multiplicative_pairs, reduce_many, Discreteness, Lattice};
use crate::proj::{conjugate, is_unipotent, lambda12, lambda23, pi_proj, proj_eq, shape_of, MatKey, ProjMatrix, ShapeTag};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupPresentation {
    pub generators: Vec<ProjMatrix>,
    pub labels: Vec<String>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<ProjMatrix>) -> GroupPresentation {
        let labels = (1..=generators.len()).map(|i| format!("g{i}")).collect();
        GroupPresentation { generators, labels }
    }

    pub fn labelled(pairs: Vec<(&str, ProjMatrix)>) -> GroupPresentation {
        let (labels, generators) = pairs.into_iter().map(|(l, g)| (l.to_string(), g)).unzip();
        GroupPresentation { generators, labels }
    }

    pub fn push(&mut self, label: &str, g: ProjMatrix) {
        self.labels.push(label.to_string());
        self.generators.push(g);
    }

    pub fn is_exact(&self) -> bool {
        self.generators.iter().all(ProjMatrix::is_exact)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallLimits {
    pub max_len: usize,
    pub max_gens: usize,
    pub max_elements: usize,
}

impl Default for BallLimits {
    fn default() -> Self {
        BallLimits { max_len: 8, max_gens: 4, max_elements: 1_000_000 }
    }
}

/// A ball element with the first word (in shortlex order) reaching it.
/// Letters are `2·i` for generator i and `2·i + 1` for its inverse.
#[derive(Debug, Clone)]
pub struct BallElement {
    pub word: Vec<u8>,
    pub matrix: ProjMatrix,
}

pub fn ball_with_limits(p: &GroupPresentation, len: usize, limits: BallLimits) -> Result<Vec<BallElement>> {
    if len > limits.max_len {
        return Err(Error::Invalid(format!("word length {len} exceeds {}", limits.max_len)));
    }
    if p.generators.len() > limits.max_gens {
        return Err(Error::TooManyGenerators { got: p.generators.len(), max: limits.max_gens });
    }
    let letters: Vec<ProjMatrix> = p.generators.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut seen: HashSet<MatKey> = HashSet::new();
    let id = ProjMatrix::identity();
    seen.insert(id.key());
    let mut out = vec![BallElement { word: vec![], matrix: id }];
    let mut frontier = 0..1;
    for _ in 0..len {
        let start = out.len();
        for idx in frontier.clone() {
            for (l, m) in letters.iter().enumerate() {
                let l = l as u8;
                if out[idx].word.last().is_some_and(|&last| last ^ 1 == l) {
                    continue;
                }
                let g = out[idx].matrix.mul(m);
                if seen.insert(g.key()) {
                    let mut word = out[idx].word.clone();
                    word.push(l);
                    out.push(BallElement { word, matrix: g });
                    if out.len() > limits.max_elements {
                        return Err(Error::BallCap(limits.max_elements));
                    }
                }
            }
        }
        frontier = start..out.len();
        if frontier.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// Distinct elements of word length ≤ `len`, identity first.
pub fn ball(p: &GroupPresentation, len: usize) -> Result<Vec<ProjMatrix>> {
    Ok(ball_with_limits(p, len, BallLimits::default())?.into_iter().map(|e| e.matrix).collect())
}

fn vec_key(v: &[Scalar]) -> MatKey {
    if v.iter().all(Scalar::is_exact) {
        MatKey::Exact(v.iter().flat_map(|s| [s.re().as_rational().unwrap(), s.im().as_rational().unwrap()]).collect())
    } else {
        MatKey::Float(v.iter().flat_map(|s| {
            let z = s.to_c64();
            [(z.re * 1e7).round() as i64, (z.im * 1e7).round() as i64]
        }).collect())
    }
}

fn dedup_vectors(vs: Vec<Vec<Scalar>>) -> Vec<Vec<Scalar>> {
    let mut seen = HashSet::new();
    vs.into_iter().filter(|v| seen.insert(vec_key(v))).collect()
}

fn sample_core(elements: &[ProjMatrix]) -> Vec<Vec<Scalar>> {
    let pts = elements
        .iter()
        .filter_map(|g| match shape_of(g) {
            ShapeTag::CoreShape(x, y) if !g.is_identity() => Some(pair_to_r4(&x, &y)),
            _ => None,
        })
        .collect();
    dedup_vectors(pts)
}

/// Lattice in ℝ⁴ of the Core-shaped elements of the ball.
pub fn core_extract(p: &GroupPresentation, len: usize) -> Result<Lattice> {
    let b = ball(p, len)?;
    reduce_many(&sample_core(&b), 4)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerDecomposition {
    pub core: Vec<ProjMatrix>,
    pub xi: Vec<ProjMatrix>,
    pub eta: Vec<ProjMatrix>,
    pub gamma: Vec<ProjMatrix>,
    pub k: usize,
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub core_discrete: Discreteness,
    pub xi_discrete: Discreteness,
    pub diagnostics: Vec<String>,
}

impl LayerDecomposition {
    pub fn rank_sum(&self) -> usize {
        self.k + self.r + self.m + self.n
    }
}

/// Ranks of the four layers of the group.
///
/// k and r come from the Core-shaped elements and the Π-values of the other
/// unipotent elements of the ball. n is the rank of λ23 on the generators
/// and m = rank(λ12, λ23) − n, which equals the rank of λ12 on Ker λ23.
pub fn layer_decompose(p: &GroupPresentation, len: usize) -> Result<LayerDecomposition> {
    layer_decompose_with(p, len, BallLimits::default())
}

pub fn layer_decompose_with(p: &GroupPresentation, len: usize, limits: BallLimits) -> Result<LayerDecomposition> {
    if p.generators.iter().any(|g| !g.is_upper_triangular()) {
        return Err(Error::NotTriangular);
    }
    let b: Vec<ProjMatrix> = ball_with_limits(p, len, limits)?.into_iter().map(|e| e.matrix).collect();
    let core_lat = reduce_many(&sample_core(&b), 4)?;
    let pis: Vec<Vec<Scalar>> = b
        .iter()
        .filter(|g| is_unipotent(g) && !matches!(shape_of(g), ShapeTag::CoreShape(..)))
        .map(|g| complex_to_r2(&pi_proj(g).unwrap()))
        .collect();
    let xi_lat = reduce_many(&dedup_vectors(pis), 2)?;
    let l23: Vec<(Scalar, Scalar)> =
        p.generators.iter().map(|g| (Scalar::one(), lambda23(g).unwrap())).collect();
    let both: Vec<(Scalar, Scalar)> =
        p.generators.iter().map(|g| (lambda12(g).unwrap(), lambda23(g).unwrap())).collect();
    let n = rank_of_multiplicative_pairs(&l23)?;
    let m = rank_of_multiplicative_pairs(&both)? - n;

    let mut out = LayerDecomposition {
        core: core_lat.basis.iter().map(|v| ProjMatrix::core(Scalar::from_parts(&v[0], &v[1]), Scalar::from_parts(&v[2], &v[3]))).collect(),
        xi: vec![],
        eta: vec![],
        gamma: vec![],
        k: core_lat.rank,
        r: xi_lat.rank,
        m,
        n,
        core_discrete: core_lat.discrete,
        xi_discrete: xi_lat.discrete,
        diagnostics: vec![],
    };
    for g in &p.generators {
        match shape_of(g) {
            ShapeTag::CoreShape(..) => {}
            ShapeTag::TranslationShape(..) | ShapeTag::TriangularLayer2 => out.xi.push(g.clone()),
            ShapeTag::Diagonal | ShapeTag::TriangularLayer3 => out.eta.push(g.clone()),
            ShapeTag::TriangularLayer4 => out.gamma.push(g.clone()),
            ShapeTag::NotUpperTriangular => unreachable!(),
        }
    }
    if out.rank_sum() > 4 {
        out.diagnostics.push(format!(
            "layer ranks k={} r={} m={} n={} sum to {} > 4; the group is not discrete or not complex Kleinian",
            out.k, out.r, out.m, out.n, out.rank_sum()
        ));
    }
    for (d, what) in [(out.core_discrete, "core lattice"), (out.xi_discrete, "Π lattice")] {
        match d {
            Discreteness::NonDiscrete => out.diagnostics.push(format!("{what} is not discrete")),
            Discreteness::Unknown => out.diagnostics.push(format!("discreteness of {what} undecided")),
            Discreteness::Discrete => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalityReport {
    pub holds: bool,
    pub checked: usize,
    /// (conjugating generator, element, conjugate) of the first failure.
    pub counterexample: Option<(ProjMatrix, ProjMatrix, ProjMatrix)>,
}

/// Conjugates every element of ball(sub, bound) by every generator a of
/// `whole` (as a·g·a⁻¹) and tests membership in `sub`.
///
/// When `sub` is Core-shaped, membership is decided in its lattice;
/// otherwise against ball(sub, 2·bound), which can only confirm.
pub fn normality_check(sub: &GroupPresentation, whole: &GroupPresentation, bound: usize) -> Result<NormalityReport> {
    let elems = ball(sub, bound)?;
    let core_like = sub.generators.iter().all(|g| matches!(shape_of(g), ShapeTag::CoreShape(..)));
    let lat = if core_like { Some(reduce_many(&sample_core(&elems), 4)?) } else { None };
    let big: Option<HashSet<MatKey>> = if core_like {
        None
    } else {
        let limits = BallLimits { max_len: 2 * bound, ..BallLimits::default() };
        Some(ball_with_limits(sub, 2 * bound, limits)?.iter().map(|e| e.matrix.key()).collect())
    };
    let contains = |g: &ProjMatrix| -> Result<bool> {
        // the ball holds an exact identity even when the group is float
        if g.is_identity() {
            return Ok(true);
        }
        if let Some(lat) = &lat {
            return match shape_of(g) {
                ShapeTag::CoreShape(x, y) => Ok(member(&pair_to_r4(&x, &y), lat)?.is_some()),
                _ => Ok(false),
            };
        }
        Ok(big.as_ref().unwrap().contains(&g.key()))
    };
    let mut checked = 0;
    for a in &whole.generators {
        for e in &elems {
            let t = conjugate(a, e);
            checked += 1;
            if !contains(&t)? {
                return Ok(NormalityReport { holds: false, checked, counterexample: Some((a.clone(), e.clone(), t)) });
            }
        }
    }
    Ok(NormalityReport { holds: true, checked, counterexample: None })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeWitness {
    /// The conjugator actually used (γ or γ⁻¹).
    pub gamma: ProjMatrix,
    pub inverted: bool,
    pub sequence: Vec<ProjMatrix>,
    /// d(τ_k, τ_K) for k < K.
    pub tail_distances: Vec<f64>,
    pub min_gap: f64,
    pub converging: bool,
}

const ESCAPE_GAP: f64 = 1e-6;

fn escape_run(gamma: &ProjMatrix, h: &ProjMatrix, steps: usize) -> (Vec<ProjMatrix>, Vec<f64>, f64, bool) {
    let mut seq = Vec::with_capacity(steps);
    let mut t = h.clone();
    for _ in 0..steps {
        t = conjugate(gamma, &t);
        seq.push(t.clone());
    }
    let last = seq.last().unwrap();
    let tail: Vec<f64> = seq[..seq.len() - 1].iter().map(|g| g.distance(last)).collect();
    let min_gap = seq.windows(2).map(|w| w[0].distance(&w[1])).fold(f64::INFINITY, f64::min);
    let distinct = seq.windows(2).all(|w| !proj_eq(&w[0], &w[1])) && !seq.iter().any(|g| proj_eq(g, h));
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let converging = distinct && decreasing && min_gap < ESCAPE_GAP;
    (seq, tail, min_gap, converging)
}

/// τ_k = γ^k h γ^{-k} for k = 1..=steps, retried with γ⁻¹ if the forward
/// sequence does not converge. Converging means pairwise distinct
/// consecutive terms, strictly decreasing distance to the last term, and a
/// consecutive gap below 1e-6.
pub fn escape_witness(gamma: &ProjMatrix, h: &ProjMatrix, steps: usize) -> Result<EscapeWitness> {
    if steps < 3 {
        return Err(Error::Invalid("escape sequence needs at least 3 steps".into()));
    }
    let (seq, tail, gap, ok) = escape_run(gamma, h, steps);
    if ok {
        return Ok(EscapeWitness { gamma: gamma.clone(), inverted: false, sequence: seq, tail_distances: tail, min_gap: gap, converging: true });
    }
    let inv = gamma.inverse();
    let (seq2, tail2, gap2, ok2) = escape_run(&inv, h, steps);
    if ok2 {
        return Ok(EscapeWitness { gamma: inv, inverted: true, sequence: seq2, tail_distances: tail2, min_gap: gap2, converging: true });
    }
    Ok(EscapeWitness { gamma: gamma.clone(), inverted: false, sequence: seq, tail_distances: tail, min_gap: gap, converging: false })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeReport {
    pub holds: bool,
    pub checked: usize,
    pub violations: Vec<String>,
}

/// Whether every element of ball(p, min(len, 3)) fixes e1 and maps each
/// line ker(0, x, y), (x, y) a core lattice vector, onto the line of a
/// vector in the ℚ-span of the lattice or a ℂ-multiple of a small lattice
/// vector. Points are sampled on each line and
/// tested to 1e-9 (100 points per line).
pub fn cone_invariance_check(p: &GroupPresentation, len: usize) -> Result<ConeReport> {
    cone_invariance_check_with(p, len, 100)
}

/// `cone_invariance_check` with `samples` points per line.
pub fn cone_invariance_check_with(p: &GroupPresentation, len: usize, samples: usize) -> Result<ConeReport> {
    let elems = ball(p, len.min(3))?;
    let lat = reduce_many(&sample_core(&ball(p, len.min(4))?), 4)?;
    let mut report = ConeReport { holds: true, checked: 0, violations: vec![] };
    if lat.rank == 0 {
        return Ok(report);
    }
    let dirs: Vec<(Scalar, Scalar)> =
        lat.basis.iter().map(|v| (Scalar::from_parts(&v[0], &v[1]), Scalar::from_parts(&v[2], &v[3]))).collect();
    let z = Scalar::zero;
    for g in &elems {
        report.checked += 1;
        let e1 = g.apply(&[Scalar::one(), z(), z()]);
        if !(e1[1].is_zero_at(e1[0].modulus()) && e1[2].is_zero_at(e1[0].modulus())) {
            report.holds = false;
            report.violations.push(format!("{g:?} moves e1"));
            continue;
        }
        for (x, y) in &dirs {
            let c = conjugate(g, &ProjMatrix::core(x.clone(), y.clone()));
            let ShapeTag::CoreShape(x2, y2) = shape_of(&c) else {
                report.holds = false;
                report.violations.push(format!("conjugate of core element by {g:?} is not Core-shaped"));
                continue;
            };
            if !in_cone_direction(&x2, &y2, &lat) {
                report.holds = false;
                report.violations.push(format!("direction ({x2}, {y2}) is not a multiple of a lattice vector"));
                continue;
            }
            // points e1 + t·(0, y, −x) on the line, mapped by g
            for t in sample_params(samples) {
                let pt = [Scalar::one(), &t * y, -(&t * x)];
                let im = g.apply(&pt);
                let val = &(&x2 * &im[1]) + &(&y2 * &im[2]);
                let scale = im.iter().map(Scalar::modulus).fold(0.0, f64::max) * x2.modulus().max(y2.modulus());
                if val.modulus() > 1e-9 * scale.max(1.0) {
                    report.holds = false;
                    report.violations.push(format!("{g:?} maps a point of the ({x}, {y}) line off the cone"));
                }
            }
        }
    }
    Ok(report)
}

/// Deterministic parameters t on a spiral, t₀ = 0.
fn sample_params(n: usize) -> Vec<Scalar> {
    (0..n)
        .map(|k| {
            if k == 0 {
                return Scalar::zero();
            }
            let r = k as f64 / 10.0;
            let th = 0.7 * k as f64;
            Scalar::float(r * th.cos(), r * th.sin())
        })
        .collect()
}

fn in_cone_direction(x: &Scalar, y: &Scalar, lat: &Lattice) -> bool {
    if in_rational_span(&pair_to_r4(x, y), lat) {
        return true;
    }
    let basis: Vec<(Scalar, Scalar)> =
        lat.basis.iter().map(|v| (Scalar::from_parts(&v[0], &v[1]), Scalar::from_parts(&v[2], &v[3]))).collect();
    let r = basis.len();
    let width = 7usize;
    for idx in 1..width.pow(r as u32) {
        let mut t = idx;
        let (mut u, mut v) = (Scalar::zero(), Scalar::zero());
        for (bx, by) in &basis {
            let a = Scalar::int((t % width) as i64 - 3);
            t /= width;
            u = &u + &(&a * bx);
            v = &v + &(&a * by);
        }
        if u.is_zero_at(0.0) && v.is_zero_at(0.0) {
            continue;
        }
        let cross = &(x * &v) - &(y * &u);
        let scale = x.modulus().max(y.modulus()) * u.modulus().max(v.modulus());
        if cross.modulus() <= 1e-9 * scale.max(1e-300) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn ball_sizes_abelian() {
        let p = GroupPresentation::new(vec![ProjMatrix::core_i(1, 0), ProjMatrix::core_i(0, 1)]);
        // ℤ²: 2ℓ² + 2ℓ + 1 points of l1-norm ≤ ℓ
        for l in 0..5 {
            assert_eq!(ball(&p, l).unwrap().len(), 2 * l * l + 2 * l + 1);
        }
    }

    #[test]
    fn ball_cap() {
        let p = GroupPresentation::new(vec![ProjMatrix::core_i(1, 0), ProjMatrix::diag(s("2"), s("1"), s("1")).unwrap()]);
        let lim = BallLimits { max_elements: 10, ..BallLimits::default() };
        assert_eq!(ball_with_limits(&p, 5, lim).unwrap_err(), Error::BallCap(10));
    }

    #[test]
    fn core_from_commutators() {
        // h_{1,0}, h_{0,1} commute to the identity; add a Layer2 element
        let a = ProjMatrix::from_ints([[1, 1, 0], [0, 1, 1], [0, 0, 1]]).unwrap();
        let p = GroupPresentation::new(vec![a, ProjMatrix::translation_i(1, 0)]);
        let lat = core_extract(&p, 4).unwrap();
        assert_eq!(lat.rank, 1);
    }

    #[test]
    fn escape_converges() {
        let g = ProjMatrix::new([[s("1/4"), s("0"), s("0")], [s("0"), s("2"), s("1")], [s("0"), s("0"), s("2")]]).unwrap();
        let w = escape_witness(&g, &ProjMatrix::translation_i(1, 1), 20).unwrap();
        assert!(w.converging && !w.inverted);
        assert!(proj_eq(&w.sequence[0], &ProjMatrix::translation(s("1/8"), s("1"))));
        let d = ProjMatrix::diag(s("6"), s("3"), s("2")).unwrap();
        let w = escape_witness(&d, &ProjMatrix::core_i(1, 0), 40).unwrap();
        assert!(w.converging && w.inverted);
        let w = escape_witness(&ProjMatrix::identity(), &ProjMatrix::core_i(1, 0), 10).unwrap();
        assert!(!w.converging);
    }

    #[test]
    fn normality_of_core() {
        let sub = GroupPresentation::new(vec![ProjMatrix::core_i(1, 0), ProjMatrix::core_i(0, 1)]);
        let g = ProjMatrix::new([[s("2"), s("0"), s("0")], [s("0"), s("1"), s("3/2")], [s("0"), s("0"), s("1")]]).unwrap();
        let mut whole = sub.clone();
        whole.push("γ", g);
        assert!(normality_check(&sub, &whole, 3).unwrap().holds);
        let mut bad = sub.clone();
        bad.push("δ", ProjMatrix::diag(s("1/2"), s("1"), s("1")).unwrap());
        assert!(!normality_check(&sub, &bad, 3).unwrap().holds);
    }

    #[test]
    fn layers_and_cone() {
        let g = ProjMatrix::new([[s("2"), s("0"), s("0")], [s("0"), s("1"), s("3/2")], [s("0"), s("0"), s("1")]]).unwrap();
        let p = GroupPresentation::new(vec![ProjMatrix::core_i(1, 0), ProjMatrix::core_i(0, 1), g]);
        let d = layer_decompose(&p, 4).unwrap();
        assert_eq!((d.k, d.r, d.m, d.n), (2, 0, 1, 0));
        assert!(d.diagnostics.is_empty());
        let c = cone_invariance_check(&p, 3).unwrap();
        assert!(c.holds, "{:?}", c.violations);
    }

    #[test]
    fn float_translation_subgroup_is_normal() {
        let g = crate::cases::inoue_from_integer_matrix([[0, 1, 0], [0, 0, 1], [1, 1, 0]]).unwrap();
        let sub = GroupPresentation::new(g.presentation.generators[..3].to_vec());
        let rep = normality_check(&sub, &g.presentation, 4).unwrap();
        assert!(rep.holds, "{:?}", rep.counterexample);
    }

    #[test]
    fn over_rank_diagnostic() {
        let f = |x: f64, y: f64, u: f64, v: f64| ProjMatrix::core(Scalar::float(x, y), Scalar::float(u, v));
        let gens = vec![f(1.0, 0.0, 0.0, 0.0), f(2f64.sqrt(), 0.0, 0.0, 0.0), f(0.0, 1.0, 0.0, 0.0), f(0.0, 0.0, 1.0, 0.0), f(0.0, 0.0, 0.0, 1.0)];
        let lim = BallLimits { max_gens: 5, ..BallLimits::default() };
        let d = layer_decompose_with(&GroupPresentation::new(gens), 2, lim).unwrap();
        assert_eq!(d.k, 5);
        assert!(d.diagnostics.iter().any(|m| m.contains("sum to 5")));
        assert!(d.diagnostics.iter().any(|m| m.contains("not discrete")));
    }
}
