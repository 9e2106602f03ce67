//! Gaussian rationals with a float fallback.
//!
//! Exact values live in ℚ(i). Anything irrational (square roots, eigenvectors
//! of integer matrices, logarithms) is carried as a `Complex64`. Binary
//! operations between the two promote to float.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

static REL_TOL: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9
static ABS_TOL: AtomicU64 = AtomicU64::new(0x3D71_9799_812D_EA11); // 1e-12

/// Float comparison policy. Every approximate comparison in the crate reads it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub rel: f64,
    pub abs: f64,
}

impl Tol {
    pub fn current() -> Tol {
        Tol {
            rel: f64::from_bits(REL_TOL.load(Ordering::Relaxed)),
            abs: f64::from_bits(ABS_TOL.load(Ordering::Relaxed)),
        }
    }

    /// Replace the process-wide policy. Intended for the CLI `--tol` flag.
    pub fn install(self) {
        REL_TOL.store(self.rel.to_bits(), Ordering::Relaxed);
        ABS_TOL.store(self.abs.to_bits(), Ordering::Relaxed);
    }

    pub fn close(&self, a: f64, b: f64, scale: f64) -> bool {
        (a - b).abs() <= self.abs.max(self.rel * scale)
    }
}

impl Default for Tol {
    fn default() -> Self {
        Tol { rel: 1e-9, abs: 1e-12 }
    }
}

#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(Q, Q),
    Float(Complex64),
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator and denominator may each overflow f64 even if the ratio does not
        let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000) as usize;
        let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Exact(Q::zero(), Q::zero())
    }
    pub fn one() -> Scalar {
        Scalar::int(1)
    }
    pub fn i() -> Scalar {
        Scalar::Exact(Q::zero(), Q::one())
    }
    pub fn int(n: i64) -> Scalar {
        Scalar::Exact(qi(n), Q::zero())
    }
    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::Exact(q(n, d), Q::zero())
    }
    pub fn gauss(re: Q, im: Q) -> Scalar {
        Scalar::Exact(re, im)
    }
    pub fn real(re: Q) -> Scalar {
        Scalar::Exact(re, Q::zero())
    }
    pub fn bigint(n: BigInt) -> Scalar {
        Scalar::Exact(Q::from_integer(n), Q::zero())
    }
    pub fn float(re: f64, im: f64) -> Scalar {
        Scalar::Float(Complex64::new(re, im))
    }
    pub fn from_c64(z: Complex64) -> Scalar {
        Scalar::Float(z)
    }

    /// re + i·im for real-valued `re`, `im`.
    pub fn from_parts(re: &Scalar, im: &Scalar) -> Scalar {
        re + &(&Scalar::i() * im)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(..))
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(a, b) => Complex64::new(q_to_f64(a), q_to_f64(b)),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_c64())
    }

    pub fn re_f64(&self) -> f64 {
        self.to_c64().re
    }
    pub fn im_f64(&self) -> f64 {
        self.to_c64().im
    }

    pub fn re(&self) -> Scalar {
        match self {
            Scalar::Exact(a, _) => Scalar::real(a.clone()),
            Scalar::Float(z) => Scalar::float(z.re, 0.0),
        }
    }
    pub fn im(&self) -> Scalar {
        match self {
            Scalar::Exact(_, b) => Scalar::real(b.clone()),
            Scalar::Float(z) => Scalar::float(z.im, 0.0),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(a, b) => Scalar::Exact(a.clone(), -b),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// |z|², exact when possible.
    pub fn norm_sqr(&self) -> Scalar {
        match self {
            Scalar::Exact(a, b) => Scalar::real(a * a + b * b),
            Scalar::Float(z) => Scalar::float(z.norm_sqr(), 0.0),
        }
    }

    pub fn modulus(&self) -> f64 {
        match self {
            Scalar::Exact(a, b) => Complex64::new(q_to_f64(a), q_to_f64(b)).norm(),
            Scalar::Float(z) => z.norm(),
        }
    }

    /// Zero test. Float values are compared against `scale` using the policy.
    pub fn is_zero_at(&self, scale: f64) -> bool {
        match self {
            Scalar::Exact(a, b) => a.is_zero() && b.is_zero(),
            Scalar::Float(z) => {
                let t = Tol::current();
                z.norm() <= t.abs.max(t.rel * scale)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero_at(1.0)
    }

    pub fn is_one(&self) -> bool {
        self.approx_eq(&Scalar::one())
    }

    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a, b), Scalar::Exact(c, d)) => a == c && b == d,
            _ => {
                let (x, y) = (self.to_c64(), other.to_c64());
                let t = Tol::current();
                (x - y).norm() <= t.abs.max(t.rel * x.norm().max(y.norm()))
            }
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact(_, b) => b.is_zero(),
            Scalar::Float(z) => {
                let t = Tol::current();
                z.im.abs() <= t.abs.max(t.rel * z.norm())
            }
        }
    }

    /// Rational integer value, if this is one (floats within tolerance).
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Exact(a, b) => (b.is_zero() && a.is_integer()).then(|| a.to_integer()),
            Scalar::Float(z) => {
                let r = z.re.round();
                let t = Tol::current();
                let ok = t.close(z.re, r, r.abs().max(1.0)) && z.im.abs() <= t.rel.max(t.abs) * r.abs().max(1.0);
                if ok && r.abs() < 9.0e15 {
                    Some(BigInt::from(r as i64))
                } else {
                    None
                }
            }
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }

    pub fn is_integer(&self) -> bool {
        self.as_integer().is_some()
    }

    /// Exact rational real value.
    pub fn as_rational(&self) -> Option<Q> {
        match self {
            Scalar::Exact(a, b) if b.is_zero() => Some(a.clone()),
            _ => None,
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(a, b) => {
                let n = a * a + b * b;
                if n.is_zero() {
                    return Err(Error::NotInvertible);
                }
                Ok(Scalar::Exact(a / &n, -b / &n))
            }
            Scalar::Float(z) => {
                if z.norm() == 0.0 {
                    return Err(Error::NotInvertible);
                }
                Ok(Scalar::Float(z.inv()))
            }
        }
    }

    pub fn pow(&self, e: i64) -> Scalar {
        let mut base = if e < 0 { self.inv().expect("power of zero") } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Scalar::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Principal square root. Exact when the input is the square of a
    /// Gaussian rational that this routine can find.
    pub fn sqrt(&self) -> Scalar {
        if let Some(r) = self.exact_root(2) {
            return r;
        }
        Scalar::Float(self.to_c64().sqrt())
    }

    /// Principal cube root, exact when available.
    pub fn cbrt(&self) -> Scalar {
        if let Some(r) = self.exact_root(3) {
            return r;
        }
        Scalar::Float(self.to_c64().powf(1.0 / 3.0))
    }

    /// An exact n-th root in ℚ(i), found by rationalizing each float candidate
    /// root and checking it.
    pub fn exact_root(&self, n: u32) -> Option<Scalar> {
        if !self.is_exact() {
            return None;
        }
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        let z = self.to_c64();
        let r = z.norm().powf(1.0 / n as f64);
        let th = z.arg();
        let mut found: Vec<Scalar> = Vec::new();
        for k in 0..n {
            let ang = (th + 2.0 * std::f64::consts::PI * k as f64) / n as f64;
            let c = Complex64::from_polar(r, ang);
            let (Some(a), Some(b)) = (rationalize(c.re, 1 << 20), rationalize(c.im, 1 << 20)) else {
                continue;
            };
            let cand = Scalar::Exact(a, b);
            if &cand.pow(n as i64) == self {
                found.push(cand);
            }
        }
        // prefer the root closest to the principal one
        let principal = z.powf(1.0 / n as f64);
        found.into_iter().min_by(|a, b| {
            let da = (a.to_c64() - principal).norm();
            let db = (b.to_c64() - principal).norm();
            da.partial_cmp(&db).unwrap()
        })
    }
}

/// Best rational approximation with denominator at most `max_den`, accepted
/// only if it matches `x` to near machine precision.
pub fn rationalize(x: f64, max_den: i64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (n, d) = best_rational(x, max_den)?;
    let back = n as f64 / d as f64;
    if (back - x).abs() <= 1e-12 * x.abs().max(1.0) {
        Some(q(n, d))
    } else {
        None
    }
}

/// Continued-fraction convergent of `x` with denominator ≤ `max_den`.
pub fn best_rational(x: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
        if !v.is_finite() {
            break;
        }
    }
    if k1 == 0 {
        return None;
    }
    Some((h1 as i64, k1 as i64))
}

macro_rules! binop {
    ($tr:ident, $m:ident, $exact:expr, $float:expr) => {
        impl<'a, 'b> $tr<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'b Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a, b), Scalar::Exact(c, d)) => {
                        let f: fn(&Q, &Q, &Q, &Q) -> (Q, Q) = $exact;
                        let (x, y) = f(a, b, c, d);
                        Scalar::Exact(x, y)
                    }
                    _ => {
                        let f: fn(Complex64, Complex64) -> Complex64 = $float;
                        Scalar::Float(f(self.to_c64(), rhs.to_c64()))
                    }
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

// Zero components are common (real scalars, triangular matrices), and
// skipping them avoids most of the gcd work in exact arithmetic.
fn q_add(a: &Q, b: &Q) -> Q {
    if a.is_zero() {
        b.clone()
    } else if b.is_zero() {
        a.clone()
    } else {
        a + b
    }
}

fn q_mul(a: &Q, b: &Q) -> Q {
    if a.is_zero() || b.is_zero() {
        Q::zero()
    } else {
        a * b
    }
}

fn exact_mul(a: &Q, b: &Q, c: &Q, d: &Q) -> (Q, Q) {
    if b.is_zero() && d.is_zero() {
        return (q_mul(a, c), Q::zero());
    }
    (q_add(&q_mul(a, c), &-q_mul(b, d)), q_add(&q_mul(a, d), &q_mul(b, c)))
}

binop!(Add, add, |a, b, c, d| (q_add(a, c), q_add(b, d)), |x, y| x + y);
binop!(Sub, sub, |a, b, c, d| (q_add(a, &-c), q_add(b, &-d)), |x, y| x - y);
binop!(Mul, mul, exact_mul, |x, y| x * y);

impl<'a, 'b> Div<&'b Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'b Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero")
    }
}
impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}
impl<'a> Div<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        &self / rhs
    }
}
impl<'a> Div<Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a, b) => Scalar::Exact(-a, -b),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for Scalar {
    /// Exact values render as `a/b+c/di`; floats as `re+imi` with shortest
    /// round-trip digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(a, b) => {
                if b.is_zero() {
                    write!(f, "{}", fmt_q(a))
                } else if a.is_zero() {
                    write!(f, "{}i", fmt_q(b))
                } else if b.is_negative() {
                    write!(f, "{}-{}i", fmt_q(a), fmt_q(&-b))
                } else {
                    write!(f, "{}+{}i", fmt_q(a), fmt_q(b))
                }
            }
            Scalar::Float(z) => write!(f, "[{:?}, {:?}]", z.re, z.im),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = parse_decimal(n).and_then(|x| x.is_integer().then(|| x.to_integer())).ok_or_else(bad)?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    parse_decimal(s).ok_or_else(bad)
}

/// Integers and terminating decimals, read exactly.
fn parse_decimal(s: &str) -> Option<Q> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if fp.contains('.') || (ip.is_empty() && fp.is_empty()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let d = num_traits::pow(BigInt::from(10), fp.len());
    let v = Q::new(n, d);
    Some(if neg { -v } else { v })
}

impl std::str::FromStr for Scalar {
    type Err = Error;

    /// Accepts `3`, `-1/2`, `i`, `-2i`, `1/2-3/4i`, `1.5+i`.
    fn from_str(s: &str) -> Result<Scalar> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Scalar::real(parse_q(&t)?));
        };
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let im = match im {
            "" | "+" => Q::one(),
            "-" => -Q::one(),
            x => parse_q(x)?,
        };
        let re = if re.is_empty() { Q::zero() } else { parse_q(re)? };
        Ok(Scalar::Exact(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_print_roundtrip() {
        for s in ["0", "3", "-1/2", "1i", "-2i", "1/2-3/4i", "7+1/3i"] {
            let v: Scalar = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("i".parse::<Scalar>().unwrap(), Scalar::i());
        assert_eq!("-i".parse::<Scalar>().unwrap(), -Scalar::i());
        assert_eq!("1.5".parse::<Scalar>().unwrap(), Scalar::ratio(3, 2));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn gaussian_arithmetic() {
        let a: Scalar = "1+i".parse().unwrap();
        assert_eq!(&a * &a, Scalar::int(2) * Scalar::i());
        assert_eq!(a.inv().unwrap(), "1/2-1/2i".parse().unwrap());
        assert_eq!(a.pow(-2), "-1/2i".parse().unwrap());
    }

    #[test]
    fn mixed_promotes() {
        let s = Scalar::int(2) + Scalar::float(0.5, 0.0);
        assert!(!s.is_exact());
        assert!(s.approx_eq(&Scalar::ratio(5, 2)));
    }

    #[test]
    fn exact_roots() {
        assert_eq!(Scalar::int(8).cbrt(), Scalar::int(2));
        assert_eq!(Scalar::ratio(1, 64).cbrt(), Scalar::ratio(1, 4));
        assert_eq!(Scalar::int(-4).sqrt(), Scalar::int(2) * Scalar::i());
        assert!(!Scalar::int(2).sqrt().is_exact());
    }

    #[test]
    fn default_policy() {
        assert_eq!(Tol::current(), Tol::default());
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(best_rational(0.25, 1000), Some((1, 4)));
        assert_eq!(best_rational(-2.0 / 3.0, 1000), Some((-2, 3)));
        assert!(rationalize(2f64.sqrt(), 1_000_000).is_none());
    }
}
