//! Dual-mode arithmetic: exact rationals for certificates, floats for speed.
//!
//! Every quantity that flows through the reach engine is a [`Scalar`], which
//! is either a [`BigRational`] or an `f64`. The mode is fixed when a context
//! is built and never mixed afterwards; mixing modes in one expression is a
//! programming error and panics rather than silently coercing.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Euclid, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Which number system a context (and everything derived from it) uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithmeticMode {
    /// Arbitrary-precision rationals; comparisons are exact.
    Rational,
    /// Double-precision floats; comparisons use the context's slack `eta`.
    Float,
}

impl fmt::Display for ArithmeticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithmeticMode::Rational => write!(f, "rational"),
            ArithmeticMode::Float => write!(f, "float"),
        }
    }
}

impl std::str::FromStr for ArithmeticMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" | "exact" => Ok(ArithmeticMode::Rational),
            "float" | "f64" => Ok(ArithmeticMode::Float),
            other => Err(Error::Schema(format!(
                "unknown arithmetic mode '{other}' (use rational or float)"
            ))),
        }
    }
}

/// A number in one fixed arithmetic mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> ArithmeticMode {
        match self {
            Scalar::Rational(_) => ArithmeticMode::Rational,
            Scalar::Float(_) => ArithmeticMode::Float,
        }
    }

    pub fn zero(mode: ArithmeticMode) -> Self {
        match mode {
            ArithmeticMode::Rational => Scalar::Rational(BigRational::zero()),
            ArithmeticMode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: ArithmeticMode) -> Self {
        match mode {
            ArithmeticMode::Rational => Scalar::Rational(BigRational::one()),
            ArithmeticMode::Float => Scalar::Float(1.0),
        }
    }

    /// Exact small ratio `n / d` in the requested mode.
    pub fn ratio(n: i64, d: i64, mode: ArithmeticMode) -> Self {
        assert!(d != 0, "zero denominator");
        match mode {
            ArithmeticMode::Rational => {
                Scalar::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
            }
            ArithmeticMode::Float => Scalar::Float(n as f64 / d as f64),
        }
    }

    /// Converts a float into the requested mode. In rational mode the binary
    /// expansion of `x` is taken verbatim, so the result is exact but may
    /// carry a large power-of-two denominator; use [`rationalize`] first when
    /// a small denominator matters.
    pub fn from_f64(x: f64, mode: ArithmeticMode) -> Result<Self> {
        match mode {
            ArithmeticMode::Float => {
                if !x.is_finite() {
                    return Err(Error::Rationalize(x));
                }
                Ok(Scalar::Float(x))
            }
            ArithmeticMode::Rational => {
                let r = BigRational::from_float(x).ok_or(Error::Rationalize(x))?;
                Ok(Scalar::Rational(r))
            }
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Rational(r)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    /// Total order within one mode; floats use IEEE `total_cmp`.
    pub fn cmp_total(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.total_cmp(b),
            _ => panic!("scalar mode mismatch in comparison"),
        }
    }

    /// `self >= other`, up to slack `eta` in float mode, exact otherwise.
    pub fn ge_with(&self, other: &Scalar, eta: f64) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a >= b,
            (Scalar::Float(a), Scalar::Float(b)) => *a >= *b - eta,
            _ => panic!("scalar mode mismatch in comparison"),
        }
    }

    /// `self <= other`, up to slack `eta` in float mode, exact otherwise.
    pub fn le_with(&self, other: &Scalar, eta: f64) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a <= b,
            (Scalar::Float(a), Scalar::Float(b)) => *a <= *b + eta,
            _ => panic!("scalar mode mismatch in comparison"),
        }
    }

    /// Equality up to slack `eta` in float mode, exact otherwise.
    pub fn eq_with(&self, other: &Scalar, eta: f64) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => (a - b).abs() <= eta,
            _ => panic!("scalar mode mismatch in comparison"),
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if self.cmp_total(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if self.cmp_total(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

/// Converts a big rational to the nearest `f64` without overflowing on large
/// numerators or denominators.
pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale both parts down by a common power of two until they fit.
    let shift = (r.numer().bits().max(r.denom().bits()) as i64 - 900).max(0) as u64;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Rational(a), Scalar::Rational(b)) => {
                        Scalar::Rational(a.$method(b))
                    }
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a.$method(b)),
                    _ => panic!(concat!(
                        "scalar mode mismatch in ",
                        stringify!($method)
                    )),
                }
            }
        }

        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Rational(a), Scalar::Rational(b)) => {
                        Scalar::Rational(a.$method(b))
                    }
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a.$method(b)),
                    _ => panic!(concat!(
                        "scalar mode mismatch in ",
                        stringify!($method)
                    )),
                }
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);
impl_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => {
                // Round-trippable float formatting.
                let mut buf = ryu_format(*x);
                if !buf.contains(['.', 'e', 'n', 'i']) {
                    buf.push_str(".0");
                }
                f.write_str(&buf)
            }
        }
    }
}

fn ryu_format(x: f64) -> String {
    // `{}` on f64 is already shortest round-trippable in current Rust.
    format!("{x}")
}

/// Parses either a `num/den` ratio or a decimal literal, exactly.
///
/// Decimal literals are read digit by digit, so `"0.2"` becomes `1/5`, not
/// the nearest double. This is how populations enter rational-mode contexts
/// from files and the command line.
pub fn parse_exact_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Schema(format!("cannot parse '{s}' as an exact rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    // Split off a decimal exponent if present (e.g. 2.5e-3).
    let (mantissa, exp) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, i64::from_str(e).map_err(|_| bad())?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, fr)) => (i, fr),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits: String = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let numer = BigInt::from_str(&digits).map_err(|_| bad())? * BigInt::from(sign);
    let scale = frac_part.len() as i64 - exp;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::new(numer, ten.pow(scale as u32))
    } else {
        BigRational::from(numer * ten.pow((-scale) as u32))
    };
    Ok(r)
}

/// Parses a scalar in the requested mode. Rational mode accepts `num/den`
/// ratios and decimal literals (read exactly); float mode accepts anything
/// `f64::from_str` does, plus ratios.
pub fn parse_scalar(s: &str, mode: ArithmeticMode) -> Result<Scalar> {
    match mode {
        ArithmeticMode::Rational => Ok(Scalar::Rational(parse_exact_rational(s)?)),
        ArithmeticMode::Float => {
            if s.contains('/') {
                let r = parse_exact_rational(s)?;
                Ok(Scalar::Float(rational_to_f64(&r)))
            } else {
                let x = f64::from_str(s.trim())
                    .map_err(|_| Error::Schema(format!("cannot parse '{s}' as a float")))?;
                Ok(Scalar::Float(x))
            }
        }
    }
}

/// Finds the smallest-denominator rational within `rel_tol` of `x`.
///
/// The continued-fraction expansion of the exact binary value of `x` is
/// walked with integer arithmetic only, and the first convergent that lands
/// within the requested relative distance is returned. For `x` already equal
/// to a small ratio (up to double rounding) this recovers that ratio; for
/// transcendental values it returns a compact approximant instead of the
/// 50-odd-digit power-of-two expansion of the raw double.
pub fn rationalize(x: f64, rel_tol: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Rationalize(x));
    }
    if !rel_tol.is_finite() || rel_tol <= 0.0 {
        return Err(Error::BadTolerance(rel_tol));
    }
    if x == 0.0 {
        return Ok(BigRational::zero());
    }
    let target = BigRational::from_float(x).ok_or(Error::Rationalize(x))?;
    let tol = BigRational::from_float(rel_tol).ok_or(Error::BadTolerance(rel_tol))?;
    let bound = target.abs() * tol;

    // Continued-fraction state: tail = p/q, convergents h/k seeded with the
    // (0, 1) and (1, 0) sentinels of the standard recurrence.
    let mut p = target.numer().clone();
    let mut q = target.denom().clone();
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    loop {
        let a = Euclid::div_euclid(&p, &q);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let conv = BigRational::new(h.clone(), k.clone());
        let rem = &p - &a * &q;
        if rem.is_zero() || (&conv - &target).abs() <= bound {
            return Ok(conv);
        }
        p = std::mem::replace(&mut q, rem);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_decimal_parsing() {
        assert_eq!(parse_exact_rational("0.2").unwrap(), rat(1, 5));
        assert_eq!(parse_exact_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_exact_rational("3/7").unwrap(), rat(3, 7));
        assert_eq!(parse_exact_rational("2.5e-3").unwrap(), rat(1, 400));
        assert_eq!(parse_exact_rational("12").unwrap(), rat(12, 1));
        assert!(parse_exact_rational("1/0").is_err());
        assert!(parse_exact_rational("abc").is_err());
    }

    #[test]
    fn rationalize_recovers_small_ratios() {
        assert_eq!(rationalize(0.2, 1e-12).unwrap(), rat(1, 5));
        assert_eq!(rationalize(1.0 / 3.0, 1e-12).unwrap(), rat(1, 3));
        assert_eq!(rationalize(-7.0 / 11.0, 1e-12).unwrap(), rat(-7, 11));
        assert_eq!(rationalize(0.0, 1e-12).unwrap(), BigRational::zero());
        // A dyadic double is already exact, so tightening the tolerance
        // cannot push past it.
        assert_eq!(rationalize(0.375, 1e-300).unwrap(), rat(3, 8));
    }

    #[test]
    fn rationalize_is_within_tolerance() {
        for &x in &[std::f64::consts::E, std::f64::consts::PI, 1e-7, 123.456] {
            for &tol in &[1e-3, 1e-9, 1e-15] {
                let r = rationalize(x, tol).unwrap();
                let err = (rational_to_f64(&r) - x).abs() / x.abs();
                assert!(err <= tol * (1.0 + 1e-12), "x={x} tol={tol} err={err}");
            }
        }
    }

    #[test]
    fn rationalize_denominators_stay_small() {
        // A convergent within 1e-9 of e needs only a modest denominator;
        // the raw double would need 2^52.
        let r = rationalize(std::f64::consts::E, 1e-9).unwrap();
        assert!(r.denom() < &BigInt::from(200_000), "denom={}", r.denom());
    }

    #[test]
    fn scalar_ops_respect_mode() {
        let a = Scalar::ratio(1, 3, ArithmeticMode::Rational);
        let b = Scalar::ratio(1, 6, ArithmeticMode::Rational);
        assert_eq!(&a + &b, Scalar::ratio(1, 2, ArithmeticMode::Rational));
        assert_eq!(&a - &b, b.clone());
        let x = Scalar::ratio(1, 4, ArithmeticMode::Float);
        assert_eq!((&x + &x).to_f64(), 0.5);
    }

    #[test]
    #[should_panic(expected = "mode mismatch")]
    fn cross_mode_add_panics() {
        let a = Scalar::ratio(1, 3, ArithmeticMode::Rational);
        let b = Scalar::ratio(1, 3, ArithmeticMode::Float);
        let _ = &a + &b;
    }

    #[test]
    fn display_round_trips() {
        let r = Scalar::ratio(-3, 7, ArithmeticMode::Rational);
        assert_eq!(r.to_string(), "-3/7");
        assert_eq!(
            parse_scalar("-3/7", ArithmeticMode::Rational).unwrap(),
            r
        );
        let x = Scalar::Float(0.1);
        assert_eq!(x.to_string(), "0.1");
        let whole = Scalar::Float(2.0);
        assert_eq!(whole.to_string(), "2.0");
    }
}
