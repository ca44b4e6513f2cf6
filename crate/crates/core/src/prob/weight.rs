use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Scalar type for probabilities and expectations.
///
/// [`Rational`] is the exact mode used everywhere by default; `f64` is the
/// opt-in floating mode for larger case studies.
pub trait Weight: Clone + PartialEq + PartialOrd + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_count(n: usize) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether `self` equals one: exactly for rationals, within 1e-9 for floats.
    fn is_unit_total(&self) -> bool;
    /// Exact rational value when the mode is exact.
    fn as_rational(&self) -> Option<Rational>;
    fn to_prob_string(&self) -> String;
    fn is_exact() -> bool;
}

impl Weight for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_count(n: usize) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_unit_total(&self) -> bool {
        One::is_one(self)
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn to_prob_string(&self) -> String {
        format_rational(self)
    }
    fn is_exact() -> bool {
        true
    }
}

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn from_count(n: usize) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_unit_total(&self) -> bool {
        (self - 1.0).abs() <= 1e-9
    }
    fn as_rational(&self) -> Option<Rational> {
        None
    }
    fn to_prob_string(&self) -> String {
        format!("{self}")
    }
    fn is_exact() -> bool {
        false
    }
}

/// Formats as `num/den`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses a nonnegative rational written as `num/den`, an integer, or a
/// decimal such as `0.9` (converted exactly).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Format(format!("invalid rational literal `{text}`"));
    if t.is_empty() || t.starts_with('-') || t.starts_with('+') {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() || d.is_negative() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if !int.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || (int.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    if !t.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    Ok(Rational::from_integer(BigInt::from_str(t).map_err(|_| bad())?))
}

/// Parses a probability and checks it lies in `[0, 1]`.
pub fn parse_probability(text: &str) -> Result<Rational> {
    let r = parse_rational(text).map_err(|_| Error::Probability(text.to_string()))?;
    check_probability(&r)?;
    Ok(r)
}

pub fn check_probability(r: &Rational) -> Result<()> {
    if r.is_negative() || r > &<Rational as One>::one() {
        return Err(Error::Probability(format_rational(r)));
    }
    Ok(())
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A nonnegative value that may be infinite; the codomain of queries.
#[derive(Debug, Clone, PartialEq)]
pub enum Extended<W> {
    Finite(W),
    Infinite,
}

impl<W: Weight> Extended<W> {
    pub fn zero() -> Self {
        Extended::Finite(W::zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a.add(b)),
            _ => Extended::Infinite,
        }
    }

    /// Scales by a weight; `0 · ∞ = 0`.
    pub fn scale(&self, w: &W) -> Self {
        match self {
            Extended::Finite(a) => Extended::Finite(a.mul(w)),
            Extended::Infinite if w.is_zero() => Extended::Finite(W::zero()),
            Extended::Infinite => Extended::Infinite,
        }
    }

    pub fn finite(&self) -> Option<&W> {
        match self {
            Extended::Finite(w) => Some(w),
            Extended::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(w) => w.to_f64(),
            Extended::Infinite => f64::INFINITY,
        }
    }
}

impl<W: Weight> PartialOrd for Extended<W> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
            (Extended::Infinite, Extended::Infinite) => Some(Equal),
            (Extended::Infinite, _) => Some(Greater),
            (_, Extended::Infinite) => Some(Less),
        }
    }
}
