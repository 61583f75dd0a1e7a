//! Scalar backends.
//!
//! Every algebraic routine in this crate is generic over [`Field`]. Two
//! backends implement it: [`Rational`] (arbitrary precision, always in
//! lowest terms) and `f64`. [`Scalar`] is the dynamically tagged value used
//! at I/O boundaries; mixing tags promotes to floating and the result
//! remembers that it was promoted.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number. `num_rational` keeps it reduced with a positive
/// denominator.
pub type Rational = BigRational;

pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn is_exact(&self) -> bool;

    /// Zero test. Exact values ignore `tol`.
    fn is_zero_within(&self, tol: f64) -> bool {
        if self.is_exact() {
            self.is_zero()
        } else {
            self.to_f64().abs() <= tol
        }
    }

    /// Sign with a dead band of width `tol` on floating values.
    fn sign_within(&self, tol: f64) -> i8;

    /// Used for partial pivoting.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Field for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_exact(&self) -> bool {
        true
    }
    fn sign_within(&self, _tol: f64) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl Field for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_exact(&self) -> bool {
        false
    }
    fn sign_within(&self, tol: f64) -> i8 {
        if self.abs() <= tol {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let den = BigInt::from_str(den).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Best rational approximation used when a caller asks to lift a float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Tagged scalar for I/O and mixed computations.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Rational),
    Float { value: f64, promoted: bool },
}

impl Scalar {
    pub fn float(value: f64) -> Self {
        Scalar::Float { value, promoted: false }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float { .. } => None,
        }
    }

    /// True when this value was produced by an operation that mixed an
    /// exact and a floating operand (or descends from one).
    pub fn was_promoted(&self) -> bool {
        matches!(self, Scalar::Float { promoted: true, .. })
    }

    fn combine(
        self,
        rhs: Scalar,
        exact: impl FnOnce(Rational, Rational) -> Rational,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            (Scalar::Float { value: a, promoted: pa }, Scalar::Float { value: b, promoted: pb }) => {
                Scalar::Float { value: float(a, b), promoted: pa || pb }
            }
            (Scalar::Exact(a), Scalar::Float { value: b, .. }) => Scalar::Float {
                value: float(Field::to_f64(&a), b),
                promoted: true,
            },
            (Scalar::Float { value: a, .. }, Scalar::Exact(b)) => Scalar::Float {
                value: float(a, Field::to_f64(&b)),
                promoted: true,
            },
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float { value, .. } => write!(f, "{value:.16e}"),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => Field::to_f64(self) == Field::to_f64(other),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::float(x)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.combine(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.combine(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.combine(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self.combine(rhs, |a, b| a / b, |a, b| a / b)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float { value, promoted } => Scalar::Float { value: -value, promoted },
        }
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float { value, .. } => *value == 0.0,
        }
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::Exact(Rational::one())
    }
}

impl Field for Scalar {
    fn from_i64(n: i64) -> Self {
        Scalar::Exact(int(n))
    }
    fn from_rational(r: &Rational) -> Self {
        Scalar::Exact(r.clone())
    }
    fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => Field::to_f64(r),
            Scalar::Float { value, .. } => *value,
        }
    }
    fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }
    fn sign_within(&self, tol: f64) -> i8 {
        match self {
            Scalar::Exact(r) => r.sign_within(tol),
            Scalar::Float { value, .. } => value.sign_within(tol),
        }
    }
}
