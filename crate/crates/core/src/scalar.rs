//! Scalar abstraction shared by the polynomial, matrix and measure code.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A field element the algebra can be instantiated over.
///
/// `f32`/`f64` give fast approximate pipelines, [`BigRational`] the exact one.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + FromPrimitive + ToPrimitive
{
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    /// Equality up to an absolute tolerance; exact types ignore `tol`.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            match (self.to_f64(), other.to_f64()) {
                (Some(a), Some(b)) => (a - b).abs() <= tol,
                _ => false,
            }
        }
    }

    fn from_u128(v: u128) -> Self {
        <Self as FromPrimitive>::from_u128(v).expect("integer fits the scalar type")
    }

    fn from_rational(q: &BigRational) -> Self;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q) as f32
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

/// Converts a big rational to the nearest-ish `f64`, also for huge numerators/denominators.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // shift both to ~60 significant bits
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled: BigInt = if shift >= 0 {
        q.numer() / (q.denom() << (shift as usize))
    } else {
        (q.numer() << ((-shift) as usize)) / q.denom()
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

/// Integer-valued rational.
pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `num/den` as an exact rational; panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational approximation of a finite float.
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Whether a rational is an integer.
pub fn is_integer(q: &BigRational) -> bool {
    q.is_integer()
}

pub(crate) fn sign_of(q: &BigRational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}
