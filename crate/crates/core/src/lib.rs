//! Multigraph edge shifts built from a forbidden word collection and a
//! repeated word collection with multiplicities.

pub mod genfun;
pub mod langmodel;
pub mod measures;
pub mod ratfield;
pub mod scalar;
pub mod specfile;
pub mod spectral;
pub mod verify;
pub mod words;

use num_rational::BigRational;

pub use scalar::Scalar;

pub type Rational = BigRational;
pub type QPoly = ratfield::Poly<Rational>;
pub type QRatFun = ratfield::RatFun<Rational>;
pub type QRatMat = ratfield::RatMat<Rational>;
pub type FPoly = ratfield::Poly<f64>;
pub type FRatFun = ratfield::RatFun<f64>;
