//! Exact algebra: polynomials, rational functions, matrices over the
//! rational-function field, power series in `1/z`, and real root isolation.

mod matrix;
mod poly;
mod ratfun;
mod roots;
mod serial;

pub use matrix::RatMat;
pub use poly::Poly;
pub use ratfun::RatFun;
pub use roots::{largest_real_root, largest_real_zero, sturm_count, vanishes_at, RootCertificate};
pub use serial::{format_rational, parse_rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division left a remainder")]
    InexactDivision,
    #[error("matrix is singular over the rational-function field")]
    Singular,
    #[error("matrix dimensions do not match ({0})")]
    Shape(String),
    #[error("rational function is not proper in 1/z (numerator degree {num} > denominator degree {den})")]
    Improper { num: usize, den: usize },
    #[error("no real root in the bracket [{lo}, {hi}]")]
    NoRoot { lo: String, hi: String },
    #[error("pole at the evaluation point")]
    Pole,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}
