use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{AlgebraError, Poly};
use crate::scalar::Scalar;

/// Rational function `num / den`.
///
/// Over an exact scalar the pair is kept canonical: common factors removed and
/// the denominator monic, so `==` decides equality of functions. Over floats
/// only the denominator is made monic.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFun<T> {
    num: Poly<T>,
    den: Poly<T>,
}

impl<T: Scalar> RatFun<T> {
    pub fn new(num: Poly<T>, den: Poly<T>) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Poly<T>, den: Poly<T>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if T::EXACT {
            let g = num.gcd(&den);
            if g.degree() == Some(0) {
                (num, den)
            } else {
                (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
            }
        } else {
            (num, den)
        };
        let lc = den.leading().expect("non-zero denominator").clone();
        let inv = T::one() / lc;
        RatFun { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn from_poly(p: Poly<T>) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn constant(c: T) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn z() -> Self {
        Self::from_poly(Poly::z())
    }

    pub fn num(&self) -> &Poly<T> {
        &self.num
    }

    pub fn den(&self) -> &Poly<T> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::canonical(self.num.scale(c), self.den.clone())
    }

    /// `f(c z)`.
    pub fn dilate(&self, c: &T) -> Self {
        Self::canonical(self.num.dilate(c), self.den.dilate(c))
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::canonical(n, &self.den * &self.den)
    }

    pub fn eval(&self, x: &T) -> Result<T, AlgebraError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(AlgebraError::Pole);
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    /// Coefficients `c_0..=c_{n_max}` of the expansion `Σ c_n z^{-n}`.
    pub fn series_coeffs(&self, n_max: usize) -> Result<Vec<T>, AlgebraError> {
        let mut out = vec![T::zero(); n_max + 1];
        if self.is_zero() {
            return Ok(out);
        }
        let dn = self.num.degree().expect("non-zero");
        let dd = self.den.degree().expect("non-zero");
        if dn > dd {
            return Err(AlgebraError::Improper { num: dn, den: dd });
        }
        // in w = 1/z: f = w^(dd-dn) * rev(num)(w) / rev(den)(w)
        let nrev: Vec<T> = self.num.coeffs().iter().rev().cloned().collect();
        let drev: Vec<T> = self.den.coeffs().iter().rev().cloned().collect();
        let offset = dd - dn;
        let d0 = drev[0].clone();
        let mut q: Vec<T> = Vec::with_capacity(n_max + 1);
        for k in 0..=n_max {
            if k < offset {
                q.push(T::zero());
                continue;
            }
            let j = k - offset;
            let mut acc = nrev.get(j).cloned().unwrap_or_else(T::zero);
            for (i, d) in drev.iter().enumerate().skip(1) {
                if i > j {
                    break;
                }
                acc = acc - d.clone() * q[k - i].clone();
            }
            q.push(acc / d0.clone());
        }
        out.clone_from_slice(&q);
        Ok(out)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> RatFun<U> {
        RatFun::canonical(self.num.map(&f), self.den.map(&f))
    }
}

impl<T: Scalar> Zero for RatFun<T> {
    fn zero() -> Self {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<T: Scalar> One for RatFun<T> {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl<T: Scalar> From<Poly<T>> for RatFun<T> {
    fn from(p: Poly<T>) -> Self {
        Self::from_poly(p)
    }
}

impl<T: Scalar> Add for &RatFun<T> {
    type Output = RatFun<T>;
    fn add(self, rhs: &RatFun<T>) -> RatFun<T> {
        if self.den == rhs.den {
            return RatFun::canonical(&self.num + &rhs.num, self.den.clone());
        }
        RatFun::canonical(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl<T: Scalar> Sub for &RatFun<T> {
    type Output = RatFun<T>;
    fn sub(self, rhs: &RatFun<T>) -> RatFun<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &RatFun<T> {
    type Output = RatFun<T>;
    fn mul(self, rhs: &RatFun<T>) -> RatFun<T> {
        if self.is_zero() || rhs.is_zero() {
            return RatFun::zero();
        }
        RatFun::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics when dividing by zero; use [`RatFun::inv`] for a checked version.
impl<T: Scalar> Div for &RatFun<T> {
    type Output = RatFun<T>;
    fn div(self, rhs: &RatFun<T>) -> RatFun<T> {
        self * &rhs.inv().expect("division by the zero rational function")
    }
}

impl<T: Scalar> Neg for &RatFun<T> {
    type Output = RatFun<T>;
    fn neg(self) -> RatFun<T> {
        RatFun { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for RatFun<T> {
            type Output = RatFun<T>;
            fn $m(self, rhs: RatFun<T>) -> RatFun<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl<T: Scalar> Neg for RatFun<T> {
    type Output = RatFun<T>;
    fn neg(self) -> RatFun<T> {
        -&self
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for RatFun<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeff(0).is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
