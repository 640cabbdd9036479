use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{AlgebraError, Poly, RatFun};
use crate::scalar::{rational_to_f64, sign_of};

const WIDTH: f64 = 1e-19;

/// Largest real root located in `(lo, hi]`, with its exact isolating interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootCertificate {
    pub value: f64,
    #[serde(serialize_with = "super::serial::ser_rational")]
    pub lo: BigRational,
    #[serde(serialize_with = "super::serial::ser_rational")]
    pub hi: BigRational,
    /// Set when the root is a rational number verified by exact evaluation.
    #[serde(serialize_with = "super::serial::ser_opt_rational")]
    pub exact: Option<BigRational>,
}

impl RootCertificate {
    pub fn contains(&self, x: f64) -> bool {
        rational_to_f64(&self.lo) <= x && x <= rational_to_f64(&self.hi)
    }
}

fn sturm_chain(p: &Poly<BigRational>) -> Vec<Poly<BigRational>> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]).expect("non-zero");
        if r.is_zero() {
            break;
        }
        // positive rescaling keeps the sign pattern and the coefficients small
        let neg = -&r;
        let inv = BigRational::one() / neg.leading().expect("non-zero").abs();
        chain.push(neg.scale(&inv));
    }
    chain
}

fn variations(chain: &[Poly<BigRational>], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in chain {
        let s = sign_of(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn sturm_count(p: &Poly<BigRational>, lo: &BigRational, hi: &BigRational) -> usize {
    let sf = p.square_free();
    if sf.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let chain = sturm_chain(&sf);
    variations(&chain, lo).saturating_sub(variations(&chain, hi))
}

fn cauchy_bound(p: &Poly<BigRational>) -> BigRational {
    let lc = p.leading().expect("non-zero").abs();
    let m = p
        .coeffs()
        .iter()
        .take(p.coeffs().len() - 1)
        .map(|c| c.abs() / lc.clone())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    m + BigRational::one()
}

/// Largest real root of the polynomial in `(lo, hi]`; `hi` defaults to a Cauchy bound.
///
/// Sturm sequences on the square-free part isolate it, bisection narrows the
/// interval to width at most `2^-64`, and nearby rationals with small
/// denominators are tested exactly.
pub fn largest_real_root(
    p: &Poly<BigRational>,
    lo: &BigRational,
    hi: Option<&BigRational>,
) -> Result<RootCertificate, AlgebraError> {
    let no_root = |hi: &BigRational| AlgebraError::NoRoot { lo: lo.to_string(), hi: hi.to_string() };
    let sf = p.square_free();
    let bound = if sf.degree().unwrap_or(0) == 0 { lo.clone() } else { cauchy_bound(&sf) };
    let hi = hi.cloned().unwrap_or(bound);
    if sf.degree().unwrap_or(0) == 0 || hi <= *lo {
        return Err(no_root(&hi));
    }
    let chain = sturm_chain(&sf);
    let v_hi = variations(&chain, &hi);
    if variations(&chain, lo) <= v_hi {
        return Err(no_root(&hi));
    }
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let two = BigRational::from_integer(BigInt::from(2));
    let width = BigRational::new(BigInt::one(), BigInt::one() << 64);
    while &b - &a > width {
        let mid = (&a + &b) / &two;
        if variations(&chain, &mid) > v_hi {
            a = mid;
        } else {
            b = mid;
        }
    }
    debug_assert!(rational_to_f64(&(&b - &a)) <= WIDTH);
    let mid = (&a + &b) / &two;
    let exact = small_rational_in(&a, &b).filter(|c| sf.eval(c).is_zero());
    let value = exact.as_ref().map_or_else(|| rational_to_f64(&mid), rational_to_f64);
    Ok(RootCertificate { value, lo: a, hi: b, exact })
}

// The rational with the smallest denominator (up to 64) inside (a, b], if any.
fn small_rational_in(a: &BigRational, b: &BigRational) -> Option<BigRational> {
    for d in 1..=64i64 {
        let den = BigInt::from(d);
        let c = (b * BigRational::from_integer(den.clone())).floor().to_integer();
        let cand = BigRational::new(c, den);
        if cand > *a && cand <= *b {
            return Some(cand);
        }
    }
    None
}

/// Largest real zero of a rational function: the largest root of its reduced numerator.
pub fn largest_real_zero(
    f: &RatFun<BigRational>,
    lo: &BigRational,
    hi: Option<&BigRational>,
) -> Result<RootCertificate, AlgebraError> {
    largest_real_root(f.num(), lo, hi)
}

/// Whether `p` vanishes at the root certified by `cert`, where `defining` is
/// a polynomial having that root. Decided exactly: the root is isolated among
/// the roots of `defining` and then tested against `gcd(p, defining)`.
pub fn vanishes_at(p: &Poly<BigRational>, defining: &Poly<BigRational>, cert: &RootCertificate) -> Result<bool, AlgebraError> {
    if let Some(x) = &cert.exact {
        return Ok(p.eval(x).is_zero());
    }
    if p.is_zero() {
        return Ok(true);
    }
    let h = defining.square_free();
    if sturm_count(&h, &cert.lo, &cert.hi) != 1 {
        return Err(AlgebraError::NoRoot { lo: cert.lo.to_string(), hi: cert.hi.to_string() });
    }
    Ok(sturm_count(&p.gcd(&h), &cert.lo, &cert.hi) == 1)
}
