use num_bigint::BigInt;
use num_rational::BigRational;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use super::{AlgebraError, Poly, RatFun};

/// `"num/den"`, always with an explicit denominator.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `"n"`, `"n/d"` and surrounding whitespace.
pub fn parse_rational(s: &str) -> Result<BigRational, AlgebraError> {
    let err = || AlgebraError::Parse(s.to_string());
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d == BigInt::from(0) {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

pub(crate) fn ser_rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub(crate) fn ser_opt_rational<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&format_rational(q)),
        None => s.serialize_none(),
    }
}

impl Serialize for Poly<BigRational> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs().len()))?;
        for c in self.coeffs() {
            seq.serialize_element(&format_rational(c))?;
        }
        seq.end()
    }
}

impl Serialize for RatFun<BigRational> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RatFun", 2)?;
        st.serialize_field("num", self.num())?;
        st.serialize_field("den", self.den())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::{QPoly, QRatFun};

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), ratio(7, 1));
        assert_eq!(format_rational(&ratio(7, 1)), "7/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn ratfun_json_shape() {
        let f = QRatFun::new(QPoly::from_ints(&[0, 1]), QPoly::from_ints(&[-2, 1])).unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v, serde_json::json!({"num": ["0/1", "1/1"], "den": ["-2/1", "1/1"]}));
    }
}
