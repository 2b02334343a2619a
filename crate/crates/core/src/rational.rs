//! Exact rationals and their `"p/q"` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use num_rational::BigRational as Rational;

use crate::error::{Error, Result};

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn from_u64(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `1 / (n + 1)`.
pub fn reciprocal_shifted(n: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(n) + 1)
}

/// Always `p/q`, including integers (`2/1`) and zero (`0/1`).
pub fn to_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidParams(format!("'{text}' is not a rational of the form p/q"));
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Serde adapter writing a rational as a `"p/q"` string.
pub mod text {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_text(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        assert_eq!(to_text(&ratio(14, 8)), "7/4");
        assert_eq!(to_text(&ratio(2, 1)), "2/1");
        assert_eq!(to_text(&BigRational::zero()), "0/1");
        assert_eq!(parse("7/4").unwrap(), ratio(7, 4));
        assert_eq!(parse(" 3 ").unwrap(), ratio(3, 1));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }
}
