//! Exact rational numbers and their text forms.
//!
//! Every probability, witness value and oracle result in this crate is a
//! [`Rational`]. Text input accepts `"p/q"`, integers, and finite decimals
//! (`"0.125"`, `"-2.5e-3"`); decimals are converted exactly. JSON numbers are
//! accepted only when they are integers, so no binary float ever reaches a
//! probability.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

use crate::error::{GsvError, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn parse(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(GsvError::Parse("empty number".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad(text))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad(text))?;
        if q.is_zero() {
            return Err(GsvError::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(s).ok_or_else(|| bad(text))
}

fn bad(text: &str) -> GsvError {
    GsvError::Parse(format!("not a rational number: {text:?}"))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return None;
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut numer = BigInt::from_str(&format!("0{whole}{fraction}")).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - fraction.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Fallback for values whose parts overflow f64 individually.
        let shift = value.numer().bits().max(value.denom().bits()).saturating_sub(1000);
        let n = (value.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (value.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    })
}

/// Smallest positive integer `k` with `k^2 >= 1/epsilon`.
pub fn ceil_sqrt_recip(epsilon: &Rational) -> Result<BigInt> {
    if !epsilon.is_positive() {
        return Err(GsvError::Parameter("epsilon must be positive".into()));
    }
    let target = epsilon.recip();
    let ceil_target = target.ceil().to_integer();
    let mut k = ceil_target.sqrt();
    while Rational::from_integer(&k * &k) < target {
        k += 1;
    }
    while k > BigInt::one() && Rational::from_integer((&k - 1) * (&k - 1)) >= target {
        k -= 1;
    }
    Ok(k.max(BigInt::one()))
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub mod serde_one {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

pub mod serde_opt {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "serde_one")] Rational);

    pub fn serialize<S: Serializer>(
        value: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        value.as_ref().map(|v| Wrap(v.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

pub mod serde_vec {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "serde_one")] Rational);

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        values
            .iter()
            .map(|v| Wrap(v.clone()))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a \"p/q\" or decimal string, or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        parse(v).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
        Ok(Rational::from_integer(BigInt::from(v)))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rational, E> {
        Err(E::custom(format!(
            "binary float {v} rejected; write probabilities as \"p/q\" or decimal strings"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse("1/3").unwrap(), frac(1, 3));
        assert_eq!(parse(" -2/4 ").unwrap(), frac(-1, 2));
        assert_eq!(parse("0.1").unwrap(), frac(1, 10));
        assert_eq!(parse("-.25").unwrap(), frac(-1, 4));
        assert_eq!(parse("2.5e-3").unwrap(), frac(1, 400));
        assert_eq!(parse("3e2").unwrap(), int(300));
        assert_eq!(parse("7").unwrap(), int(7));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "abc", "1.2.3", "--1", ".", "0x10"] {
            assert!(parse(s).is_err(), "{s:?} should not parse");
        }
    }

    #[test]
    fn json_floats_are_rejected() {
        #[derive(serde::Deserialize)]
        struct T(#[serde(with = "serde_one")] #[allow(dead_code)] Rational);
        assert!(serde_json::from_str::<T>("0.5").is_err());
        assert!(serde_json::from_str::<T>("\"1/2\"").is_ok());
        assert!(serde_json::from_str::<T>("1").is_ok());
    }

    #[test]
    fn ceil_sqrt_recip_matches_definition() {
        assert_eq!(ceil_sqrt_recip(&frac(1, 4)).unwrap(), BigInt::from(2));
        assert_eq!(ceil_sqrt_recip(&frac(1, 25)).unwrap(), BigInt::from(5));
        assert_eq!(ceil_sqrt_recip(&frac(1, 26)).unwrap(), BigInt::from(6));
        assert_eq!(ceil_sqrt_recip(&frac(1, 2)).unwrap(), BigInt::from(2));
        assert_eq!(ceil_sqrt_recip(&frac(3, 4)).unwrap(), BigInt::from(2));
        assert_eq!(ceil_sqrt_recip(&int(1)).unwrap(), BigInt::from(1));
        assert!(ceil_sqrt_recip(&int(0)).is_err());
    }

    #[test]
    fn format_is_lowest_terms() {
        assert_eq!(format(&frac(2, 6)), "1/3");
        assert_eq!(format(&int(-4)), "-4");
    }
}
