//! Exact rational scalars for times and amounts.
//!
//! Everything in this crate is computed over arbitrary-precision rationals so
//! that sign decisions on balances are exact. Literals are accepted as
//! integers, decimals (`-12.5`, `1e-3`) or fractions (`7/3`); decimals convert
//! exactly, so `0.1` is `1/10`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn ten_pow(exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), exp as usize)
}

/// Parses an exact rational literal.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let bad = || Error::InvalidRational(input.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(bad)?;
        let den = parse_decimal(den.trim()).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac.len() as i32;
    let factor = Rational::from_integer(ten_pow(scale.unsigned_abs()));
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Some(if negative { -value } else { value })
}

/// Largest integer `m` with `m / 10^digits <= value^(1/root)`, for `value > 0`.
pub(crate) fn nth_root_floor(value: &Rational, root: u32, digits: u32) -> BigInt {
    debug_assert!(value.is_positive() && root > 0);
    let scaled = value.numer() * ten_pow(digits * root) / value.denom();
    scaled.nth_root(root)
}

pub(crate) fn min_abs_nonzero<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    values
        .into_iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.abs())
        .min()
}

pub(crate) fn is_integer(value: &Rational) -> bool {
    value.denom().is_one()
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for optional rationals as strings.
pub mod opt_as_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match value {
            Some(v) => serializer.collect_str(v),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(deserializer)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter for sequences of rationals as strings.
pub mod vec_as_string {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Rational], serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&v.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(deserializer)?
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
