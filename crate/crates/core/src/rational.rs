//! Exact rational numbers for costs and sacrifice bounds.
//!
//! Textual form is `n` or `n/d` with an optional leading `-`. Denominators
//! must be positive; values are stored reduced.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational `{text}`: {reason}")]
pub struct RationalError {
    pub text: String,
    pub reason: &'static str,
}

fn digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

pub fn parse_rational(text: &str) -> Result<Rational, RationalError> {
    let err = |reason| RationalError {
        text: text.to_string(),
        reason,
    };
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    if !digits(num) {
        return Err(err("expected digits"));
    }
    let mut n: BigInt = num.parse().map_err(|_| err("expected digits"))?;
    let d: BigInt = match den {
        Some(d) if digits(d) => d.parse().map_err(|_| err("expected digits"))?,
        Some(_) => return Err(err("expected digits after `/`")),
        None => BigInt::from(1),
    };
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    if neg {
        n = -n;
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let n = r.numer().abs();
    if r.is_integer() {
        format!("{sign}{n}")
    } else {
        format!("{sign}{n}/{}", r.denom())
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Serde adapter storing a rational as its textual form.
pub mod as_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}
