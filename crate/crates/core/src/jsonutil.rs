//! JSON wrappers for exact arbitrary-precision numbers.
//!
//! JSON numbers cannot carry exact rationals or integers beyond 2^53
//! faithfully, so these wrappers accept integers, fraction strings like
//! "3/4", and decimal strings like "0.25" on input, and emit plain integers
//! when safe, strings otherwise.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Exact rational with human-readable JSON form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct JsonRational(pub BigRational);

impl JsonRational {
    pub fn from_int(n: i64) -> Self {
        JsonRational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        JsonRational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }
}

impl fmt::Display for JsonRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parses "7", "-3/4", or a finite decimal like "1.25" into an exact value.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let numer = BigInt::from_str(n.trim()).map_err(|e| e.to_string())?;
        let denom = BigInt::from_str(d.trim()).map_err(|e| e.to_string())?;
        if denom.is_zero() {
            return Err("zero denominator".to_owned());
        }
        return Ok(BigRational::new(numer, denom));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let sign = if whole.trim_start().starts_with('-') { -1 } else { 1 };
        let whole_int = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).map_err(|e| e.to_string())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal literal: {text}"));
        }
        let frac_int = BigInt::from_str(frac).map_err(|e| e.to_string())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let abs = BigRational::from_integer(whole_int.abs())
            + BigRational::new(frac_int, scale);
        return Ok(if sign < 0 { -abs } else { abs });
    }
    BigInt::from_str(text)
        .map(BigRational::from_integer)
        .map_err(|e| e.to_string())
}

impl Serialize for JsonRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.denom().is_one() {
            if let Some(n) = self.0.numer().to_i64() {
                return serializer.serialize_i64(n);
            }
        }
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for JsonRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
            Float(f64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(JsonRational(BigRational::from_integer(BigInt::from(n)))),
            Raw::Text(s) => parse_rational(&s)
                .map(JsonRational)
                .map_err(D::Error::custom),
            Raw::Float(f) => BigRational::from_float(f)
                .map(JsonRational)
                .ok_or_else(|| D::Error::custom("non-finite number")),
        }
    }
}

/// Exact nonnegative integer with number-or-string JSON form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct JsonBigUint(pub BigUint);

impl fmt::Display for JsonBigUint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for JsonBigUint {
    fn from(n: u64) -> Self {
        JsonBigUint(BigUint::from(n))
    }
}

impl Serialize for JsonBigUint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if let Some(n) = self.0.to_u64() {
            serializer.serialize_u64(n)
        } else {
            serializer.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for JsonBigUint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(JsonBigUint(BigUint::from(n))),
            Raw::Text(s) => BigUint::from_str(s.trim())
                .map(JsonBigUint)
                .map_err(D::Error::custom),
        }
    }
}
