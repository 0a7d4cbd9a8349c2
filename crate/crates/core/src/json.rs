//! JSON helpers for arbitrary-precision integers and rationals.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{Number, Value};

use crate::error::{Error, Result};

/// A JSON number carrying the exact decimal digits of `n`.
pub fn int_value(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integer literal"))
}

pub fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse()
            .map_err(|_| Error::Parse(format!("not an integer: {n}"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        other => Err(Error::Parse(format!("expected integer, got {other}"))),
    }
}

pub fn int_matrix(m: &[Vec<BigInt>]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(int_value).collect()))
            .collect(),
    )
}

pub fn parse_int_matrix(v: &Value) -> Result<Vec<Vec<BigInt>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected matrix".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("expected matrix row".into()))?
                .iter()
                .map(parse_int)
                .collect()
        })
        .collect()
}

/// Rationals are written as "p/q" strings (or "p" when integral).
pub fn rational_string(q: &BigRational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
}

/// Serde adapter writing a BigInt as a decimal string.
pub mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
