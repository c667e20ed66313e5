//! Exact rational arithmetic helpers.
//!
//! All semimeasure values, Kraft sums and dyadic weights are [`Rational`]s.
//! Logarithms are taken from the exact value with bit-level scaling so that
//! very small masses (2^-60 and below) keep full double precision.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{LabError, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^e` for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << (e as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-e) as usize))
    }
}

fn log2_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> (shift as usize)).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}

/// `log2 r` for `r > 0`; `-inf` for zero.
pub fn log2(r: &Rational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    assert!(r.is_positive(), "log2 of a negative rational");
    log2_bigint(r.numer()) - log2_bigint(r.denom())
}

/// Natural logarithm, same conventions as [`log2`].
pub fn ln(r: &Rational) -> f64 {
    log2(r) * std::f64::consts::LN_2
}

pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * log2(&r.abs()).exp2()
}

/// Smallest integer `c` with `r <= 2^c`, computed exactly. `r` must be positive.
pub fn ceil_log2(r: &Rational) -> i64 {
    assert!(r.is_positive(), "ceil_log2 of a non-positive rational");
    let mut c = r.numer().bits() as i64 - r.denom().bits() as i64;
    while *r > pow2(c) {
        c += 1;
    }
    while *r <= pow2(c - 1) {
        c -= 1;
    }
    c
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"0.25"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || LabError::InvalidArgument(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        let v = Rational::new(n, d);
        return Ok(if negative { -v } else { v });
    }
    Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?))
}

/// `"a/b"`, or `"a"` for integers.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_rational_table {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(t: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(t.len()))?;
        for row in t {
            let row: Vec<String> = row.iter().map(super::format).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| super::parse(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}
