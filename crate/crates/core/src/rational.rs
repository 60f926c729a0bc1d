//! Exact rational scalars.
//!
//! Everything the library certifies is computed over arbitrary-precision
//! rationals; floating point appears only in the dedicated float
//! contraction mode and the Monte Carlo estimators. `Rational` is
//! [`num_rational::BigRational`], which keeps values reduced with a
//! positive denominator.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Shorthand for small constants: `rat(-1, 10)` is -1/10.
///
/// Panics if `denom` is zero.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Lossy conversion for float-mode pipelines and report rendering.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Canonical text form: `n` for integers, `n/d` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.denom() == &BigInt::from(1) {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses an exact scalar token: an integer (`-3`), a fraction (`1/78`),
/// or a base-10 decimal (`-0.25`, `1e-4`, `2.5e3`), all converted without
/// rounding.
pub fn parse_rational(token: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("malformed rational value {token:?}"));
    let token = token.trim();
    if token.is_empty() {
        return Err(bad());
    }
    if let Some((numer, denom)) = token.split_once('/') {
        let n: BigInt = numer.trim().parse().map_err(|_| bad())?;
        let d: BigInt = denom.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!(
                "zero denominator in {token:?}"
            )));
        }
        return Ok(Rational::new(n, d));
    }
    // Split off a decimal exponent, if any.
    let (mantissa, exp10) = match token.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (token, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if frac_part.contains(['+', '-']) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad());
    }
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp10 - frac_part.len() as i32;
    let base = BigInt::from(10);
    Ok(if shift >= 0 {
        Rational::from_integer(numer * base.pow(shift as u32))
    } else {
        Rational::new(numer, base.pow((-shift) as u32))
    })
}

/// Serde adapter serializing rationals as `"n/d"` strings so JSON never
/// rounds them. Use with `#[serde(with = "rational_serde")]`.
pub mod rational_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
        format_rational(value).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(de)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            values: &[Rational],
            ser: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            values
                .iter()
                .map(format_rational)
                .collect::<Vec<_>>()
                .serialize(ser)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            de: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            let texts = Vec::<String>::deserialize(de)?;
            texts
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// (n-1)!! with the conventions (-1)!! = 0!! = 1; counts perfect matchings
/// of `n` points when `n` is even.
pub fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::from(1);
    let mut i = n;
    while i >= 2 {
        acc *= i;
        i -= 2;
    }
    acc
}

/// Signum as an exact integer: -1, 0, or 1.
pub fn sign(value: &Rational) -> i32 {
    if value.is_zero() {
        0
    } else if value.is_positive() {
        1
    } else {
        -1
    }
}
