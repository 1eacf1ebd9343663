//! Exact non-negative rationals for factors (β, λ), utilizations and buckets.

use std::fmt;

use num_rational::Ratio;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = Ratio<u128>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{0}`: expected a non-negative decimal (e.g. 1.2) or fraction (e.g. 6/5)")]
pub struct ParseRationalError(String);

/// Parses `1.25`, `3`, `.5` or `6/5` exactly.
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: u128 = n.trim().parse().map_err(|_| err())?;
        let d: u128 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int_part, frac_part) = t.split_once('.').unwrap_or((t, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    if frac_part.len() > 30 {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: u128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| err())? };
    let denom = 10u128.pow(frac_part.len() as u32);
    Ok(Ratio::new(numer, denom))
}

/// `round(value)` with halves rounded up.
pub fn round_half_up(value: Rational) -> u128 {
    let twice = value * Ratio::from_integer(2u128) + Ratio::from_integer(1u128);
    (twice.numer() / twice.denom()) / 2
}

/// `ceil(value)`.
pub fn ceil(value: Rational) -> u128 {
    let (n, d) = (value.numer(), value.denom());
    n / d + u128::from(n % d != 0)
}

/// Fixed-point decimal rendering with `places` digits, rounding half up.
pub fn to_fixed(value: Rational, places: u32) -> String {
    let scale = 10u128.pow(places);
    let scaled = round_half_up(value * Ratio::from_integer(scale));
    if places == 0 {
        return scaled.to_string();
    }
    format!(
        "{}.{:0width$}",
        scaled / scale,
        scaled % scale,
        width = places as usize
    )
}

/// Lossy conversion for display or JSON output.
pub fn to_f64(value: Rational) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}

/// Serde adapter: rationals are written as fraction strings and read from
/// either JSON numbers (via their shortest decimal form) or strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        Wrapper(*value).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        Wrapper::deserialize(d).map(|w| w.0)
    }
}

/// Newtype used where a rational sits inside a container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wrapper(pub Rational);

impl Serialize for Wrapper {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if *self.0.denom() == 1 {
            s.serialize_str(&self.0.numer().to_string())
        } else {
            s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
        }
    }
}

impl<'de> Deserialize<'de> for Wrapper {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Wrapper;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative number or a rational string")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Wrapper, E> {
                Ok(Wrapper(Ratio::from_integer(u128::from(v))))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Wrapper, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom(format!("negative value {v}")))
                    .and_then(|v| self.visit_u64(v))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Wrapper, E> {
                if !v.is_finite() || v < 0.0 {
                    return Err(E::custom(format!("invalid value {v}")));
                }
                parse(&format!("{v}")).map(Wrapper).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Wrapper, E> {
                parse(v).map(Wrapper).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}
