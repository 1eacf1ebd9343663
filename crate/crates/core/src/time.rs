//! Integer microsecond time.

use std::fmt;
use std::str::FromStr;

/// Time and durations in integer microseconds.
pub type Time = u64;

pub const US_PER_MS: Time = 1_000;

pub const fn ms(value: Time) -> Time {
    value * US_PER_MS
}

/// A duration parsed from text such as `3000ms`, `250us` or `42` (bare
/// integers are microseconds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Micros(pub Time);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid duration `{0}`: expected an integer with optional `ms` or `us` suffix")]
pub struct ParseDurationError(String);

impl FromStr for Micros {
    type Err = ParseDurationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let (digits, scale) = if let Some(d) = trimmed.strip_suffix("ms") {
            (d, US_PER_MS)
        } else if let Some(d) = trimmed.strip_suffix("us") {
            (d, 1)
        } else {
            (trimmed, 1)
        };
        let err = || ParseDurationError(s.to_string());
        let value: Time = digits.trim().parse().map_err(|_| err())?;
        value.checked_mul(scale).map(Micros).ok_or_else(err)
    }
}

impl fmt::Display for Micros {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}us", self.0)
    }
}
