//! Edge weights over the non-negative integers extended with `∞`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest finite value accepted as an input weight.
pub const MAX_INPUT: u64 = 1 << 60;
/// Finite results at or above this bound are reported as overflow.
pub const OVERFLOW_BOUND: u64 = 1 << 62;

/// A weight in `{0, 1, ..} ∪ {∞}`.
///
/// `∞` is a dedicated sentinel: it absorbs under `+` and is the identity of
/// `min`. It is never confused with a large finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Weight(u64);

impl Weight {
    pub const INF: Weight = Weight(u64::MAX);
    pub const ZERO: Weight = Weight(0);

    /// Finite weight; rejects values above [`MAX_INPUT`].
    pub fn new(value: u64) -> Result<Self> {
        if value > MAX_INPUT {
            return Err(Error::Overflow(format!("weight {value} exceeds 2^60")));
        }
        Ok(Weight(value))
    }

    /// Finite weight without the input bound check. Values must stay below
    /// [`OVERFLOW_BOUND`].
    #[cfg(test)]
    pub(crate) const fn from_raw(value: u64) -> Self {
        Weight(value)
    }

    pub fn finite(value: u64) -> Self {
        Self::new(value).expect("finite weight out of range")
    }

    #[inline]
    pub fn is_inf(self) -> bool {
        self.0 == u64::MAX
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        !self.is_inf()
    }

    /// The finite value, or `None` for `∞`.
    #[inline]
    pub fn value(self) -> Option<u64> {
        if self.is_inf() {
            None
        } else {
            Some(self.0)
        }
    }

    /// Saturating-at-`∞`, overflow-checked addition.
    #[inline]
    pub fn checked_add(self, other: Weight) -> Result<Weight> {
        match (self.value(), other.value()) {
            (Some(a), Some(b)) => {
                let s = a + b; // both < 2^62, cannot wrap
                if s >= OVERFLOW_BOUND {
                    Err(Error::Overflow(format!("{a} + {b} exceeds 2^62")))
                } else {
                    Ok(Weight(s))
                }
            }
            _ => Ok(Weight::INF),
        }
    }

    #[inline]
    pub fn min(self, other: Weight) -> Weight {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    // u64::MAX sorts last, which is exactly the order of ∞.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("INF"),
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "INF" {
            return Ok(Weight::INF);
        }
        if let Some(rest) = s.strip_prefix('-') {
            if rest.parse::<u64>().is_ok() {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("negative weight {s}"),
                });
            }
        }
        let v: u64 = s.parse().map_err(|_| Error::Parse {
            line: 0,
            msg: format!("bad weight token {s:?}"),
        })?;
        Weight::new(v)
    }
}

impl From<u32> for Weight {
    fn from(v: u32) -> Self {
        Weight(v as u64)
    }
}
