//! Saturating log-scale scalars for doubly exponential envelopes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inner exponents above this value are kept symbolically.
pub const SATURATION_EXPONENT: f64 = 700.0;

/// The natural log of a positive quantity, or, when that log would be
/// `exp(inner)` with `inner > 700`, just the inner exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", content = "value", rename_all = "lowercase")]
pub enum ExtendedLog {
    Finite(f64),
    Saturated(f64),
}

impl ExtendedLog {
    pub fn finite(log_value: f64) -> Self {
        ExtendedLog::Finite(log_value)
    }

    /// The log value `exp(inner)`, saturating when `inner > 700`.
    pub fn from_exponent(inner: f64) -> Self {
        if inner > SATURATION_EXPONENT {
            ExtendedLog::Saturated(inner)
        } else {
            ExtendedLog::Finite(inner.exp())
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, ExtendedLog::Saturated(_))
    }

    pub fn finite_value(&self) -> Option<f64> {
        match *self {
            ExtendedLog::Finite(v) => Some(v),
            ExtendedLog::Saturated(_) => None,
        }
    }

    /// Adds a finite log offset. Saturated values absorb finite offsets.
    pub fn shift(self, c: f64) -> Self {
        match self {
            ExtendedLog::Finite(v) => ExtendedLog::Finite(v + c),
            s => s,
        }
    }

    /// Log of a product: finite parts add, saturated parts dominate.
    pub fn combine(self, other: Self) -> Self {
        match (self, other) {
            (ExtendedLog::Finite(a), ExtendedLog::Finite(b)) => ExtendedLog::Finite(a + b),
            (ExtendedLog::Saturated(a), ExtendedLog::Saturated(b)) => ExtendedLog::Saturated(a.max(b)),
            (s @ ExtendedLog::Saturated(_), _) | (_, s @ ExtendedLog::Saturated(_)) => s,
        }
    }

    /// Whether the finite log value `x` is at most this one.
    pub fn bounds(&self, x: f64) -> bool {
        match *self {
            ExtendedLog::Finite(v) => x <= v,
            ExtendedLog::Saturated(_) => true,
        }
    }
}

impl Eq for ExtendedLog {}

impl PartialOrd for ExtendedLog {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedLog {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedLog::Finite(a), ExtendedLog::Finite(b)) => a.total_cmp(b),
            (ExtendedLog::Saturated(a), ExtendedLog::Saturated(b)) => a.total_cmp(b),
            (ExtendedLog::Finite(_), ExtendedLog::Saturated(_)) => Ordering::Less,
            (ExtendedLog::Saturated(_), ExtendedLog::Finite(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for ExtendedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedLog::Finite(v) => write!(f, "finite:{v:.16e}"),
            ExtendedLog::Saturated(v) => write!(f, "sat:{v:.16e}"),
        }
    }
}

impl FromStr for ExtendedLog {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |x: &str| {
            x.parse::<f64>()
                .map_err(|e| Error::Domain(format!("bad extended log {s:?}: {e}")))
        };
        if let Some(rest) = s.strip_prefix("finite:") {
            Ok(ExtendedLog::Finite(parse(rest)?))
        } else if let Some(rest) = s.strip_prefix("sat:") {
            Ok(ExtendedLog::Saturated(parse(rest)?))
        } else {
            Err(Error::Domain(format!("bad extended log {s:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturation_threshold() {
        assert!(!ExtendedLog::from_exponent(700.0).is_saturated());
        assert_eq!(ExtendedLog::from_exponent(700.5), ExtendedLog::Saturated(700.5));
        assert_eq!(ExtendedLog::from_exponent(0.0), ExtendedLog::Finite(1.0));
    }

    #[test]
    fn order_and_wire_form() {
        let a = ExtendedLog::Finite(1e300);
        let b = ExtendedLog::Saturated(701.0);
        let c = ExtendedLog::Saturated(900.0);
        assert!(a < b && b < c);
        for x in [a, b, c, ExtendedLog::Finite(-2.5)] {
            assert_eq!(x.to_string().parse::<ExtendedLog>().unwrap(), x);
        }
        assert!("inf".parse::<ExtendedLog>().is_err());
    }

    #[test]
    fn saturated_bounds_everything() {
        assert!(ExtendedLog::Saturated(701.0).bounds(f64::MAX));
        assert!(!ExtendedLog::Finite(1.0).bounds(2.0));
    }
}
