//! Model values for asymptotic laws, which are two-sided bounds on critical
//! lines.

use serde::{Deserialize, Serialize};

/// Model value of an asymptotic law, determined up to multiplicative constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prediction {
    Value { value: f64 },
    Between { lo: f64, hi: f64 },
}

impl Prediction {
    pub fn value(v: f64) -> Self {
        Prediction::Value { value: v }
    }

    pub fn between(lo: f64, hi: f64) -> Self {
        Prediction::Between {
            lo: lo.min(hi),
            hi: lo.max(hi),
        }
    }

    pub fn point(&self) -> Option<f64> {
        match *self {
            Prediction::Value { value } => Some(value),
            Prediction::Between { .. } => None,
        }
    }

    pub fn lo(&self) -> f64 {
        match *self {
            Prediction::Value { value } => value,
            Prediction::Between { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> f64 {
        match *self {
            Prediction::Value { value } => value,
            Prediction::Between { hi, .. } => hi,
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, Prediction::Between { .. })
    }
}

/// True when `a` and `b` agree to rounding; used to detect critical lines.
pub(crate) fn on_line(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}
