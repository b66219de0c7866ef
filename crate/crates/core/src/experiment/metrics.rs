use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Maximum and root-mean-square of pointwise errors.
pub fn error_metrics(errors: &[f64]) -> Result<(f64, f64)> {
    if errors.is_empty() {
        return Err(Error::invalid("error metrics need at least one error"));
    }
    let mae = errors.iter().copied().fold(0.0f64, f64::max);
    let mean_sq = errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64;
    Ok((mae, mean_sq.sqrt()))
}

/// Observed order between two refinement levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    /// First level; nothing to compare against.
    Undefined,
    /// One of the errors is zero (or below the exactness tolerance).
    Exact,
    Value(f64),
}

impl Rate {
    pub fn value(self) -> Option<f64> {
        match self {
            Rate::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rate::Undefined => s.serialize_none(),
            Rate::Exact => s.serialize_str("exact"),
            Rate::Value(v) => s.serialize_f64(*v),
        }
    }
}

/// `log(err_prev / err_curr) / log(h_prev / h_curr)`.
pub fn convergence_rate(prev: (f64, f64), curr: (f64, f64)) -> Result<Rate> {
    let (h0, e0) = prev;
    let (h1, e1) = curr;
    if !(h0 > 0.0 && h1 > 0.0) {
        return Err(Error::invalid("fill distances must be positive"));
    }
    if h1 >= h0 {
        return Err(Error::invalid("fill distance must decrease between levels"));
    }
    if e0.is_nan() || e1.is_nan() {
        return Err(Error::invalid("error is NaN"));
    }
    if e0 <= 0.0 || e1 <= 0.0 {
        return Ok(Rate::Exact);
    }
    Ok(Rate::Value((e0 / e1).ln() / (h0 / h1).ln()))
}
