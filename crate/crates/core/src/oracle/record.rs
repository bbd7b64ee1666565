//! One comparison between a closed form and an oracle value.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub suite: String,
    pub operation: String,
    pub params: serde_json::Value,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ValidationRecord {
    /// Compares complex values; the record keeps their real parts. The
    /// relative error is against `|closed_form|`, or absolute when that is 0.
    pub fn compare(suite: &str, operation: &str, params: serde_json::Value, closed_form: Complex64, oracle: Complex64, tolerance: f64) -> Self {
        let abs_error = (closed_form - oracle).norm();
        let scale = closed_form.norm();
        let rel_error = if scale > 0.0 { abs_error / scale } else { abs_error };
        Self::new(suite, operation, params, closed_form.re, oracle.re, abs_error, rel_error, tolerance)
    }

    /// A record whose oracle value is itself the error measure (for
    /// residuals that should vanish).
    pub fn residual(suite: &str, operation: &str, params: serde_json::Value, residual: f64, tolerance: f64) -> Self {
        Self::new(suite, operation, params, 0.0, residual, residual, residual, tolerance)
    }

    #[allow(clippy::too_many_arguments)]
    fn new(suite: &str, operation: &str, params: serde_json::Value, closed_form: f64, oracle: f64, abs_error: f64, rel_error: f64, tolerance: f64) -> Self {
        ValidationRecord {
            suite: suite.to_string(),
            operation: operation.to_string(),
            params,
            closed_form,
            oracle,
            abs_error,
            rel_error,
            tolerance,
            pass: rel_error <= tolerance,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}
