use serde::Serialize;

use crate::error::{Error, Result};
use crate::solvers::Trace;

/// Distances below this are at the floating-point floor and carry no rate
/// information.
pub const DISTANCE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    /// Geometric mean of successive error ratios.
    pub linear_rate: f64,
    /// Median of `log(e_{t+1}/e_t) / log(e_t/e_{t−1})`; ≈1 linear, ≈2 quadratic.
    pub order_estimate: f64,
    /// Errors used (after burn-in, above the floor).
    pub samples: usize,
}

/// Fits rates to an error sequence, skipping the first `burn_in` entries and
/// stopping at the first error below [`DISTANCE_FLOOR`].
pub fn rate_from_errors(errors: &[f64], burn_in: usize) -> Result<RateEstimate> {
    let tail: Vec<f64> = errors.iter().skip(burn_in).copied().take_while(|&e| e >= DISTANCE_FLOOR).collect();
    if tail.len() < 3 {
        return Err(Error::Analysis(format!(
            "need at least 3 errors above {DISTANCE_FLOOR:e} after burn-in {burn_in}, have {}",
            tail.len()
        )));
    }
    if tail.iter().any(|e| !e.is_finite()) {
        return Err(Error::Analysis("non-finite error in sequence".into()));
    }
    let steps = (tail.len() - 1) as f64;
    let linear_rate = (tail[tail.len() - 1] / tail[0]).powf(1.0 / steps);
    let mut orders: Vec<f64> = tail
        .windows(3)
        .filter_map(|w| {
            let den = (w[1] / w[0]).ln();
            (den != 0.0).then(|| (w[2] / w[1]).ln() / den)
        })
        .filter(|o| o.is_finite())
        .collect();
    if orders.is_empty() {
        return Err(Error::Analysis("error sequence is constant".into()));
    }
    orders.sort_by(f64::total_cmp);
    let mid = orders.len() / 2;
    let order_estimate = if orders.len() % 2 == 1 { orders[mid] } else { 0.5 * (orders[mid - 1] + orders[mid]) };
    Ok(RateEstimate { linear_rate, order_estimate, samples: tail.len() })
}

/// [`rate_from_errors`] on the trace's distances to the known solution.
pub fn empirical_rate(trace: &Trace, burn_in: usize) -> Result<RateEstimate> {
    let d = trace
        .distances()
        .ok_or_else(|| Error::Analysis("trace has no known-solution distances".into()))?;
    if d.len() < burn_in + 3 {
        return Err(Error::Analysis(format!("trace has {} rows, need at least burn_in + 3 = {}", d.len(), burn_in + 3)));
    }
    rate_from_errors(&d, burn_in)
}
