//! Log-domain scalars, certified series summation and derivative-free 1-D
//! optimization. Every transform in the crate is built on these kernels.

mod logscalar;
mod optimize;
mod series;

use std::sync::atomic::{AtomicU64, Ordering};

pub use logscalar::{log_add_exp, LogScalar};
pub use optimize::{
    bisect_monotone, maximize_concave_1d, maximize_concave_with, minimize_convex_1d,
    minimize_convex_with, minimize_scan, Boundary, Bracket, Edge, Extremum, SearchOptions,
};
pub use series::{
    log_concave_ratio, log_sum_exp_series, log_sum_exp_series_capped, SeriesSum,
    DEFAULT_INDEX_CAP,
};

/// Default relative tolerance for series truncation and optimizers.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

static REL_TOL_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Current process-wide relative tolerance.
pub fn default_rel_tol() -> f64 {
    f64::from_bits(REL_TOL_BITS.load(Ordering::Relaxed))
}

/// Override the process-wide relative tolerance. Non-positive or non-finite
/// values are rejected.
pub fn set_default_rel_tol(tol: f64) -> crate::Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(crate::Error::InvalidInput(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    REL_TOL_BITS.store(tol.to_bits(), Ordering::Relaxed);
    Ok(())
}

/// `ln n!` for integer `n`.
pub fn ln_factorial(n: u64) -> f64 {
    statrs::function::factorial::ln_factorial(n)
}

/// `t ln t` with the convention `0^0 = 1`.
pub fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}
