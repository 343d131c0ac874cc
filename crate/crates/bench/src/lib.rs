//! Functions shared by the benchmarks.

use growthcalc_core::GrowthFunction;

/// Closed-form, iterated and series-backed growth functions.
pub fn fixtures() -> Vec<(&'static str, GrowthFunction)> {
    vec![
        ("ks-0.5", GrowthFunction::ks(0.5)),
        ("exp2", GrowthFunction::exp_k(2)),
        ("quartic", GrowthFunction::exp_poly(vec![0.0, 0.0, 1.0, -1.0, 1.0])),
    ]
}
