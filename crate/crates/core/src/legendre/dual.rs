use crate::growthfn::GrowthFunction;
use crate::numerics::{maximize_concave_with, minimize_scan, Edge};
use crate::{Error, Result};

use super::{search_options, SCAN_POINTS};

/// `log u*(r)` with `u*(r) = sup_{s>0} e^{2√(rs)} / u(s)`.
///
/// Substituting `s = y²` gives the objective `2√r y - log u(y²)`, concave in
/// `y` when `log u(y²)` is convex; other inputs are scanned in `log y`.
/// `u*(0) = 1/u(0)` for increasing `u`.
pub fn dual(u: &GrowthFunction, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("dual needs r >= 0, got {r}")));
    }
    if r == 0.0 {
        return u.log_at_zero().map(|v| -v).ok_or_else(|| {
            Error::InvalidInput(format!("{} is not defined at r = 0", u.name()))
        });
    }
    let sr = r.sqrt();
    let obj = |y: f64| {
        let x = if y == 0.0 { f64::NEG_INFINITY } else { 2.0 * y.ln() };
        u.eval_log(x).map_or(f64::NAN, |p| 2.0 * sr * y - p)
    };
    if u.log_x2_convex_known() {
        let opts = search_options()
            .with_lower(Edge::Closed(0.0))
            .with_upper(Edge::Cap(1e150));
        let ext = maximize_concave_with(obj, sr.max(1e-3), &opts.with_step(sr.max(1e-3)))?;
        return Ok(ext.value);
    }
    let opts = search_options()
        .with_lower(Edge::Cap(-300.0))
        .with_upper(Edge::Cap(300.0));
    let ext = minimize_scan(|z: f64| -obj(z.exp()), SCAN_POINTS, &opts)?;
    let at_zero = obj(0.0);
    Ok(if at_zero.is_nan() { -ext.value } else { (-ext.value).max(at_zero) })
}
