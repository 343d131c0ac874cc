//! The multiplicative Legendre transform `ℓ_u(t) = inf_{r>0} u(r)/r^t`, its
//! inverse, the series `L_u` and `L_u^#`, the dual function `u*`, function
//! equivalence and the verification suites built on them.

mod dual;
mod equivalence;
mod series;
pub mod suites;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::growthfn::{GrowthFunction, LOG_RANGE};
use crate::numerics::{
    bisect_monotone, default_rel_tol, maximize_concave_with, minimize_convex_with, minimize_scan,
    Boundary, Edge, SearchOptions,
};
use crate::{Error, Result};

pub use dual::dual;
pub use equivalence::{envelope, function_equivalent, Envelope, FunctionEquivalence, FunctionEquivalenceWitness};
pub use series::{l_function, l_function_sum, l_sharp, l_sharp_sum};

/// Points in the global scan used when `φ` is not known to be convex.
pub const SCAN_POINTS: usize = 4096;

/// Largest `t` explored by the inverse transform.
pub const T_CAP: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllValue {
    pub log_ell: f64,
    /// Minimizer `ρ(t)`; `0` when the infimum is the limit at `r → 0`.
    pub rho: f64,
    pub boundary: Boundary,
}

fn search_options() -> SearchOptions {
    SearchOptions {
        x_tol: default_rel_tol().min(1e-12),
        ..SearchOptions::default()
    }
}

/// `ℓ_u(t)` by minimizing `φ(x) - t x` over `x = log r`.
///
/// Convex objectives use bracketing plus golden section; otherwise a global
/// scan with local refinement of every basin. An infimum at `r → 0` is
/// reported as `u(0)` with a lower-boundary flag.
pub fn ell(u: &GrowthFunction, t: f64) -> Result<EllValue> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("ell needs finite t >= 0, got {t}")));
    }
    let obj = |x: f64| u.eval_log(x).map_or(f64::NAN, |p| p - t * x);
    let opts = search_options()
        .with_lower(Edge::Closed(-LOG_RANGE))
        .with_upper(Edge::Cap(LOG_RANGE));
    let mut seed = if t > 0.0 { t.ln().clamp(-50.0, 50.0) } else { 0.0 };
    // start inside the domain where φ is finite
    let mut back = 1.0;
    while seed > -LOG_RANGE && !u.eval_log(seed).is_ok_and(f64::is_finite) {
        seed = (seed - back).max(-LOG_RANGE);
        back *= 2.0;
    }
    let ext = if u.is_log_exp_convex() {
        minimize_convex_with(obj, seed, &opts)?
    } else {
        minimize_scan(obj, SCAN_POINTS, &opts)?
    };
    if ext.boundary == Boundary::Lower {
        let at_zero = u.log_at_zero().filter(|v| !v.is_nan());
        return Ok(EllValue {
            log_ell: match at_zero {
                Some(z) if t == 0.0 => z,
                _ => ext.value,
            },
            rho: 0.0,
            boundary: Boundary::Lower,
        });
    }
    Ok(EllValue { log_ell: ext.value, rho: ext.arg.exp(), boundary: ext.boundary })
}

/// `log ℓ_u(n)` through the per-function integer cache.
pub fn ell_integer(u: &GrowthFunction, n: usize) -> Result<f64> {
    u.cached_ell_integer(n, || ell(u, n as f64).map(|e| e.log_ell))
}

/// Sampled `log ℓ_u` with minimizers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreProfile {
    pub t_grid: Vec<f64>,
    pub log_ell: Vec<f64>,
    pub rho: Vec<f64>,
    pub boundary_flags: Vec<Boundary>,
}

impl LegendreProfile {
    /// Evaluated in parallel; the result does not depend on scheduling.
    pub fn compute(u: &GrowthFunction, t_grid: &[f64]) -> Result<Self> {
        let vals: Vec<EllValue> = t_grid.par_iter().map(|&t| ell(u, t)).collect::<Result<_>>()?;
        Ok(LegendreProfile {
            t_grid: t_grid.to_vec(),
            log_ell: vals.iter().map(|v| v.log_ell).collect(),
            rho: vals.iter().map(|v| v.rho).collect(),
            boundary_flags: vals.iter().map(|v| v.boundary).collect(),
        })
    }

    /// Largest violation of concavity of `log ℓ` over consecutive grid triples.
    pub fn concavity_defect(&self) -> f64 {
        let (t, l) = (&self.t_grid, &self.log_ell);
        (0..t.len().saturating_sub(2))
            .map(|i| {
                let lam = (t[i + 2] - t[i + 1]) / (t[i + 2] - t[i]);
                let chord = lam * l[i] + (1.0 - lam) * l[i + 2];
                (chord - l[i + 1]) / l[i + 1].abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// First index from which `log ℓ` is nonincreasing on the grid.
    pub fn decreasing_from(&self) -> Option<usize> {
        let l = &self.log_ell;
        let mut start = None;
        for i in 0..l.len().saturating_sub(1) {
            if l[i + 1] <= l[i] {
                start.get_or_insert(i);
            } else {
                start = None;
            }
        }
        start
    }
}

/// One-sided logarithmic derivatives `τ_∓(r) = r u'_∓(r)/u(r)`.
///
/// Richardson-extrapolated one-sided differences of `φ` at `x = log r`; a
/// crossing smaller than the difference noise is reconciled to the midpoint.
pub fn tau_bounds(u: &GrowthFunction, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("tau needs r > 0, got {r}")));
    }
    let x = r.ln();
    let h = 1e-4 * x.abs().max(1.0);
    let phi = |y: f64| u.eval_log(y);
    let p0 = phi(x)?;
    let left = |h: f64| -> Result<f64> { Ok((p0 - phi(x - h)?) / h) };
    let right = |h: f64| -> Result<f64> { Ok((phi(x + h)? - p0) / h) };
    let mut tm = 2.0 * left(h / 2.0)? - left(h)?;
    let mut tp = 2.0 * right(h / 2.0)? - right(h)?;
    if tm > tp {
        let noise = 1e-6 * tm.abs().max(tp.abs()).max(1.0);
        if tm - tp <= noise {
            let mid = 0.5 * (tm + tp);
            tm = mid;
            tp = mid;
        }
    }
    Ok((tm, tp))
}

/// `ρ(t)` as the solution of `τ_-(r) = t`; cross-check for the minimizer
/// recorded by [`ell`].
pub fn rho_by_bisection(u: &GrowthFunction, t: f64) -> Result<f64> {
    let x = bisect_monotone(
        |x| tau_bounds(u, x.exp()).map_or(f64::NAN, |(tm, _)| tm),
        t,
        -5.0,
        5.0,
        1e-12,
    )?;
    Ok(x.exp())
}

/// Profile `t ↦ log f(t)` for the inverse transform.
#[derive(Clone)]
pub struct LogConcaveProfile {
    pub name: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `f` is decreasing for `t >= t0`.
    pub t0: f64,
}

impl std::fmt::Debug for LogConcaveProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LogConcaveProfile({}, t0={})", self.name, self.t0)
    }
}

impl LogConcaveProfile {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static, t0: f64) -> Self {
        LogConcaveProfile { name: name.into(), eval: Arc::new(eval), t0 }
    }

    /// `f = ℓ_u`, with `t0` taken from the first integer after which the
    /// profile decreases.
    pub fn from_legendre(u: &GrowthFunction) -> Self {
        let grid: Vec<f64> = (0..=64).map(|n| n as f64).collect();
        let t0 = LegendreProfile::compute(u, &grid)
            .ok()
            .and_then(|p| p.decreasing_from())
            .map_or(0.0, |i| i as f64);
        let w = u.clone();
        LogConcaveProfile::new(
            format!("ell[{}]", u.name()),
            move |t| ell(&w, t).map_or(f64::NAN, |e| e.log_ell),
            t0,
        )
    }

    pub fn log_f(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// Finite-evidence admissibility on `[0, t_max]`: log-concave, decreasing
    /// beyond `t0`, and `log f(t)/t` heading to `-∞`.
    pub fn check_admissible(&self, t_max: f64) -> Result<()> {
        let m = 256;
        let ts: Vec<f64> = (0..=m).map(|i| t_max * i as f64 / m as f64).collect();
        let vs: Vec<f64> = ts.iter().map(|&t| self.log_f(t)).collect();
        if let Some(i) = vs.iter().position(|v| !v.is_finite()) {
            return Err(Error::PreconditionViolated(format!(
                "{}: log f({}) is not finite",
                self.name, ts[i]
            )));
        }
        for i in 0..m - 1 {
            let chord = 0.5 * (vs[i] + vs[i + 2]);
            if chord - vs[i + 1] > 1e-9 * vs[i + 1].abs().max(1.0) {
                return Err(Error::PreconditionViolated(format!(
                    "{}: not log-concave near t = {}",
                    self.name, ts[i + 1]
                )));
            }
        }
        for i in 0..m {
            if ts[i] >= self.t0 && vs[i + 1] > vs[i] + 1e-12 * vs[i].abs().max(1.0) {
                return Err(Error::PreconditionViolated(format!(
                    "{}: increasing at t = {} beyond t0 = {}",
                    self.name, ts[i], self.t0
                )));
            }
        }
        let root = |i: usize| vs[i] / ts[i];
        if !(root(m) < root(m / 2)) {
            return Err(Error::PreconditionViolated(format!(
                "{}: f(t)^(1/t) is not decreasing towards 0",
                self.name
            )));
        }
        Ok(())
    }
}

/// `log θ_f(r) = sup_{t≥0} [log f(t) + t log r]`.
pub fn inverse_legendre(f: &LogConcaveProfile, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("theta needs r >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(f.log_f(0.0));
    }
    let lr = r.ln();
    let opts = search_options()
        .with_lower(Edge::Closed(0.0))
        .with_upper(Edge::Cap(T_CAP));
    let ext = maximize_concave_with(|t| f.log_f(t) + t * lr, r.max(1.0), &opts)?;
    Ok(ext.value)
}
