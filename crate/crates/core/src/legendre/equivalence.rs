use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::growthfn::GrowthFunction;
use crate::{Error, Result};

const A_GRID: usize = 64;
const LOG2_A_MAX: f64 = 20.0;
const RADII: usize = 256;
const RECHECK_RADII: usize = 1024;
const REFINE_STEPS: usize = 60;

/// `c₁ u(a₁ r) ≤ v(r) ≤ c₂ u(a₂ r)` on `checked_range`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionEquivalenceWitness {
    pub c1: f64,
    pub a1: f64,
    pub c2: f64,
    pub a2: f64,
    pub checked_range: (f64, f64),
    /// Largest log-scale violation of the witness on a denser recheck grid.
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum FunctionEquivalence {
    Witness(FunctionEquivalenceWitness),
    Counterexample { r: f64, note: String },
}

impl FunctionEquivalence {
    pub fn witness(&self) -> Option<&FunctionEquivalenceWitness> {
        match self {
            FunctionEquivalence::Witness(w) => Some(w),
            FunctionEquivalence::Counterexample { .. } => None,
        }
    }
}

/// Extremes of `D_a(r) = log v(r) - log u(a r)` over the radii.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub inf: f64,
    pub arg_inf: f64,
    pub sup: f64,
    pub arg_sup: f64,
}

pub fn envelope(u: &GrowthFunction, v: &GrowthFunction, a: f64, radii: &[f64]) -> Result<Envelope> {
    let lv: Vec<f64> = radii.iter().map(|&r| v.log_u(r)).collect::<Result<_>>()?;
    let d = gaps(u, a, radii, &lv);
    Ok(extremes(&d, radii))
}

fn gaps(u: &GrowthFunction, a: f64, radii: &[f64], lv: &[f64]) -> Vec<f64> {
    radii
        .par_iter()
        .zip(lv.par_iter())
        .map(|(&r, &l)| u.log_u(a * r).map_or(f64::NAN, |lu| l - lu))
        .collect()
}

fn extremes(d: &[f64], radii: &[f64]) -> Envelope {
    let mut e = Envelope { inf: f64::INFINITY, arg_inf: f64::NAN, sup: f64::NEG_INFINITY, arg_sup: f64::NAN };
    for (&x, &r) in d.iter().zip(radii) {
        if x.is_nan() {
            e.inf = f64::NAN;
            e.sup = f64::NAN;
            return e;
        }
        if x < e.inf {
            e.inf = x;
            e.arg_inf = r;
        }
        if x > e.sup {
            e.sup = x;
            e.arg_sup = r;
        }
    }
    e
}

fn probe_radii(r_min: f64, r_max: f64, points: usize, with_zero: bool) -> Vec<f64> {
    let lo = r_min.max(1e-6).ln();
    let hi = r_max.ln();
    let mut out = Vec::with_capacity(points + 1);
    if with_zero {
        out.push(0.0);
    }
    out.extend((0..points).map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp()));
    out
}

/// Stability of the upper and lower envelope: the tail of the range does not
/// push the extreme further.
struct Probe<'a> {
    u: &'a GrowthFunction,
    radii: Vec<f64>,
    lv: Vec<f64>,
    tail: usize,
}

impl Probe<'_> {
    fn gaps(&self, a: f64) -> Vec<f64> {
        gaps(self.u, a, &self.radii, &self.lv)
    }

    fn split(&self, d: &[f64]) -> (Envelope, Envelope) {
        let cut = d.len() - self.tail;
        (extremes(&d[..cut], &self.radii[..cut]), extremes(&d[cut..], &self.radii[cut..]))
    }

    fn stable_up(&self, a: f64) -> bool {
        let d = self.gaps(a);
        let (head, tail) = self.split(&d);
        head.sup.is_finite() && tail.sup <= head.sup + 1e-9 * head.sup.abs().max(1.0)
    }

    fn stable_lo(&self, a: f64) -> bool {
        let d = self.gaps(a);
        let (head, tail) = self.split(&d);
        head.inf.is_finite() && tail.inf >= head.inf - 1e-9 * head.inf.abs().max(1.0)
    }

    /// Smallest `a` with a stable upper envelope, refined by bisection in `log a`.
    fn a_upper(&self, grid: &[f64]) -> Option<f64> {
        let i = grid.iter().position(|&a| self.stable_up(a))?;
        if i == 0 {
            return Some(grid[0]);
        }
        Some(refine(grid[i - 1], grid[i], |a| self.stable_up(a)))
    }

    /// Largest `a` with a stable lower envelope.
    fn a_lower(&self, grid: &[f64]) -> Option<f64> {
        let i = grid.iter().rposition(|&a| self.stable_lo(a))?;
        if i + 1 == grid.len() {
            return Some(grid[i]);
        }
        Some(refine(grid[i + 1], grid[i], |a| self.stable_lo(a)))
    }
}

/// Bisection in `log a` between a failing and a passing end; returns the
/// passing end.
fn refine(mut bad: f64, mut good: f64, ok: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..REFINE_STEPS {
        let mid = (0.5 * (bad.ln() + good.ln())).exp();
        if mid == bad || mid == good {
            break;
        }
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Searches `c₁ u(a₁ r) ≤ v(r) ≤ c₂ u(a₂ r)` on `[r_min, r_max]`.
///
/// For each candidate `a` the constants are the exact envelopes of
/// `log v(r) - log u(a r)` over the radii. `a₂` is the smallest dilation whose
/// upper envelope is not pushed up by the last eighth of the range, `a₁` the
/// largest whose lower envelope is not pushed down. If no dilation in
/// `[2⁻²⁰, 2²⁰]` stabilizes, or the selected dilations drift by more than a
/// factor 2 when the range shrinks sixteenfold, the pair is reported as a
/// counterexample.
pub fn function_equivalent(
    u: &GrowthFunction,
    v: &GrowthFunction,
    r_min: f64,
    r_max: f64,
) -> Result<FunctionEquivalence> {
    if !(r_min >= 0.0 && r_max > r_min.max(1e-6) * 16.0 && r_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "equivalence range [{r_min}, {r_max}] must satisfy 0 <= r_min and r_max > 16 max(r_min, 1e-6)"
        )));
    }
    let with_zero = r_min == 0.0 && u.log_at_zero().is_some() && v.log_at_zero().is_some();
    let grid: Vec<f64> = (0..A_GRID)
        .map(|i| (-LOG2_A_MAX + 2.0 * LOG2_A_MAX * i as f64 / (A_GRID - 1) as f64).exp2())
        .collect();

    let probe = |hi: f64| -> Result<Probe<'_>> {
        let radii = probe_radii(r_min, hi, RADII, with_zero);
        let lv = radii.iter().map(|&r| v.log_u(r)).collect::<Result<Vec<_>>>()?;
        Ok(Probe { u, radii, lv, tail: RADII / 8 })
    };
    let full = probe(r_max)?;
    let sub = probe(r_max / 16.0)?;

    let (Some(a2), Some(a1)) = (full.a_upper(&grid), full.a_lower(&grid)) else {
        let d = full.gaps(grid[A_GRID - 1]);
        let e = extremes(&d, &full.radii);
        return Ok(FunctionEquivalence::Counterexample {
            r: if e.arg_sup.is_nan() { r_max } else { e.arg_sup },
            note: "no dilation in [2^-20, 2^20] bounds log v - log u(a r) on the range".into(),
        });
    };
    if let (Some(s2), Some(s1)) = (sub.a_upper(&grid), sub.a_lower(&grid)) {
        if a2 > 2.0 * s2 || a1 < 0.5 * s1 {
            return Ok(FunctionEquivalence::Counterexample {
                r: r_max,
                note: format!(
                    "required dilation drifts with the range: a2 {s2:.6e} -> {a2:.6e}, a1 {s1:.6e} -> {a1:.6e}"
                ),
            });
        }
    }

    let up = extremes(&full.gaps(a2), &full.radii);
    let lo = extremes(&full.gaps(a1), &full.radii);
    let (lc1, lc2) = (lo.inf, up.sup);

    let dense = probe_radii(r_min, r_max, RECHECK_RADII, with_zero);
    let residual = dense
        .par_iter()
        .map(|&r| -> Result<f64> {
            let lv = v.log_u(r)?;
            let low = lc1 + u.log_u(a1 * r)? - lv;
            let high = lv - lc2 - u.log_u(a2 * r)?;
            Ok(low.max(high).max(0.0))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(FunctionEquivalence::Witness(FunctionEquivalenceWitness {
        c1: lc1.exp(),
        a1,
        c2: lc2.exp(),
        a2,
        checked_range: (if with_zero { 0.0 } else { r_min.max(1e-6) }, r_max),
        max_residual: residual,
    }))
}
