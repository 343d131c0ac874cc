use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::growthfn::GrowthFunction;
use crate::legendre::suites::{Verdict, INEQUALITY_TOL};
use crate::legendre::{ell_integer, l_function};
use crate::{Error, Result};

use super::norms::{log_coeff_norm, norm_g, norm_k};
use super::{sample_xi, ChaosPolynomial, NuclearScale};

/// Inflation applied to every supremum estimate that enters a check.
pub const SAFETY_FACTOR: f64 = 1.05;

const SAMPLE_RANGE: (f64, f64) = (1e-2, 10.0);

/// Growth bound `|F(ξ)| ≤ K u(a |ξ|_{-p}²)^{1/2}` and the target level `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub k: f64,
    pub a: f64,
    pub p: i32,
    pub q: i32,
}

/// Log-scale comparison `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloRow {
    pub label: String,
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl HoloRow {
    fn new(label: &str, index: usize, lhs: f64, rhs: f64) -> Self {
        HoloRow { label: label.into(), index, lhs, rhs, slack: rhs - lhs }
    }

    pub fn violation(&self) -> f64 {
        let v = (self.lhs - self.rhs) / self.rhs.abs().max(1.0);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloReport {
    pub check: String,
    pub params: Value,
    pub max_violation: f64,
    pub min_slack: f64,
    pub verdict: Verdict,
    pub note: String,
    pub rows: Vec<HoloRow>,
}

impl HoloReport {
    fn new(check: &str, params: Value, note: String, rows: Vec<HoloRow>) -> Self {
        let max_violation = rows.iter().map(HoloRow::violation).fold(0.0, f64::max);
        let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
        let verdict = if max_violation <= INEQUALITY_TOL { Verdict::Pass } else { Verdict::Fail };
        HoloReport { check: check.into(), params, max_violation, min_slack, verdict, note, rows }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// `|f_n|_q² ≤ K² (a e² ‖i_{p,q}‖²_HS)ⁿ ℓ_u(n)` for every degree.
///
/// `K` comes from the caller. When it is a measured supremum it is only a
/// lower bound; inflate it by [`SAFETY_FACTOR`] first.
pub fn coeff_bound_check(
    f: &ChaosPolynomial,
    u: &GrowthFunction,
    scale: &NuclearScale,
    params: BoundParams,
) -> Result<HoloReport> {
    if !(params.k > 0.0 && params.a > 0.0) {
        return Err(Error::InvalidInput(format!("K and a must be positive, got K={}, a={}", params.k, params.a)));
    }
    let hs = scale.hs_norm(params.p, params.q)?;
    let step = params.a.ln() + 2.0 + 2.0 * hs.ln();
    let rows = (0..=f.max_degree())
        .map(|n| {
            let lhs = 2.0 * log_coeff_norm(f, scale, n, params.q);
            let rhs = 2.0 * params.k.ln() + n as f64 * step + ell_integer(u, n)?;
            Ok(HoloRow::new("coefficient", n, lhs, rhs))
        })
        .collect::<Result<_>>()?;
    Ok(HoloReport::new(
        "coeff-bound",
        json!({"u": u.describe(), "K": params.k, "a": params.a, "p": params.p, "q": params.q, "hs": hs}),
        "K is taken as given; a measured K must already carry the safety factor".into(),
        rows,
    ))
}

/// `K = SAFETY_FACTOR · sup_ξ |F(ξ)| u(a |ξ|_{-p}²)^{-1/2}` with the
/// supremum estimated by [`norm_g`].
pub fn measured_bound(
    f: &ChaosPolynomial,
    u: &GrowthFunction,
    scale: &NuclearScale,
    p: i32,
    a: f64,
    multistart: usize,
    seed: u64,
) -> Result<f64> {
    Ok(SAFETY_FACTOR * norm_g(f, &u.dilated(a, 1.0), scale, p, multistart, seed)?.lower_bound)
}

/// `‖F‖_{u,q} ≤ (1 - e² ‖i_{p,q}‖²_HS)^{-1/2} |||F|||_{u,p}`.
///
/// The right side uses the supremum estimate times [`SAFETY_FACTOR`]. The
/// estimate alone errs on the strict side; the inflation trades that for
/// robustness against a supremum missed by less than five percent.
pub fn embedding_check_51(
    f: &ChaosPolynomial,
    u: &GrowthFunction,
    scale: &NuclearScale,
    p: i32,
    q: i32,
    multistart: usize,
    seed: u64,
) -> Result<HoloReport> {
    let hs = scale.hs_norm(p, q)?;
    if hs > (-1f64).exp() {
        return Err(Error::PreconditionViolated(format!(
            "Hilbert-Schmidt norm {hs:.6} of the inclusion {p} -> {q} exceeds 1/e"
        )));
    }
    let g = norm_g(f, u, scale, p, multistart, seed)?;
    let k = norm_k(f, u, scale, q)?;
    let factor = -0.5 * (1.0 - (2.0 + 2.0 * hs.ln()).exp()).ln();
    let rhs = factor + g.log_value + SAFETY_FACTOR.ln();
    let strict = k.ln() <= factor + g.log_value;
    Ok(HoloReport::new(
        "embedding-k-by-g",
        json!({
            "u": u.describe(), "p": p, "q": q, "hs": hs, "norm_k": k, "norm_g_lower_bound": g.lower_bound,
            "safety_factor": SAFETY_FACTOR, "holds_without_inflation": strict,
        }),
        "right side is a supremum estimate from below, inflated by the safety factor".into(),
        vec![HoloRow::new("norm", 0, k.ln(), rhs)],
    ))
}

/// `|||F|||_{u,p-1} ≤ √e (2ρ² log 1/ρ)^{-1/2} ‖F‖_{u,p}`.
///
/// The left side is a supremum estimated from below, so it is inflated by
/// [`SAFETY_FACTOR`]; a pass is evidence, a failure is conclusive.
pub fn embedding_check_52(
    f: &ChaosPolynomial,
    u: &GrowthFunction,
    scale: &NuclearScale,
    p: i32,
    multistart: usize,
    seed: u64,
) -> Result<HoloReport> {
    if p < 1 {
        return Err(Error::InvalidInput(format!("embedding needs p >= 1, got {p}")));
    }
    if !u.is_log_exp_convex() {
        return Err(Error::PreconditionViolated(format!("{} is not (log, exp)-convex", u.name())));
    }
    let rho = scale.rho();
    let g = norm_g(f, u, scale, p - 1, multistart, seed)?;
    let k = norm_k(f, u, scale, p)?;
    let rhs = 0.5 - 0.5 * (2.0 * rho * rho * (1.0 / rho).ln()).ln() + k.ln();
    Ok(HoloReport::new(
        "embedding-g-by-k",
        json!({
            "u": u.describe(), "p": p, "rho": rho, "norm_k": k, "norm_g_lower_bound": g.lower_bound,
            "safety_factor": SAFETY_FACTOR,
        }),
        "left side is a supremum estimate from below, inflated by the safety factor".into(),
        vec![HoloRow::new("norm", 0, g.log_value + SAFETY_FACTOR.ln(), rhs)],
    ))
}

/// Pointwise bounds at `samples` random `ξ` for a polynomial whose
/// coefficients satisfy `|f_n|_p ≤ K aⁿ ℓ_u(n)^{1/2}` with the smallest such
/// `K`:
///
/// * `|F(ξ)| ≤ √2 e K u(2e a² |ξ|_{-p}²)^{1/2}`
/// * with `series`, also `|F(ξ)| ≤ √2 K L_u(2a² |ξ|_{-p}²)^{1/2}` and
///   `L_u(|ξ|_{-p}²) ≤ L_u(ρ² |ξ|_{-p+1}²) ≤ e (2ρ² log 1/ρ)^{-1} u(|ξ|_{-p+1}²)`.
#[allow(clippy::too_many_arguments)]
pub fn pointwise_check(
    f: &ChaosPolynomial,
    u: &GrowthFunction,
    scale: &NuclearScale,
    p: i32,
    a: f64,
    samples: usize,
    series: bool,
    seed: u64,
) -> Result<HoloReport> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput(format!("a must be positive, got {a}")));
    }
    let log_k = (0..=f.max_degree())
        .map(|n| Ok(log_coeff_norm(f, scale, n, p) - n as f64 * a.ln() - 0.5 * ell_integer(u, n)?))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let rho = scale.rho();
    let half_ln2 = 0.5 * std::f64::consts::LN_2;
    let chain_const = 1.0 - (2.0 * rho * rho * (1.0 / rho).ln()).ln();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for i in 0..samples {
        let xi = sample_xi(scale, p, SAMPLE_RANGE.0, SAMPLE_RANGE.1, &mut rng);
        let s2 = scale.norm(&xi, -p).powi(2);
        let lf = f.eval(&xi)?.norm().ln();
        let b = half_ln2 + 1.0 + log_k + 0.5 * u.log_u(2.0 * std::f64::consts::E * a * a * s2)?;
        rows.push(HoloRow::new("growth", i, lf, b));
        if series {
            let l = l_function(u, (2.0 * a * a * s2).ln())?;
            rows.push(HoloRow::new("series", i, lf, log_k + half_ln2 + 0.5 * l));
            let t2 = scale.norm(&xi, 1 - p).powi(2);
            let l_here = l_function(u, s2.ln())?;
            let l_up = l_function(u, (rho * rho * t2).ln())?;
            rows.push(HoloRow::new("level-shift", i, l_here, l_up));
            rows.push(HoloRow::new("level-bound", i, l_up, chain_const + u.log_u(t2)?));
        }
    }
    Ok(HoloReport::new(
        "pointwise",
        json!({"u": u.describe(), "p": p, "a": a, "K": log_k.exp(), "samples": samples, "seed": seed}),
        "K is the exact smallest coefficient constant".into(),
        rows,
    ))
}
