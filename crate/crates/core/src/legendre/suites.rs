//! Grid verification of the quantitative statements of the transform calculus.
//!
//! Every suite evaluates both sides of an inequality or identity in log scale
//! at each grid point. Inequalities `lhs ≤ rhs` are scored by
//! `(lhs - rhs) / max(1, |rhs|)` and may not exceed `1e-9`; identities by
//! `|lhs - rhs|`, at most `1e-7` unless a suite states otherwise.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::growthfn::{classify_convexity, ConvexityKind, GrowthFunction, ProbeSpec, Repr};
use crate::numerics::{ln_factorial, maximize_concave_with, xlogx, Edge, SearchOptions};
use crate::sequences::{egf, gen_power_factorial, EgfVariant};
use crate::{Error, Result};

use super::{dual, ell, ell_integer, l_function, l_sharp, T_CAP};

pub const INEQUALITY_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Thm31Upper,
    Thm31Lower,
    LemA1,
    LemA2,
    Thm42,
    Thm43,
    Involution,
    KsSandwich,
    Lem35,
    Stirling,
    A4,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Thm31Upper,
        Suite::Thm31Lower,
        Suite::LemA1,
        Suite::LemA2,
        Suite::Thm42,
        Suite::Thm43,
        Suite::Involution,
        Suite::KsSandwich,
        Suite::Lem35,
        Suite::Stirling,
        Suite::A4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Thm31Upper => "thm31-upper",
            Suite::Thm31Lower => "thm31-lower",
            Suite::LemA1 => "lem-a1",
            Suite::LemA2 => "lem-a2",
            Suite::Thm42 => "thm42",
            Suite::Thm43 => "thm43",
            Suite::Involution => "involution",
            Suite::KsSandwich => "ks-sandwich",
            Suite::Lem35 => "lem35",
            Suite::Stirling => "stirling",
            Suite::A4 => "a4",
        }
    }

    /// The statement the suite checks.
    pub fn statement(self) -> &'static str {
        match self {
            Suite::Thm31Upper => "L_u(r) <= (e a / log a) u(a r)",
            Suite::Thm31Lower => "u(r) <= C L_u(2^k r)",
            Suite::LemA1 => "l(n) l(m) <= l(0) 2^(k(n+m)) l(n+m) and l(0) l(n+m) <= l(n) l(m)",
            Suite::LemA2 => "r L_u(r) <= (l(0)/l(1)) L_u(2^k r)",
            Suite::Thm42 => "l_{u*}(t) = e^(2t) / (l_u(t) t^(2t))",
            Suite::Thm43 => "L#_u(r) <= L_{u*}(r) <= e^2 L#_u(2r)",
            Suite::Involution => "u**(r) = u(r)",
            Suite::KsSandwich => "power-factorial generating functions between explicit exponentials",
            Suite::Lem35 => "l_u(t) t^(kt) is log-convex",
            Suite::Stirling => "1/n! <= (e/n)^n <= e 2^(n/2) / n!",
            Suite::A4 => "(n+m)^(n+m) / (n^n m^m) <= 2^(n+m)",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

/// Inputs of a suite; unset fields take per-suite defaults.
#[derive(Clone, Debug, Default)]
pub struct SuiteParams {
    pub u: Option<GrowthFunction>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub k: Option<f64>,
    pub n_max: Option<usize>,
    pub range: Option<(f64, f64)>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Eq,
}

/// One comparison; `x` is `t`, `r` or `n`, and `y` the second index of pair
/// grids.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub label: &'static str,
    pub x: f64,
    pub y: Option<f64>,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl Row {
    fn le(label: &'static str, x: f64, y: Option<f64>, lhs: f64, rhs: f64) -> Row {
        Row { label, x, y, relation: Relation::Le, lhs, rhs, slack: rhs - lhs }
    }

    fn eq(label: &'static str, x: f64, y: Option<f64>, lhs: f64, rhs: f64) -> Row {
        Row { label, x, y, relation: Relation::Eq, lhs, rhs, slack: -(lhs - rhs).abs() }
    }

    /// Scored violation; positive means the relation fails before tolerance.
    pub fn violation(&self) -> f64 {
        let v = match self.relation {
            Relation::Le => (self.lhs - self.rhs) / self.rhs.abs().max(1.0),
            Relation::Eq => (self.lhs - self.rhs).abs(),
        };
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub params: Value,
    pub grid: Value,
    pub max_violation: f64,
    pub witness: Value,
    pub verdict: Verdict,
    #[serde(skip)]
    pub rows: Vec<Row>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn finish(suite: Suite, params: Value, grid: Value, extra: Value, rows: Vec<Row>, tol: f64) -> SuiteReport {
    let max_violation = rows.iter().map(Row::violation).fold(0.0, f64::max);
    let tight = rows
        .iter()
        .max_by(|a, b| a.violation().total_cmp(&b.violation()));
    let mut witness = match tight {
        Some(r) => json!({
            "label": r.label, "x": r.x, "y": r.y, "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack,
        }),
        None => json!({}),
    };
    if let (Value::Object(w), Value::Object(e)) = (&mut witness, extra) {
        w.extend(e);
    }
    let verdict = if !rows.is_empty() && max_violation <= tol { Verdict::Pass } else { Verdict::Fail };
    SuiteReport { suite, params, grid, max_violation, witness, verdict, rows }
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Smallest `k` for which `log u(x^k)` is convex: exact for the closed-form
/// families, otherwise the first grid pass in `{1, 1.25, 1.5, 2, 3, 4, 8}`.
pub fn convexity_exponent(u: &GrowthFunction) -> Option<f64> {
    match u.repr() {
        Repr::KsTest { beta } => Some(1.0 + beta),
        Repr::KsGen { beta } => Some(1.0 - beta),
        Repr::IterExp { .. } => Some(1.0),
        Repr::Dilated { base, .. } => convexity_exponent(base),
        _ => [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0]
            .into_iter()
            .find(|&k| classify_convexity(u, ConvexityKind::LogXk(k), &ProbeSpec::default()).passes()),
    }
}

/// `(t*, log ℓ_u(t*))` with `t* = argmax ℓ_u`.
pub fn ell_peak(u: &GrowthFunction) -> Result<(f64, f64)> {
    let opts = SearchOptions::default()
        .with_lower(Edge::Closed(0.0))
        .with_upper(Edge::Cap(T_CAP));
    let ext = maximize_concave_with(|t| ell(u, t).map_or(f64::NAN, |e| e.log_ell), 1.0, &opts)?;
    Ok((ext.arg, ext.value))
}

/// The constant `C` of the lower bound `u(r) ≤ C L_u(2^k r)` together with
/// the index `n₀` past which `ℓ_u` decreases.
pub fn lower_bound_constant(u: &GrowthFunction) -> Result<(f64, usize)> {
    let (t_star, _) = ell_peak(u)?;
    let n0 = t_star.ceil() as usize;
    let lu1 = u.log_u(1.0)?;
    let l0 = ell_integer(u, 0)?;
    let l1 = ell_integer(u, 1)?;
    let ln0 = ell_integer(u, n0 + 1)?;
    Ok(([lu1 - l0, l0 - l1, lu1 - ln0].into_iter().fold(f64::NEG_INFINITY, f64::max), n0))
}

struct Ctx {
    u: GrowthFunction,
    params: SuiteParams,
}

impl Ctx {
    fn range(&self, lo: f64, hi: f64) -> (f64, f64) {
        self.params.range.unwrap_or((lo, hi))
    }

    fn points(&self, n: usize) -> usize {
        self.params.points.unwrap_or(n).max(1)
    }

    fn k(&self) -> Result<f64> {
        match self.params.k {
            Some(k) => Ok(k),
            None => convexity_exponent(&self.u).ok_or_else(|| {
                Error::PreconditionViolated(format!("{} is not (log, x^k)-convex for k <= 8", self.u.name()))
            }),
        }
    }
}

fn default_u(suite: Suite) -> GrowthFunction {
    match suite {
        Suite::Thm42 => GrowthFunction::ks(0.0),
        Suite::Involution => GrowthFunction::ks(1.0),
        _ => GrowthFunction::ks(0.5),
    }
}

fn par_rows<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<Vec<Row>> + Sync + Send) -> Result<Vec<Row>> {
    let chunks: Vec<Vec<Row>> = items.par_iter().map(f).collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Runs one suite. Numerical failures while evaluating a side are errors;
/// violated relations are reported through the verdict.
pub fn verify_suite(suite: Suite, params: &SuiteParams) -> Result<SuiteReport> {
    let u = params.u.clone().unwrap_or_else(|| default_u(suite));
    let ctx = Ctx { u, params: params.clone() };
    let ineq_tol = params.tol.unwrap_or(INEQUALITY_TOL);
    let id_tol = params.tol.unwrap_or(match suite {
        Suite::Involution => 1e-6,
        _ => IDENTITY_TOL,
    });
    let fn_params = || json!({ "u": ctx.u.describe() });
    let u = &ctx.u;

    match suite {
        Suite::Thm31Upper => {
            let a = params.a.unwrap_or(std::f64::consts::E);
            if !(a > 1.0) {
                return Err(Error::InvalidInput(format!("thm31-upper needs a > 1, got {a}")));
            }
            let (lo, hi) = ctx.range(1e-2, 1e2);
            let radii = geometric(lo, hi, ctx.points(32));
            let log_c = (std::f64::consts::E * a / a.ln()).ln();
            let rows = par_rows(&radii, |&r| {
                Ok(vec![Row::le("upper", r, None, l_function(u, r.ln())?, log_c + u.log_u(a * r)?)])
            })?;
            let mut p = fn_params();
            p["a"] = json!(a);
            Ok(finish(suite, p, json!({"r": [lo, hi], "points": radii.len()}), json!({}), rows, ineq_tol))
        }
        Suite::Thm31Lower => {
            let k = ctx.k()?;
            let (log_c, n0) = lower_bound_constant(u)?;
            let (lo, hi) = ctx.range(1e-2, 1e2);
            let radii = geometric(lo, hi, ctx.points(32));
            let dil = k * std::f64::consts::LN_2;
            let rows = par_rows(&radii, |&r| {
                Ok(vec![Row::le("lower", r, None, u.log_u(r)?, log_c + l_function(u, r.ln() + dil)?)])
            })?;
            let mut p = fn_params();
            p["k"] = json!(k);
            Ok(finish(
                suite,
                p,
                json!({"r": [lo, hi], "points": radii.len()}),
                json!({"C": log_c.exp(), "n0": n0}),
                rows,
                ineq_tol,
            ))
        }
        Suite::LemA1 => {
            let k = ctx.k()?;
            let n_max = params.n_max.unwrap_or(30);
            let ells: Vec<f64> = (0..=2 * n_max).map(|n| ell_integer(u, n)).collect::<Result<_>>()?;
            let mut rows = Vec::new();
            for n in 0..=n_max {
                for m in 0..=n_max {
                    let (x, y) = (n as f64, Some(m as f64));
                    let pair = ells[n] + ells[m];
                    let dil = k * (n + m) as f64 * std::f64::consts::LN_2;
                    rows.push(Row::le("product-lower", x, y, pair, ells[0] + dil + ells[n + m]));
                    rows.push(Row::le("product-upper", x, y, ells[0] + ells[n + m], pair));
                }
            }
            let mut p = fn_params();
            p["k"] = json!(k);
            Ok(finish(suite, p, json!({"n_max": n_max, "m_max": n_max}), json!({}), rows, ineq_tol))
        }
        Suite::LemA2 => {
            let k = ctx.k()?;
            let (lo, hi) = ctx.range(1e-2, 1e2);
            let radii = geometric(lo, hi, ctx.points(32));
            let log_c = ell_integer(u, 0)? - ell_integer(u, 1)?;
            let dil = k * std::f64::consts::LN_2;
            let rows = par_rows(&radii, |&r| {
                let lr = r.ln();
                Ok(vec![Row::le("shift", r, None, lr + l_function(u, lr)?, log_c + l_function(u, lr + dil)?)])
            })?;
            let mut p = fn_params();
            p["k"] = json!(k);
            Ok(finish(suite, p, json!({"r": [lo, hi], "points": radii.len()}), json!({}), rows, ineq_tol))
        }
        Suite::Thm42 => {
            let (lo, hi) = ctx.range(0.5, 30.0);
            let ts = linear(lo, hi, ctx.points(60));
            let us = GrowthFunction::dual_of(u);
            let rows = par_rows(&ts, |&t| {
                let lhs = ell(&us, t)?.log_ell;
                let rhs = 2.0 * t - ell(u, t)?.log_ell - 2.0 * xlogx(t);
                Ok(vec![Row::eq("dual-ell", t, None, lhs, rhs)])
            })?;
            Ok(finish(suite, fn_params(), json!({"t": [lo, hi], "points": ts.len()}), json!({}), rows, id_tol))
        }
        Suite::Thm43 => {
            let (lo, hi) = ctx.range(1e-2, 10.0);
            let radii = geometric(lo, hi, ctx.points(32));
            let us = GrowthFunction::dual_of(u);
            let rows = par_rows(&radii, |&r| {
                let lr = r.ln();
                let sharp = l_sharp(u, lr)?;
                let sharp2 = l_sharp(u, lr + std::f64::consts::LN_2)?;
                let lus = l_function(&us, lr)?;
                Ok(vec![
                    Row::le("lower", r, None, sharp, lus),
                    Row::le("upper", r, None, lus, 2.0 + sharp2),
                ])
            })?;
            Ok(finish(suite, fn_params(), json!({"r": [lo, hi], "points": radii.len()}), json!({}), rows, ineq_tol))
        }
        Suite::Involution => {
            let (lo, hi) = ctx.range(1.0, 1e4);
            let radii = geometric(lo, hi, ctx.points(32));
            let us = GrowthFunction::dual_of(u);
            let rows = par_rows(&radii, |&r| Ok(vec![Row::eq("u**", r, None, dual(&us, r)?, u.log_u(r)?)]))?;
            Ok(finish(suite, fn_params(), json!({"r": [lo, hi], "points": radii.len()}), json!({}), rows, id_tol))
        }
        Suite::KsSandwich => {
            let betas = match params.beta {
                Some(b) => vec![b],
                None => vec![0.25, 0.5],
            };
            let (lo, hi) = ctx.range(1e-2, 1e2);
            let radii = geometric(lo, hi, ctx.points(32));
            let ln2 = std::f64::consts::LN_2;
            let mut rows = Vec::new();
            for &b in &betas {
                let seq = gen_power_factorial(b, 64)?;
                rows.extend(par_rows(&radii, |&r| {
                    let lr = r.ln();
                    let ga = egf(&seq, lr, EgfVariant::GAlpha)?.log_value;
                    let gi = egf(&seq, lr, EgfVariant::GInvAlpha)?.log_value;
                    let p = |s: f64| (lr / s).exp();
                    Ok(vec![
                        Row::le("c-lower", r, Some(b), (1.0 - b) * p(1.0 - b), ga),
                        Row::le("c-upper", r, Some(b), ga, b * ln2 + (1.0 - b) * (b / (1.0 - b) * ln2).exp() * p(1.0 - b)),
                        Row::le("d-lower", r, Some(b), -b * ln2 + (1.0 + b) * (-b / (1.0 + b) * ln2).exp() * p(1.0 + b), gi),
                        Row::le("d-upper", r, Some(b), gi, (1.0 + b) * p(1.0 + b)),
                    ])
                })?);
            }
            Ok(finish(
                suite,
                json!({"beta": betas}),
                json!({"r": [lo, hi], "points": radii.len()}),
                json!({}),
                rows,
                ineq_tol,
            ))
        }
        Suite::Lem35 => {
            let k = ctx.k()?;
            let (lo, hi) = ctx.range(0.25, 40.0);
            let ts = linear(lo, hi, ctx.points(160));
            let g: Vec<f64> = ts
                .par_iter()
                .map(|&t| ell(u, t).map(|e| e.log_ell + k * xlogx(t)))
                .collect::<Result<_>>()?;
            let rows = (1..ts.len().saturating_sub(1))
                .map(|i| {
                    let lam = (ts[i + 1] - ts[i]) / (ts[i + 1] - ts[i - 1]);
                    Row::le("midpoint", ts[i], None, g[i], lam * g[i - 1] + (1.0 - lam) * g[i + 1])
                })
                .collect();
            let mut p = fn_params();
            p["k"] = json!(k);
            Ok(finish(suite, p, json!({"t": [lo, hi], "points": ts.len()}), json!({}), rows, ineq_tol))
        }
        Suite::Stirling => {
            let n_max = params.n_max.unwrap_or(100);
            let rows = (0..=n_max)
                .flat_map(|n| {
                    let nf = n as f64;
                    let lf = ln_factorial(n as u64);
                    let mid = nf - xlogx(nf);
                    [
                        Row::le("lower", nf, None, -lf, mid),
                        Row::le("upper", nf, None, mid, 1.0 + 0.5 * nf * std::f64::consts::LN_2 - lf),
                    ]
                })
                .collect();
            Ok(finish(suite, json!({}), json!({"n_max": n_max}), json!({}), rows, ineq_tol))
        }
        Suite::A4 => {
            let n_max = params.n_max.unwrap_or(50);
            let mut rows = Vec::new();
            for n in 0..=n_max {
                for m in 0..=n_max {
                    let (nf, mf) = (n as f64, m as f64);
                    let lhs = xlogx(nf + mf) - xlogx(nf) - xlogx(mf);
                    rows.push(Row::le("entropy", nf, Some(mf), lhs, (nf + mf) * std::f64::consts::LN_2));
                }
            }
            Ok(finish(suite, json!({}), json!({"n_max": n_max, "m_max": n_max}), json!({}), rows, ineq_tol))
        }
    }
}
