use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::growthfn::GrowthFunction;
use crate::legendre::ell_integer;
use crate::numerics::{log_add_exp, minimize_scan, Edge, SearchOptions};
use crate::{Error, Result};

use super::{ChaosPolynomial, NuclearScale};

pub const DEFAULT_MULTISTART: usize = 16;
const RADIAL_POINTS: usize = 129;
const LOG_S_RANGE: (f64, f64) = (-9.2, 9.2);
const PATTERN_EVALS: usize = 4000;

/// `log |f_n|_p`.
pub fn log_coeff_norm(f: &ChaosPolynomial, scale: &NuclearScale, n: usize, p: i32) -> f64 {
    let lam = scale.lambda();
    let sq = f
        .terms(n)
        .map(|(idx, w, c)| w * c.norm_sqr() * idx.iter().map(|&i| lam[i].powi(2 * p)).product::<f64>())
        .sum::<f64>();
    0.5 * sq.ln()
}

fn check_dims(f: &ChaosPolynomial, scale: &NuclearScale) -> Result<()> {
    if f.dim() != scale.dim() {
        return Err(Error::InvalidInput(format!(
            "polynomial has dimension {}, scale has {}",
            f.dim(),
            scale.dim()
        )));
    }
    Ok(())
}

/// `‖F‖_{u,p} = (Σ |f_n|_p² / ℓ_u(n))^{1/2}`.
pub fn norm_k(f: &ChaosPolynomial, u: &GrowthFunction, scale: &NuclearScale, p: i32) -> Result<f64> {
    check_dims(f, scale)?;
    let mut acc = f64::NEG_INFINITY;
    for n in 0..=f.max_degree() {
        acc = log_add_exp(acc, 2.0 * log_coeff_norm(f, scale, n, p) - ell_integer(u, n)?);
    }
    Ok((0.5 * acc).exp())
}

/// Best value found for `sup_ξ |F(ξ)| u(|ξ|_{-p}²)^{-1/2}`.
///
/// This is a lower bound of the supremum, never an upper bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormG {
    pub lower_bound: f64,
    pub log_value: f64,
    pub argsup: Vec<(f64, f64)>,
    pub starts: usize,
}

struct Objective<'a> {
    f: &'a ChaosPolynomial,
    u: &'a GrowthFunction,
    scale: &'a NuclearScale,
    p: i32,
}

impl Objective<'_> {
    fn at(&self, xi: &[Complex64]) -> f64 {
        let s2 = self.scale.norm(xi, -self.p).powi(2);
        let fv = self.f.eval(xi).map_or(0.0, |z| z.norm());
        match self.u.log_u(s2) {
            Ok(lu) if fv > 0.0 => fv.ln() - 0.5 * lu,
            _ => f64::NEG_INFINITY,
        }
    }

    fn at_real(&self, x: &[f64]) -> f64 {
        let xi: Vec<Complex64> = x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        self.at(&xi)
    }
}

/// Radial search along `w` (normalized to `|w|_{-p} = 1`), then compass
/// search over the real coordinates of `ξ`.
fn climb(obj: &Objective<'_>, w: &[Complex64]) -> (f64, Vec<f64>) {
    let opts = SearchOptions::default()
        .with_lower(Edge::Closed(LOG_S_RANGE.0))
        .with_upper(Edge::Closed(LOG_S_RANGE.1));
    let radial = |z: f64| {
        let s = z.exp();
        let xi: Vec<Complex64> = w.iter().map(|c| c * s).collect();
        -obj.at(&xi)
    };
    let s = minimize_scan(radial, RADIAL_POINTS, &opts).map_or(1.0, |e| e.arg.exp());
    let mut x: Vec<f64> = w.iter().flat_map(|c| [c.re * s, c.im * s]).collect();
    let mut best = obj.at_real(&x);
    let mut step = 0.1 * x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-3);
    let mut evals = 0;
    while evals < PATTERN_EVALS && step > 1e-10 * x.iter().fold(1.0f64, |m, v| m.max(v.abs())) {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + dir * step;
                let v = obj.at_real(&x);
                evals += 1;
                if v > best {
                    best = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, x)
}

/// `|||F|||_{u,p} = sup_ξ |F(ξ)| u(|ξ|_{-p}²)^{-1/2}` estimated from below by
/// `multistart` seeded climbs plus the point `ξ = 0`. Starts run in parallel;
/// the winner is the best value with ties going to the earliest start, so the
/// result depends only on the seed.
pub fn norm_g(
    f: &ChaosPolynomial,
    u: &GrowthFunction,
    scale: &NuclearScale,
    p: i32,
    multistart: usize,
    seed: u64,
) -> Result<NormG> {
    check_dims(f, scale)?;
    let obj = Objective { f, u, scale, p };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<Complex64>> = (0..multistart.max(1))
        .map(|_| {
            let w: Vec<Complex64> = (0..scale.dim())
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let n = scale.norm(&w, -p);
            w.into_iter().map(|c| c / n).collect()
        })
        .collect();
    let results: Vec<(f64, Vec<f64>)> = starts.par_iter().map(|w| climb(&obj, w)).collect();
    let origin = u
        .log_at_zero()
        .map_or(f64::NEG_INFINITY, |lu0| {
            let v = f.eval_degree(0, &vec![Complex64::new(0.0, 0.0); scale.dim()]).norm();
            if v > 0.0 { v.ln() - 0.5 * lu0 } else { f64::NEG_INFINITY }
        });
    let mut best = (origin, vec![0.0; 2 * scale.dim()]);
    for r in results {
        if r.0 > best.0 {
            best = r;
        }
    }
    Ok(NormG {
        lower_bound: best.0.exp(),
        log_value: best.0,
        argsup: best.1.chunks(2).map(|c| (c[0], c[1])).collect(),
        starts: multistart,
    })
}
