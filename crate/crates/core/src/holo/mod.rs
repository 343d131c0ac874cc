//! Finite-dimensional model of a nuclear scale and of truncated chaos
//! expansions `F(ξ) = Σ ⟨f_n, ξ^⊗n⟩`, with the two norm families and the
//! embedding checks between them.

mod checks;
mod norms;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

pub use checks::{
    coeff_bound_check, embedding_check_51, embedding_check_52, measured_bound, pointwise_check, BoundParams, HoloReport,
    HoloRow, SAFETY_FACTOR,
};
pub use norms::{log_coeff_norm, norm_g, norm_k, NormG, DEFAULT_MULTISTART};

pub const MAX_DIM: usize = 8;
pub const MAX_DEGREE: usize = 10;
pub const CHAOS_SCHEMA: &str = "growthcalc.chaos/1";

/// Diagonal scale `|ξ|_p = |(λ_j^p ξ_j)|` on `ℂ^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuclearScale {
    lambda: Vec<f64>,
    rho: f64,
}

impl NuclearScale {
    /// `λ` nondecreasing with `λ₁ ≥ 1/ρ > 1`, `d ≤ 8`.
    pub fn new(lambda: Vec<f64>, rho: f64) -> Result<Self> {
        if lambda.is_empty() || lambda.len() > MAX_DIM {
            return Err(Error::InvalidInput(format!("dimension must be in 1..={MAX_DIM}, got {}", lambda.len())));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidInput(format!("rho must lie in (0, 1), got {rho}")));
        }
        if lambda.windows(2).any(|w| !(w[0] <= w[1])) || lambda.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidInput("eigenvalues must be finite and nondecreasing".into()));
        }
        if lambda[0] * rho < 1.0 - 1e-12 {
            return Err(Error::InvalidInput(format!(
                "smallest eigenvalue {} is below 1/rho = {}",
                lambda[0],
                1.0 / rho
            )));
        }
        Ok(NuclearScale { lambda, rho })
    }

    /// `λ_j = 2^j`, `ρ = 1/2`.
    pub fn dyadic(d: usize) -> Result<Self> {
        NuclearScale::new((1..=d).map(|j| (j as f64).exp2()).collect(), 0.5)
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `|ξ|_p`; negative levels give the dual norms.
    pub fn norm(&self, xi: &[Complex64], p: i32) -> f64 {
        xi.iter()
            .zip(&self.lambda)
            .map(|(z, l)| z.norm_sqr() * l.powi(2 * p))
            .sum::<f64>()
            .sqrt()
    }

    /// Hilbert–Schmidt norm of the inclusion from level `p` into level `q`.
    pub fn hs_norm(&self, p: i32, q: i32) -> Result<f64> {
        if q > p {
            return Err(Error::InvalidInput(format!("hs_norm needs q <= p, got p={p}, q={q}")));
        }
        Ok(self.lambda.iter().map(|l| l.powi(-2 * (p - q))).sum::<f64>().sqrt())
    }
}

/// Number of distinct orderings of a sorted multi-index.
fn multiplicity(index: &[usize]) -> f64 {
    let fact = |n: usize| (1..=n as u64).product::<u64>();
    let mut m = fact(index.len());
    let mut i = 0;
    while i < index.len() {
        let j = index[i..].iter().take_while(|&&x| x == index[i]).count();
        m /= fact(j);
        i += j;
    }
    m as f64
}

/// All sorted multi-indices of length `n` over `0..d`.
pub fn sorted_indices(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(d: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(d, n, i, cur, out);
            cur.pop();
        }
    }
    rec(d, n, 0, &mut cur, &mut out);
    out
}

/// Symmetric kernels stored once per sorted multi-index; the pairing with
/// `ξ^⊗n` counts every ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct ChaosPolynomial {
    dim: usize,
    max_degree: usize,
    coeffs: Vec<BTreeMap<Vec<usize>, Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    degree: usize,
    index: Vec<usize>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ChaosFile {
    schema: String,
    dim: usize,
    #[serde(rename = "N")]
    n: usize,
    coeffs: Vec<CoeffEntry>,
}

impl ChaosPolynomial {
    pub fn zero(dim: usize, max_degree: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM || max_degree > MAX_DEGREE {
            return Err(Error::InvalidInput(format!(
                "chaos polynomial needs 1 <= dim <= {MAX_DIM} and N <= {MAX_DEGREE}, got dim={dim}, N={max_degree}"
            )));
        }
        Ok(ChaosPolynomial { dim, max_degree, coeffs: vec![BTreeMap::new(); max_degree + 1] })
    }

    /// Sets the kernel entry at `index` (any ordering) to `value`.
    pub fn set(&mut self, index: &[usize], value: Complex64) -> Result<()> {
        let n = index.len();
        if n > self.max_degree || index.iter().any(|&i| i >= self.dim) {
            return Err(Error::InvalidInput(format!("index {index:?} out of range")));
        }
        let mut key = index.to_vec();
        key.sort_unstable();
        if value == Complex64::new(0.0, 0.0) {
            self.coeffs[n].remove(&key);
        } else {
            self.coeffs[n].insert(key, value);
        }
        Ok(())
    }

    pub fn with(mut self, index: &[usize], value: Complex64) -> Result<Self> {
        self.set(index, value)?;
        Ok(self)
    }

    /// Kernel entries drawn independently: real and imaginary parts
    /// standard normal.
    pub fn random(dim: usize, max_degree: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut f = ChaosPolynomial::zero(dim, max_degree)?;
        for n in 0..=max_degree {
            for idx in sorted_indices(dim, n) {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                f.coeffs[n].insert(idx, Complex64::new(re, im));
            }
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for m in &mut out.coeffs {
            for v in m.values_mut() {
                *v *= c;
            }
        }
        out
    }

    /// `(sorted index, multiplicity, entry)` of degree `n`.
    pub fn terms(&self, n: usize) -> impl Iterator<Item = (&[usize], f64, Complex64)> {
        self.coeffs[n].iter().map(|(k, v)| (k.as_slice(), multiplicity(k), *v))
    }

    /// `⟨f_n, ξ^⊗n⟩`.
    pub fn eval_degree(&self, n: usize, xi: &[Complex64]) -> Complex64 {
        self.terms(n)
            .map(|(idx, w, c)| c * w * idx.iter().map(|&i| xi[i]).product::<Complex64>())
            .sum()
    }

    /// `F(ξ)`.
    pub fn eval(&self, xi: &[Complex64]) -> Result<Complex64> {
        if xi.len() != self.dim {
            return Err(Error::InvalidInput(format!("expected {} coordinates, got {}", self.dim, xi.len())));
        }
        Ok((0..=self.max_degree).map(|n| self.eval_degree(n, xi)).sum())
    }

    pub fn to_json(&self) -> Value {
        let coeffs = (0..=self.max_degree)
            .flat_map(|n| {
                self.coeffs[n].iter().map(move |(k, v)| CoeffEntry { degree: n, index: k.clone(), re: v.re, im: v.im })
            })
            .collect();
        serde_json::to_value(ChaosFile { schema: CHAOS_SCHEMA.into(), dim: self.dim, n: self.max_degree, coeffs })
            .expect("chaos file serializes")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let file: ChaosFile = serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidInput(format!("chaos file: {e}")))?;
        if file.schema != CHAOS_SCHEMA {
            return Err(Error::InvalidInput(format!("unsupported schema '{}'", file.schema)));
        }
        let mut f = ChaosPolynomial::zero(file.dim, file.n)?;
        for e in file.coeffs {
            if e.index.len() != e.degree {
                return Err(Error::InvalidInput(format!(
                    "entry of degree {} has index of length {}",
                    e.degree,
                    e.index.len()
                )));
            }
            if !(e.re.is_finite() && e.im.is_finite()) {
                return Err(Error::InvalidInput("coefficients must be finite".into()));
            }
            f.set(&e.index, Complex64::new(e.re, e.im))?;
        }
        Ok(f)
    }
}

/// Random point with `|ξ|_{-p}` log-uniform on `[s_min, s_max]`; the
/// direction has independent standard normal real and imaginary parts.
pub fn sample_xi(scale: &NuclearScale, p: i32, s_min: f64, s_max: f64, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut w: Vec<Complex64> = (0..scale.dim())
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = scale.norm(&w, -p);
    let s = (rng.random_range(s_min.ln()..=s_max.ln())).exp();
    for z in &mut w {
        *z *= s / n;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hs_norm_examples() {
        let s = NuclearScale::new(vec![2.0, 4.0], 0.5).unwrap();
        assert!((s.hs_norm(1, 0).unwrap() - 0.3125f64.sqrt()).abs() < 1e-15);
        let v = s.hs_norm(2, 0).unwrap();
        assert!((v - (1.0 / 16.0 + 1.0 / 256.0f64).sqrt()).abs() < 1e-15);
        assert!((v - 0.2577).abs() < 1e-4 && v <= (-1f64).exp());
        assert!((s.hs_norm(3, 3).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(s.hs_norm(0, 1).is_err());
    }

    #[test]
    fn scale_invariants() {
        let s = NuclearScale::dyadic(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let xi = sample_xi(&s, 0, 1e-2, 1e2, &mut rng);
            for p in -2..3 {
                for q in -2..=p {
                    assert!(s.norm(&xi, q) <= s.rho().powi(p - q) * s.norm(&xi, p) * (1.0 + 1e-12));
                }
            }
        }
        assert!(NuclearScale::new(vec![1.5, 4.0], 0.5).is_err());
        assert!(NuclearScale::new(vec![4.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let f = ChaosPolynomial::zero(2, 0).unwrap().with(&[], c(1.5, -2.0)).unwrap();
        assert_eq!(f.eval(&[c(9.0, 1.0), c(-3.0, 0.0)]).unwrap(), c(1.5, -2.0));
        let f = ChaosPolynomial::zero(2, 1).unwrap().with(&[0], c(1.0, 0.0)).unwrap();
        assert_eq!(f.eval(&[c(3.0, 1.0), c(5.0, 0.0)]).unwrap(), c(3.0, 1.0));
        // symmetric kernel 1/2 at (1,2) and (2,1)
        let f = ChaosPolynomial::zero(2, 2).unwrap().with(&[1, 0], c(0.5, 0.0)).unwrap();
        assert_eq!(f.eval(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap(), c(6.0, 0.0));
        assert!(f.eval(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn evaluation_matches_full_tensor_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = ChaosPolynomial::random(3, 4, &mut rng).unwrap();
        let s = NuclearScale::dyadic(3).unwrap();
        let xi = sample_xi(&s, 0, 0.5, 2.0, &mut rng);
        // oracle: sum over every ordered index tuple
        let mut direct = c(0.0, 0.0);
        for n in 0..=4usize {
            for flat in 0..3usize.pow(n as u32) {
                let mut idx: Vec<usize> = (0..n).map(|j| flat / 3usize.pow(j as u32) % 3).collect();
                let prod: Complex64 = idx.iter().map(|&i| xi[i]).product();
                idx.sort_unstable();
                direct += f.coeffs[n][&idx] * prod;
            }
        }
        assert!((f.eval(&xi).unwrap() - direct).norm() < 1e-10 * direct.norm().max(1.0));
    }

    #[test]
    fn index_counts() {
        assert_eq!(sorted_indices(2, 4).len(), 5);
        assert_eq!(sorted_indices(8, 10).len(), 19448);
        assert_eq!(multiplicity(&[0, 0, 1, 2]), 12.0);
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = ChaosPolynomial::random(2, 3, &mut rng).unwrap();
        let v = f.to_json();
        assert_eq!(v["schema"], CHAOS_SCHEMA);
        assert_eq!(ChaosPolynomial::from_json(&v).unwrap(), f);
        let mut bad = v.clone();
        bad["coeffs"][1]["index"] = serde_json::json!([0, 1, 1]);
        assert!(ChaosPolynomial::from_json(&bad).is_err());
        assert!(ChaosPolynomial::zero(9, 2).is_err());
    }
}
