//! Bell numbers of order `k`: `b_k(n) = n! [r^n] exp_k(r) / exp_k(0)`.
//!
//! With `E_k = exp_k / exp_k(0)` the normalized generating functions satisfy
//! `E_1(r) = e^r` and `E_k = exp(exp_{k-1}(0) · (E_{k-1} - 1))`, so each order
//! is one exponential-of-power-series composition on top of the previous one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::numerics::{ln_factorial, log_add_exp};

/// Largest degree computed with exact rationals.
pub const EXACT_DEGREE_CAP: usize = 60;

/// `ln exp_j(0)`, i.e. `exp_{j-1}(0)` with `exp_0(0) = 0`.
fn ln_iterated_exp_at_zero(j: u32) -> f64 {
    let mut v = 0.0f64; // exp_0(0)
    for _ in 1..j {
        v = v.exp();
    }
    v
}

/// Log-domain coefficients `ln [r^n] exp(h)` for a series `h` with `h_0 = 0`
/// and nonnegative coefficients given as logs (`-inf` for zero).
///
/// Uses `n g_n = Σ_{j=1..n} j h_j g_{n-j}`; all summands are nonnegative so
/// log-sum-exp accumulation is free of cancellation.
fn log_exp_series(log_h: &[f64]) -> Vec<f64> {
    let n_max = log_h.len() - 1;
    let mut g = vec![f64::NEG_INFINITY; n_max + 1];
    g[0] = 0.0;
    for n in 1..=n_max {
        let mut acc = f64::NEG_INFINITY;
        for j in 1..=n {
            if log_h[j] == f64::NEG_INFINITY {
                continue;
            }
            acc = log_add_exp(acc, (j as f64).ln() + log_h[j] + g[n - j]);
        }
        g[n] = acc - (n as f64).ln();
    }
    g
}

/// `ln b_k(n)` for `n = 0..=n_max` by floating log-domain composition.
pub fn log_bell_float(k: u32, n_max: usize) -> Vec<f64> {
    assert!(k >= 1);
    // E_1 = e^r: coefficients 1/n!
    let mut coeffs: Vec<f64> = (0..=n_max).map(|n| -ln_factorial(n as u64)).collect();
    for order in 2..=k {
        let ln_scale = ln_iterated_exp_at_zero(order - 1);
        let mut log_h = vec![f64::NEG_INFINITY; n_max + 1];
        for j in 1..=n_max {
            log_h[j] = ln_scale + coeffs[j];
        }
        coeffs = log_exp_series(&log_h);
    }
    coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c + ln_factorial(n as u64))
        .collect()
}

/// Exact `b_k(n)` for the orders whose composition stays rational
/// (`k <= 2`, where `exp_{k-1}(0) = 1`). `None` for higher orders.
pub fn bell_exact(k: u32, n_max: usize) -> Option<Vec<BigInt>> {
    if k == 0 || k > 2 || n_max > EXACT_DEGREE_CAP {
        return None;
    }
    let mut fact = vec![BigInt::one(); n_max + 1];
    for n in 1..=n_max {
        fact[n] = &fact[n - 1] * BigInt::from(n);
    }
    let mut coeffs: Vec<BigRational> = fact
        .iter()
        .map(|f| BigRational::new(BigInt::one(), f.clone()))
        .collect();
    if k == 2 {
        let mut h = coeffs.clone();
        h[0] = BigRational::zero();
        let mut g = vec![BigRational::zero(); n_max + 1];
        g[0] = BigRational::one();
        for n in 1..=n_max {
            let mut acc = BigRational::zero();
            for j in 1..=n {
                acc += BigRational::from_integer(BigInt::from(j)) * &h[j] * &g[n - j];
            }
            g[n] = acc / BigRational::from_integer(BigInt::from(n));
        }
        coeffs = g;
    }
    Some(
        coeffs
            .iter()
            .zip(&fact)
            .map(|(c, f)| {
                let v = c * BigRational::from_integer(f.clone());
                debug_assert!(v.is_integer());
                v.to_integer()
            })
            .collect(),
    )
}

/// `ln b_k(n)`: exact integers up to [`EXACT_DEGREE_CAP`] where available,
/// floating composition for the remaining indices and orders.
pub fn log_bell(k: u32, n_max: usize) -> Vec<f64> {
    let mut out = log_bell_float(k, n_max);
    if let Some(exact) = bell_exact(k, n_max.min(EXACT_DEGREE_CAP)) {
        for (slot, b) in out.iter_mut().zip(exact) {
            *slot = b.to_f64().expect("Bell number fits f64 below the exact cap").ln();
        }
    }
    out
}
