use std::cell::RefCell;

use crate::growthfn::GrowthFunction;
use crate::numerics::{default_rel_tol, ln_factorial, log_concave_ratio, log_sum_exp_series, SeriesSum};
use crate::Result;

use super::ell_integer;

/// Series whose terms may fail to evaluate; the first failure is returned.
fn fallible_series(
    term: impl Fn(usize) -> Result<f64>,
    ratio: impl Fn(usize, &[f64]) -> f64,
) -> Result<SeriesSum> {
    let err = RefCell::new(None);
    let sum = log_sum_exp_series(
        |n| match term(n) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        default_rel_tol(),
        // a failed term stops the summation at once
        |n, terms| if err.borrow().is_some() { f64::NEG_INFINITY } else { ratio(n, terms) },
    );
    match err.into_inner() {
        Some(e) => Err(e),
        None => sum,
    }
}

/// `L_u(r) = Σ ℓ_u(n) rⁿ` at `r = e^{log_r}`.
///
/// Tail certificate: `ℓ_u` is log-concave, so the last term ratio bounds
/// every later one.
pub fn l_function_sum(u: &GrowthFunction, log_r: f64) -> Result<SeriesSum> {
    fallible_series(
        |n| {
            let l = ell_integer(u, n)?;
            Ok(if n == 0 { l } else { l + n as f64 * log_r })
        },
        log_concave_ratio,
    )
}

pub fn l_function(u: &GrowthFunction, log_r: f64) -> Result<f64> {
    l_function_sum(u, log_r).map(|s| s.log_value)
}

/// `L_u^#(r) = Σ rⁿ / (ℓ_u(n) (n!)²)` at `r = e^{log_r}`.
///
/// When `log u(y²)` is convex, `ℓ_u(n) n^{2n}` is log-convex, so with
/// `R_n = ℓ(n+1)(n+1)^{2(n+1)} / (ℓ(n) n^{2n})` nondecreasing every later
/// term ratio is at most `r e² / R_n`. Otherwise the last observed ratio is
/// used.
pub fn l_sharp_sum(u: &GrowthFunction, log_r: f64) -> Result<SeriesSum> {
    let rigorous = u.log_x2_convex_known();
    let xlx = |n: usize| if n == 0 { 0.0 } else { n as f64 * (n as f64).ln() };
    fallible_series(
        |n| {
            let l = ell_integer(u, n)?;
            let c = -l - 2.0 * ln_factorial(n as u64);
            Ok(if n == 0 { c } else { c + n as f64 * log_r })
        },
        |n, terms| {
            if !rigorous || n == 0 {
                return log_concave_ratio(n, terms);
            }
            let (Ok(a), Ok(b)) = (ell_integer(u, n), ell_integer(u, n + 1)) else {
                return f64::INFINITY;
            };
            let log_r_n = (b + 2.0 * xlx(n + 1)) - (a + 2.0 * xlx(n));
            log_r + 2.0 - log_r_n
        },
    )
}

pub fn l_sharp(u: &GrowthFunction, log_r: f64) -> Result<f64> {
    l_sharp_sum(u, log_r).map(|s| s.log_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_l_function() {
        let u = GrowthFunction::ks(0.0);
        assert_eq!(l_function(&u, f64::NEG_INFINITY).unwrap(), 0.0);
        let v = l_function(&u, 0.0).unwrap();
        // oracle: 1/n! ≤ (e/n)^n ≤ e 2^{n/2}/n! summed termwise
        assert!(v >= 1.0 && v <= 1.0 + 2f64.sqrt());
        let direct: f64 = (0..300)
            .map(|n| if n == 0 { 1.0 } else { (n as f64 * (1.0 - (n as f64).ln())).exp() })
            .sum();
        assert!((v - direct.ln()).abs() < 1e-8);
    }

    #[test]
    fn ks_l_function_against_generating_function() {
        use crate::sequences::{egf, gen_power_factorial, EgfVariant};
        let u = GrowthFunction::ks(0.5);
        let seq = gen_power_factorial(0.5, 10).unwrap();
        let l = l_function(&u, 0.0).unwrap();
        let g1 = egf(&seq, 0.0, EgfVariant::GInvAlpha).unwrap().log_value;
        let g2 = egf(&seq, 0.75 * 2f64.ln(), EgfVariant::GInvAlpha).unwrap().log_value;
        assert!(g1 <= l + 1e-9 && l <= 1.5 + g2 + 1e-9);
    }

    #[test]
    fn exponential_l_sharp() {
        let u = GrowthFunction::ks(0.0);
        assert_eq!(l_sharp(&u, f64::NEG_INFINITY).unwrap(), 0.0);
        // second coefficient: 1/((e/2)² · 4) = e^{-2}
        let c2 = -ell_integer(&u, 2).unwrap() - 2.0 * ln_factorial(2);
        assert!((c2 + 2.0).abs() < 1e-12);
    }

    #[test]
    fn sharp_series_sandwich() {
        // L^#(r) ≤ L_{u*}(r) ≤ e² L^#(2r), with u* through the dual optimizer
        let u = GrowthFunction::ks(0.5);
        let us = GrowthFunction::dual_of(&u);
        for &r in &[0.25f64, 1.0, 4.0] {
            let s = l_sharp(&u, r.ln()).unwrap();
            let s2 = l_sharp(&u, (2.0 * r).ln()).unwrap();
            let lu = l_function(&us, r.ln()).unwrap();
            assert!(s <= lu + 1e-8 && lu <= 2.0 + s2 + 1e-8, "r={r}");
        }
    }
}
