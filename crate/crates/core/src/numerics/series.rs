use crate::{Error, Result};

/// Index cap for series summation.
pub const DEFAULT_INDEX_CAP: usize = 1_000_000;

/// Log of a series sum together with the deterministic truncation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSum {
    pub log_value: f64,
    /// Number of terms actually summed (indices `0..terms`).
    pub terms: usize,
}

/// Ratio certificate for log-concave term sequences: the last observed ratio
/// bounds every later one.
///
/// Returns `+inf` (no certificate) while fewer than two terms are known or
/// when the previous term is zero.
pub fn log_concave_ratio(n: usize, log_terms: &[f64]) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let prev = log_terms[n - 1];
    let cur = log_terms[n];
    if prev == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    cur - prev
}

/// Sum `Σ_n exp(term(n))` in the log domain.
///
/// `ratio_bound(n, terms)` must return a bound on `ln(term(m+1)/term(m))`
/// valid for every `m >= n`, given the terms computed so far (`terms[..=n]`).
/// Once that bound is negative the geometric tail after `n` is bounded by
/// `term(n)·q/(1-q)`, and summation stops as soon as the tail is below
/// `rel_tol` times the partial sum.
pub fn log_sum_exp_series<T, C>(term: T, rel_tol: f64, ratio_bound: C) -> Result<SeriesSum>
where
    T: FnMut(usize) -> f64,
    C: FnMut(usize, &[f64]) -> f64,
{
    log_sum_exp_series_capped(term, rel_tol, ratio_bound, DEFAULT_INDEX_CAP)
}

pub fn log_sum_exp_series_capped<T, C>(
    mut term: T,
    rel_tol: f64,
    mut ratio_bound: C,
    index_cap: usize,
) -> Result<SeriesSum>
where
    T: FnMut(usize) -> f64,
    C: FnMut(usize, &[f64]) -> f64,
{
    let log_tol = rel_tol.ln();
    let mut terms: Vec<f64> = Vec::new();
    // running max and Σ exp(t - max)
    let mut max = f64::NEG_INFINITY;
    let mut scaled = 0.0f64;

    for n in 0..index_cap {
        let t = term(n);
        let t = if t.is_nan() { f64::NEG_INFINITY } else { t };
        if t == f64::INFINITY {
            return Ok(SeriesSum {
                log_value: f64::INFINITY,
                terms: n + 1,
            });
        }
        terms.push(t);
        if t > max {
            scaled = scaled * (max - t).exp() + 1.0;
            max = t;
        } else if t > f64::NEG_INFINITY {
            scaled += (t - max).exp();
        }
        let log_sum = if max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            max + scaled.ln()
        };

        let q = ratio_bound(n, &terms);
        if q.is_nan() || q >= 0.0 {
            continue;
        }
        let log_tail = if t == f64::NEG_INFINITY || q == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            t + q - (-q.exp_m1()).ln()
        };
        if log_tail == f64::NEG_INFINITY || log_tail - log_sum <= log_tol {
            return Ok(SeriesSum {
                log_value: log_sum,
                terms: n + 1,
            });
        }
    }
    Err(Error::NoDecayCertificate { index_cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ln_factorial;
    use proptest::prelude::*;

    #[test]
    fn exponential_series_sums_to_e() {
        let s = log_sum_exp_series(|n| -ln_factorial(n as u64), 1e-12, log_concave_ratio).unwrap();
        assert!((s.log_value - 1.0).abs() < 1e-9);
        assert!(s.terms < 30);
    }

    #[test]
    fn single_nonzero_term() {
        let s = log_sum_exp_series(
            |n| if n == 0 { 5f64.ln() } else { f64::NEG_INFINITY },
            1e-9,
            log_concave_ratio,
        )
        .unwrap();
        assert!((s.log_value - 5f64.ln()).abs() < 1e-15);
        assert_eq!(s.terms, 2);
    }

    #[test]
    fn legendre_series_of_exponential_at_one_is_sandwiched() {
        // Σ (e/n)^n with 0^0 = 1: oracle is 200 terms of direct summation,
        // bracketed by e (lower, 1/n! termwise) and e·e^{√2} (upper).
        let term = |n: usize| {
            if n == 0 {
                0.0
            } else {
                let n = n as f64;
                n * (1.0 - n.ln())
            }
        };
        let direct: f64 = (0..200).map(|n| term(n).exp()).sum();
        let s = log_sum_exp_series(term, 1e-12, log_concave_ratio).unwrap();
        assert!((s.log_value - direct.ln()).abs() < 1e-10);
        assert!(s.log_value >= 1.0 && s.log_value <= 1.0 + 2f64.sqrt());
    }

    #[test]
    fn growing_series_reports_missing_certificate() {
        let err = log_sum_exp_series_capped(|n| n as f64, 1e-9, log_concave_ratio, 1000).unwrap_err();
        assert_eq!(err, Error::NoDecayCertificate { index_cap: 1000 });
    }

    #[test]
    fn large_argument_exponential_does_not_overflow() {
        // Σ r^n/n! at r = 1e4 → log value 1e4
        let lr = 1e4f64.ln();
        let s = log_sum_exp_series(|n| n as f64 * lr - ln_factorial(n as u64), 1e-12, log_concave_ratio)
            .unwrap();
        assert!((s.log_value - 1e4).abs() < 1e-7 * 1e4);
    }

    proptest! {
        #[test]
        fn reordering_finite_prefix_is_harmless(seed in 0u64..1000, len in 2usize..12) {
            // permute the first `len` terms of Σ x^n/n!
            let x: f64 = 0.5 + (seed % 17) as f64;
            let base = |n: usize| n as f64 * x.ln() - ln_factorial(n as u64);
            let mut perm: Vec<usize> = (0..len).collect();
            perm.rotate_left((seed as usize) % len);
            perm.reverse();
            let a = log_sum_exp_series(base, 1e-10, log_concave_ratio).unwrap();
            // certificate only consulted beyond the permuted prefix
            let b = log_sum_exp_series(
                |n| if n < len { base(perm[n]) } else { base(n) },
                1e-10,
                |n, _| if n < len { f64::INFINITY } else { base(n) - base(n - 1) },
            ).unwrap();
            prop_assert!((a.log_value - b.log_value).abs() <= 2e-10 * a.log_value.abs().max(1.0));
        }
    }
}
