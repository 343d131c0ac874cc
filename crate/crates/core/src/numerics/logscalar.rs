use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use serde::{Deserialize, Serialize};

/// `ln(e^a + e^b)` without overflow. `-inf` is the additive identity.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Natural log of a nonnegative magnitude. `-inf` encodes zero.
///
/// Magnitudes such as `(n!)^(1+β)` or `exp_k(r)` overflow `f64` long before
/// the indices and radii the transforms need, so everything is carried in
/// this form. `Add` is log-sum-exp, `Mul`/`Div` are sums/differences of logs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogScalar(f64);

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar(f64::NEG_INFINITY);
    pub const ONE: LogScalar = LogScalar(0.0);

    pub fn from_ln(ln: f64) -> Self {
        LogScalar(ln)
    }

    /// Panics in debug builds on negative input.
    pub fn from_value(v: f64) -> Self {
        debug_assert!(v >= 0.0, "LogScalar holds nonnegative magnitudes");
        LogScalar(v.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// The magnitude itself; may overflow to `inf`.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn powf(self, p: f64) -> Self {
        if self.is_zero() && p == 0.0 {
            return LogScalar::ONE;
        }
        LogScalar(self.0 * p)
    }

    pub fn sqrt(self) -> Self {
        LogScalar(0.5 * self.0)
    }
}

impl Add for LogScalar {
    type Output = LogScalar;
    fn add(self, rhs: LogScalar) -> LogScalar {
        LogScalar(log_add_exp(self.0, rhs.0))
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        LogScalar(self.0 + rhs.0)
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: LogScalar) -> LogScalar {
        LogScalar(self.0 - rhs.0)
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_is_identity() {
        let a = LogScalar::from_value(3.0);
        assert_eq!((a + LogScalar::ZERO).ln(), a.ln());
        assert_eq!((LogScalar::ZERO + LogScalar::ZERO).ln(), f64::NEG_INFINITY);
    }

    #[test]
    fn huge_magnitudes_do_not_overflow() {
        let a = LogScalar::from_ln(1000.0);
        let s = a + a;
        assert!((s.ln() - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn add_commutes_and_dominates(a in -800.0f64..800.0, b in -800.0f64..800.0) {
            let x = LogScalar::from_ln(a);
            let y = LogScalar::from_ln(b);
            prop_assert_eq!((x + y).ln(), (y + x).ln());
            prop_assert!((x + y).ln() >= a.max(b));
        }

        #[test]
        fn ordering_matches_magnitudes(a in 0.0f64..1e6, b in 0.0f64..1e6) {
            let x = LogScalar::from_value(a);
            let y = LogScalar::from_value(b);
            prop_assert_eq!(x.partial_cmp(&y), a.partial_cmp(&b));
        }
    }
}
