//! Growth functions `u` on `[0, ∞)`, carried through `φ(x) = log u(e^x)`.

mod classify;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde_json::{json, Value};

use crate::numerics::log_add_exp;
use crate::sequences::{egf, EgfVariant, PositiveSequence};
use crate::{legendre, Error, Result};

pub use classify::{
    check_increasing, classify_convexity, membership, ConvexityKind, ConvexityStatus,
    ConvexityVerdict, GrowthClass, IncreasingVerdict, MembershipStatus, MembershipVerdict,
    ProbeSpec,
};

/// Log-coordinate range on which every evaluator is defined.
pub const LOG_RANGE: f64 = 700.0;

/// How the coefficients of a series-backed function enter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// `Σ_{n≤N} α(n) rⁿ`, a polynomial in the stored coefficients.
    Plain,
    /// `G_α(r) = Σ α(n) rⁿ / n!`
    GAlpha,
    /// `G_{1/α}(r) = Σ rⁿ / (n! α(n))`
    GInvAlpha,
}

/// Caller-supplied `φ`. `log_exp_convex` is a promise the caller makes; it
/// selects the convex fast path in transforms.
#[derive(Clone)]
pub struct CustomFn {
    pub name: String,
    pub phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub log_at_zero: Option<f64>,
    pub log_exp_convex: bool,
}

#[derive(Clone)]
pub enum Repr {
    /// `exp[(1+β) r^{1/(1+β)}]`
    KsTest { beta: f64 },
    /// `exp[(1-β) r^{1/(1-β)}]`
    KsGen { beta: f64 },
    /// `exp_k(r)`, the k-fold iterated exponential.
    IterExp { k: u32 },
    /// `exp[Σ c_j r^j]`
    ExpPoly { coeffs: Vec<f64> },
    /// `exp[a (log r)² + b log r]`, undefined at `r = 0`.
    LogQuadratic { a: f64, b: f64 },
    /// `(c + r)^k`
    Power { c: f64, k: f64 },
    Series { seq: PositiveSequence, kind: SeriesKind },
    /// `c · u(a r)`
    Dilated { base: GrowthFunction, log_a: f64, log_c: f64 },
    /// `u*`
    Dual(GrowthFunction),
    /// `L_u`
    LFunction(GrowthFunction),
    Custom(CustomFn),
}

struct Inner {
    repr: Repr,
    log_exp_convex: OnceLock<bool>,
    ell_integers: Vec<OnceLock<f64>>,
}

/// Number of integer Legendre values cached per function.
pub const ELL_CACHE_LEN: usize = 2048;

/// Immutable growth function. Clones share the lazily computed caches.
#[derive(Clone)]
pub struct GrowthFunction(Arc<Inner>);

impl fmt::Debug for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrowthFunction({})", self.name())
    }
}

/// `exp_j(0)` with `exp_0(0) = 0`.
fn iterated_exp_at_zero(j: u32) -> f64 {
    (0..j).fold(0.0, |v, _| f64::exp(v))
}

impl GrowthFunction {
    pub fn new(repr: Repr) -> Result<Self> {
        match &repr {
            Repr::KsTest { beta } | Repr::KsGen { beta } if !(0.0..=1.0).contains(beta) => {
                return Err(Error::InvalidInput(format!("beta must lie in [0, 1], got {beta}")))
            }
            Repr::KsGen { beta } if *beta >= 1.0 => {
                return Err(Error::InvalidInput("ksgen needs beta < 1".into()))
            }
            Repr::IterExp { k } if *k == 0 => {
                return Err(Error::InvalidInput("exp_k needs k >= 1".into()))
            }
            Repr::ExpPoly { coeffs } if coeffs.is_empty() => {
                return Err(Error::InvalidInput("exp-poly needs at least one coefficient".into()))
            }
            Repr::Power { c, k } if !(*c >= 0.0 && *k > 0.0) => {
                return Err(Error::InvalidInput("power needs c >= 0 and k > 0".into()))
            }
            _ => {}
        }
        Ok(GrowthFunction(Arc::new(Inner {
            repr,
            log_exp_convex: OnceLock::new(),
            ell_integers: (0..ELL_CACHE_LEN).map(|_| OnceLock::new()).collect(),
        })))
    }

    /// `exp[(1+β) r^{1/(1+β)}]`; `β = 0` is `e^r`.
    pub fn ks(beta: f64) -> Self {
        Self::new(Repr::KsTest { beta }).expect("valid beta")
    }

    /// `exp[(1-β) r^{1/(1-β)}]`.
    pub fn ks_gen(beta: f64) -> Self {
        Self::new(Repr::KsGen { beta }).expect("valid beta")
    }

    pub fn exp_k(k: u32) -> Self {
        Self::new(Repr::IterExp { k }).expect("valid order")
    }

    pub fn exp_poly(coeffs: Vec<f64>) -> Self {
        Self::new(Repr::ExpPoly { coeffs }).expect("nonempty coefficients")
    }

    pub fn series(seq: PositiveSequence, kind: SeriesKind) -> Self {
        Self::new(Repr::Series { seq, kind }).expect("series is always valid")
    }

    pub fn dual_of(u: &GrowthFunction) -> Self {
        Self::new(Repr::Dual(u.clone())).expect("dual is always valid")
    }

    pub fn l_function_of(u: &GrowthFunction) -> Self {
        Self::new(Repr::LFunction(u.clone())).expect("L-function is always valid")
    }

    /// `c · u(a r)`.
    pub fn dilated(&self, a: f64, c: f64) -> Self {
        Self::new(Repr::Dilated { base: self.clone(), log_a: a.ln(), log_c: c.ln() })
            .expect("dilation is always valid")
    }

    pub fn custom(
        name: impl Into<String>,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        log_at_zero: Option<f64>,
        log_exp_convex: bool,
    ) -> Self {
        Self::new(Repr::Custom(CustomFn {
            name: name.into(),
            phi: Arc::new(phi),
            log_at_zero,
            log_exp_convex,
        }))
        .expect("custom is always valid")
    }

    pub fn repr(&self) -> &Repr {
        &self.0.repr
    }

    pub fn name(&self) -> String {
        match &self.0.repr {
            Repr::KsTest { beta } => format!("ks(beta={beta})"),
            Repr::KsGen { beta } => format!("ksgen(beta={beta})"),
            Repr::IterExp { k } => format!("exp_{k}"),
            Repr::ExpPoly { coeffs } => format!("exp-poly{coeffs:?}"),
            Repr::LogQuadratic { a, b } => format!("log-quadratic(a={a},b={b})"),
            Repr::Power { c, k } => format!("power(c={c},k={k})"),
            Repr::Series { seq, kind } => format!("series({},{kind:?})", seq.family().name()),
            Repr::Dilated { base, log_a, log_c } => {
                format!("{}*{}({}r)", log_c.exp(), base.name(), log_a.exp())
            }
            Repr::Dual(u) => format!("dual({})", u.name()),
            Repr::LFunction(u) => format!("L({})", u.name()),
            Repr::Custom(c) => c.name.clone(),
        }
    }

    /// Family and parameters as JSON, for reports.
    pub fn describe(&self) -> Value {
        match &self.0.repr {
            Repr::KsTest { beta } => json!({"family": "ks", "beta": beta}),
            Repr::KsGen { beta } => json!({"family": "ksgen", "beta": beta}),
            Repr::IterExp { k } => json!({"family": "expk", "k": k}),
            Repr::ExpPoly { coeffs } => json!({"family": "exp-poly", "coeffs": coeffs}),
            Repr::LogQuadratic { a, b } => json!({"family": "log-quadratic", "a": a, "b": b}),
            Repr::Power { c, k } => json!({"family": "power", "c": c, "k": k}),
            Repr::Series { seq, kind } => json!({
                "family": "series",
                "kind": format!("{kind:?}"),
                "sequence": seq.family().name(),
                "N": seq.n_max(),
            }),
            Repr::Dilated { base, log_a, log_c } => json!({
                "family": "dilated", "a": log_a.exp(), "c": log_c.exp(), "of": base.describe(),
            }),
            Repr::Dual(u) => json!({"family": "dual", "of": u.describe()}),
            Repr::LFunction(u) => json!({"family": "lfn", "of": u.describe()}),
            Repr::Custom(c) => json!({"family": "custom", "name": c.name}),
        }
    }

    /// `φ(x) = log u(e^x)`. `x = -inf` evaluates at `r = 0`.
    pub fn eval_log(&self, x: f64) -> Result<f64> {
        if x == f64::NEG_INFINITY {
            return self.log_at_zero().ok_or_else(|| {
                Error::InvalidInput(format!("{} is not defined at r = 0", self.name()))
            });
        }
        if x.is_nan() {
            return Err(Error::InvalidInput("log-coordinate is NaN".into()));
        }
        Ok(match &self.0.repr {
            Repr::KsTest { beta } => (1.0 + beta) * (x / (1.0 + beta)).exp(),
            Repr::KsGen { beta } => (1.0 - beta) * (x / (1.0 - beta)).exp(),
            Repr::IterExp { k } => (1..*k).fold(x.exp(), |v, _| v.exp()),
            Repr::ExpPoly { coeffs } => {
                let r = x.exp();
                coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
            }
            Repr::LogQuadratic { a, b } => a * x * x + b * x,
            Repr::Power { c, k } => k * log_add_exp(c.ln(), x),
            Repr::Series { seq, kind } => match kind {
                SeriesKind::Plain => seq
                    .log_alpha()
                    .iter()
                    .enumerate()
                    .fold(f64::NEG_INFINITY, |acc, (n, la)| {
                        log_add_exp(acc, if n == 0 { *la } else { la + n as f64 * x })
                    }),
                SeriesKind::GAlpha => egf(seq, x, EgfVariant::GAlpha)?.log_value,
                SeriesKind::GInvAlpha => egf(seq, x, EgfVariant::GInvAlpha)?.log_value,
            },
            Repr::Dilated { base, log_a, log_c } => base.eval_log(x + log_a)? + log_c,
            Repr::Dual(u) => legendre::dual(u, x.exp())?,
            Repr::LFunction(u) => legendre::l_function(u, x)?,
            Repr::Custom(c) => (c.phi)(x),
        })
    }

    /// `log u(r)` for `r >= 0`.
    pub fn log_u(&self, r: f64) -> Result<f64> {
        self.eval_log(r.ln())
    }

    /// `log u(0)` where `u` extends continuously to zero.
    pub fn log_at_zero(&self) -> Option<f64> {
        match &self.0.repr {
            Repr::KsTest { .. } | Repr::KsGen { .. } => Some(0.0),
            Repr::IterExp { k } => Some(iterated_exp_at_zero(k - 1)),
            Repr::ExpPoly { coeffs } => Some(coeffs[0]),
            Repr::LogQuadratic { a, b } => {
                // a(log r)² dominates as r → 0
                if *a == 0.0 && *b > 0.0 {
                    Some(f64::NEG_INFINITY)
                } else {
                    None
                }
            }
            Repr::Power { c, k } => (*c > 0.0).then(|| k * c.ln()),
            Repr::Series { seq, kind } => Some(match kind {
                SeriesKind::GInvAlpha => -seq.log_alpha()[0],
                _ => seq.log_alpha()[0],
            }),
            Repr::Dilated { base, log_c, .. } => base.log_at_zero().map(|v| v + log_c),
            Repr::Dual(u) => legendre::dual(u, 0.0).ok(),
            Repr::LFunction(u) => legendre::ell(u, 0.0).ok().map(|e| e.log_ell),
            Repr::Custom(c) => c.log_at_zero,
        }
    }

    /// Whether `φ` is convex by construction, when that is known without probing.
    pub fn log_exp_convex_known(&self) -> Option<bool> {
        match &self.0.repr {
            Repr::KsTest { .. }
            | Repr::KsGen { .. }
            | Repr::IterExp { .. }
            | Repr::Power { .. }
            | Repr::Series { .. }
            | Repr::Dual(_)
            | Repr::LFunction(_) => Some(true),
            Repr::LogQuadratic { a, .. } => Some(*a >= 0.0),
            Repr::Dilated { base, .. } => base.log_exp_convex_known(),
            Repr::Custom(c) => c.log_exp_convex.then_some(true),
            Repr::ExpPoly { .. } => None,
        }
    }

    /// `(log, exp)`-convexity: known flag, else a grid verdict computed once.
    pub fn is_log_exp_convex(&self) -> bool {
        if let Some(k) = self.log_exp_convex_known() {
            return k;
        }
        *self.0.log_exp_convex.get_or_init(|| {
            classify_convexity(self, ConvexityKind::LogExp, &ProbeSpec::default()).passes()
        })
    }

    /// Whether `log u(y²)` is convex in `y` by construction.
    pub fn log_x2_convex_known(&self) -> bool {
        match &self.0.repr {
            Repr::KsTest { beta } => *beta <= 1.0,
            Repr::KsGen { .. } | Repr::IterExp { .. } => true,
            // log u*(y²) is a supremum of affine functions of y
            Repr::Dual(_) => true,
            Repr::Dilated { base, .. } => base.log_x2_convex_known(),
            _ => false,
        }
    }

    /// `log ℓ_u(n)` through a write-once per-index cache. Failed evaluations
    /// are not cached.
    pub(crate) fn cached_ell_integer(&self, n: usize, compute: impl FnOnce() -> Result<f64>) -> Result<f64> {
        match self.0.ell_integers.get(n) {
            Some(cell) => {
                if let Some(v) = cell.get() {
                    return Ok(*v);
                }
                let v = compute()?;
                Ok(*cell.get_or_init(|| v))
            }
            None => compute(),
        }
    }
}
