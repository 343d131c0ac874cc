//! Weight sequences `α(n)`, their exponential generating functions and the
//! standard growth/convexity conditions imposed on them.

pub mod bell;
mod conditions;
mod equivalence;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::numerics::{
    default_rel_tol, ln_factorial, log_concave_ratio, log_sum_exp_series_capped, SeriesSum,
};
use crate::{Error, Result};

pub use conditions::{check_condition, Condition, ConditionStatus, ConditionVerdict, FailIndex};
pub use equivalence::{seq_equivalent, SequenceEquivalence, SequenceEquivalenceWitness};

pub const SEQ_SCHEMA: &str = "growthcalc.seq/1";

/// Largest `N` accepted by [`gen_bell`].
pub const BELL_MAX_N: usize = 200;

/// Bell sequences are extended on demand for series evaluation up to this index.
const BELL_EXTENSION_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum SequenceFamily {
    PowerFactorial { beta: f64 },
    #[serde(rename = "bell-order-k")]
    Bell { k: u32 },
    FromLegendre,
    User,
}

impl SequenceFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SequenceFamily::PowerFactorial { .. } => "power-factorial",
            SequenceFamily::Bell { .. } => "bell-order-k",
            SequenceFamily::FromLegendre => "from-legendre",
            SequenceFamily::User => "user",
        }
    }

    fn params(&self) -> Value {
        match self {
            SequenceFamily::PowerFactorial { beta } => json!({ "beta": beta }),
            SequenceFamily::Bell { k } => json!({ "k": k }),
            _ => Value::Object(Map::new()),
        }
    }
}

/// `log b_k(0..=BELL_EXTENSION_CAP)`, computed once per order.
fn bell_table(k: u32) -> Arc<Vec<f64>> {
    static TABLES: OnceLock<Mutex<HashMap<u32, Arc<Vec<f64>>>>> = OnceLock::new();
    let mut tables = TABLES.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    tables
        .entry(k)
        .or_insert_with(|| {
            let mut la = bell::log_bell(k, BELL_EXTENSION_CAP);
            la[0] = 0.0;
            Arc::new(la)
        })
        .clone()
}

/// `log α(0..=N)` with the family it came from. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveSequence {
    log_alpha: Vec<f64>,
    family: SequenceFamily,
}

#[derive(Serialize, Deserialize)]
struct SeqFile {
    schema: String,
    family: String,
    #[serde(default)]
    params: Value,
    #[serde(rename = "N")]
    n: usize,
    log_alpha: Vec<f64>,
}

impl PositiveSequence {
    pub fn new(log_alpha: Vec<f64>, family: SequenceFamily) -> Result<Self> {
        if log_alpha.is_empty() {
            return Err(Error::InvalidInput("sequence must have at least one entry".into()));
        }
        if let Some(i) = log_alpha.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "log_alpha[{i}] is not finite; entries must be positive"
            )));
        }
        if matches!(family, SequenceFamily::PowerFactorial { .. } | SequenceFamily::Bell { .. })
            && log_alpha[0] != 0.0
        {
            return Err(Error::InvalidInput(format!(
                "{} sequences have alpha(0) = 1",
                family.name()
            )));
        }
        Ok(PositiveSequence { log_alpha, family })
    }

    /// User-supplied sequence from plain values `α(n) > 0`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|v| v.ln()).collect(), SequenceFamily::User)
    }

    pub fn log_alpha(&self) -> &[f64] {
        &self.log_alpha
    }

    pub fn family(&self) -> &SequenceFamily {
        &self.family
    }

    /// Largest index `N`.
    pub fn n_max(&self) -> usize {
        self.log_alpha.len() - 1
    }

    /// `1/(n! α(n))`, the weight on the other side of the pairing.
    pub fn inverse_factorial_weight(&self) -> PositiveSequence {
        let la = self
            .log_alpha
            .iter()
            .enumerate()
            .map(|(n, l)| -l - ln_factorial(n as u64))
            .collect();
        PositiveSequence { log_alpha: la, family: SequenceFamily::User }
    }

    /// `log α(0..=m)` if the family can produce that many terms.
    fn extended(&self, m: usize) -> Option<Vec<f64>> {
        if m <= self.n_max() {
            return Some(self.log_alpha[..=m].to_vec());
        }
        match self.family {
            SequenceFamily::PowerFactorial { beta } => {
                Some((0..=m).map(|n| beta * ln_factorial(n as u64)).collect())
            }
            SequenceFamily::Bell { k } if m <= BELL_EXTENSION_CAP => Some(bell_table(k)[..=m].to_vec()),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(SeqFile {
            schema: SEQ_SCHEMA.into(),
            family: self.family.name().into(),
            params: self.family.params(),
            n: self.n_max(),
            log_alpha: self.log_alpha.clone(),
        })
        .expect("sequence serializes")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let file: SeqFile = serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidInput(format!("sequence file: {e}")))?;
        if file.schema != SEQ_SCHEMA {
            return Err(Error::InvalidInput(format!(
                "unknown sequence schema {:?}, expected {SEQ_SCHEMA}",
                file.schema
            )));
        }
        if file.log_alpha.len() != file.n + 1 {
            return Err(Error::InvalidInput(format!(
                "N = {} but log_alpha has {} entries",
                file.n,
                file.log_alpha.len()
            )));
        }
        let param = |key: &str| {
            file.params
                .get(key)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::InvalidInput(format!("{} needs params.{key}", file.family)))
        };
        let family = match file.family.as_str() {
            "power-factorial" => SequenceFamily::PowerFactorial { beta: param("beta")? },
            "bell-order-k" => SequenceFamily::Bell { k: param("k")? as u32 },
            "from-legendre" => SequenceFamily::FromLegendre,
            "user" => SequenceFamily::User,
            other => return Err(Error::InvalidInput(format!("unknown sequence family {other:?}"))),
        };
        Self::new(file.log_alpha, family)
    }
}

/// `α(n) = (n!)^β`.
pub fn gen_power_factorial(beta: f64, n: usize) -> Result<PositiveSequence> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidInput(format!("beta must lie in [0, 1), got {beta}")));
    }
    PositiveSequence::new(
        (0..=n).map(|i| beta * ln_factorial(i as u64)).collect(),
        SequenceFamily::PowerFactorial { beta },
    )
}

/// Bell numbers of order `k`, normalized so that `α(0) = 1`.
pub fn gen_bell(k: u32, n: usize) -> Result<PositiveSequence> {
    if k == 0 {
        return Err(Error::InvalidInput("Bell order k must be at least 1".into()));
    }
    if n > BELL_MAX_N {
        return Err(Error::InvalidInput(format!("Bell sequences are capped at N = {BELL_MAX_N}")));
    }
    let mut la = bell::log_bell(k, n);
    la[0] = 0.0;
    PositiveSequence::new(la, SequenceFamily::Bell { k })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EgfVariant {
    /// `Σ α(n) rⁿ / n!`
    GAlpha,
    /// `Σ rⁿ / (n! α(n))`
    GInvAlpha,
}

/// Log of the exponential generating function at `r = e^{log_r}`.
///
/// The tail certificate is the last observed term ratio, valid when the terms
/// are log-concave from the stopping index on (the (B2) and (B̃2) shapes).
/// Generative families are extended as far as needed; user sequences only
/// up to their stored length.
pub fn egf(seq: &PositiveSequence, log_r: f64, variant: EgfVariant) -> Result<SeriesSum> {
    egf_with_tol(seq, log_r, variant, default_rel_tol())
}

pub fn egf_with_tol(
    seq: &PositiveSequence,
    log_r: f64,
    variant: EgfVariant,
    rel_tol: f64,
) -> Result<SeriesSum> {
    let sign = match variant {
        EgfVariant::GAlpha => 1.0,
        EgfVariant::GInvAlpha => -1.0,
    };
    let coeff = |la: f64, n: usize| {
        if n == 0 {
            sign * la
        } else {
            sign * la - ln_factorial(n as u64) + n as f64 * log_r
        }
    };
    if let SequenceFamily::PowerFactorial { beta } = seq.family {
        return log_sum_exp_series_capped(
            |n| coeff(beta * ln_factorial(n as u64), n),
            rel_tol,
            log_concave_ratio,
            crate::numerics::DEFAULT_INDEX_CAP,
        );
    }
    let mut len = seq.n_max() + 1;
    loop {
        let la = seq.extended(len - 1).expect("prefix always available");
        match log_sum_exp_series_capped(|n| coeff(la[n], n), rel_tol, log_concave_ratio, len) {
            Err(Error::NoDecayCertificate { .. }) => match seq.extended(2 * len) {
                Some(_) => len = 2 * len + 1,
                None => return Err(Error::NoDecayCertificate { index_cap: len }),
            },
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_factorial_values() {
        let s = gen_power_factorial(0.0, 5).unwrap();
        assert!(s.log_alpha().iter().all(|&l| l == 0.0));
        let s = gen_power_factorial(0.5, 4).unwrap();
        assert!((s.log_alpha()[4].exp() - 24f64.sqrt()).abs() < 1e-12);
        let s = gen_power_factorial(0.9, 20).unwrap();
        let exact: u64 = (1..=20u64).product();
        assert!((s.log_alpha()[20] - 0.9 * (exact as f64).ln()).abs() < 1e-10);
        assert!((s.log_alpha()[20] - 38.1020).abs() < 1e-3);
        assert!(gen_power_factorial(1.0, 3).is_err());
    }

    #[test]
    fn bell_normalized_at_zero() {
        for k in 1..=4 {
            assert_eq!(gen_bell(k, 10).unwrap().log_alpha()[0], 0.0);
        }
        assert!(gen_bell(2, 201).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = gen_bell(2, 8).unwrap();
        let v = s.to_json();
        assert_eq!(v["schema"], SEQ_SCHEMA);
        assert_eq!(v["family"], "bell-order-k");
        assert_eq!(v["params"]["k"], 2);
        assert_eq!(v["N"], 8);
        assert_eq!(PositiveSequence::from_json(&v).unwrap(), s);
    }

    #[test]
    fn json_rejects_bad_input() {
        let bad_len = json!({"schema": SEQ_SCHEMA, "family": "user", "params": {}, "N": 3, "log_alpha": [0.0]});
        assert!(PositiveSequence::from_json(&bad_len).is_err());
        let bad_alpha0 = json!({"schema": SEQ_SCHEMA, "family": "power-factorial", "params": {"beta": 0.5}, "N": 1, "log_alpha": [0.3, 0.0]});
        assert!(PositiveSequence::from_json(&bad_alpha0).is_err());
    }

    #[test]
    fn egf_of_constant_sequence_is_exponential() {
        let s = PositiveSequence::new(vec![0.0; 5], SequenceFamily::User).unwrap();
        // 5 stored terms cannot certify Σ 1/n! to 1e-9
        assert!(egf(&s, 0.0, EgfVariant::GAlpha).is_err());
        let s = gen_power_factorial(0.0, 3).unwrap();
        let v = egf(&s, 0.0, EgfVariant::GAlpha).unwrap();
        assert!((v.log_value - 1.0).abs() < 1e-9);
        let v = egf(&s, f64::NEG_INFINITY, EgfVariant::GAlpha).unwrap();
        assert_eq!(v.log_value, 0.0);
    }

    #[test]
    fn egf_power_factorial_sandwich() {
        let s = gen_power_factorial(0.5, 10).unwrap();
        let g = egf(&s, 0.0, EgfVariant::GAlpha).unwrap().log_value;
        // exp[(1-β) r^{1/(1-β)}] ≤ G_α(r) ≤ 2^β exp[...] at r = 1
        assert!(g >= 0.5 && g <= 0.5 * 2f64.ln() + 1.0);
        let h = egf(&s, 0.0, EgfVariant::GInvAlpha).unwrap().log_value;
        // 2^{-β} exp[(1+β) 2^{-β/(1+β)}] ≤ G_{1/α}(1) ≤ exp(1+β)
        assert!(h >= -0.5 * 2f64.ln() + 1.5 * 2f64.powf(-1.0 / 3.0) && h <= 1.5);
    }

    #[test]
    fn egf_of_bell_matches_iterated_exponential() {
        // G_α for Bell order 2 is e^{e^r - 1}
        let s = gen_bell(2, 10).unwrap();
        for &r in &[0.1f64, 1.0, 3.0] {
            let v = egf(&s, r.ln(), EgfVariant::GAlpha).unwrap();
            assert!((v.log_value - (r.exp() - 1.0)).abs() < 1e-8 * r.exp(), "r={r}");
        }
    }
}
