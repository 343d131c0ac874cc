use serde::{Deserialize, Serialize};

use super::PositiveSequence;
use crate::{Error, Result};

/// Constants with `K₁c₁ⁿ a(n) ≤ b(n) ≤ K₂c₂ⁿ a(n)` for every `n ≤ checked_range`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceEquivalenceWitness {
    pub k1: f64,
    pub c1: f64,
    pub k2: f64,
    pub c2: f64,
    pub checked_range: usize,
}

impl SequenceEquivalenceWitness {
    /// Log-domain recheck of both bounds; returns the worst violation (≤ 0 when valid).
    pub fn max_violation(&self, a: &PositiveSequence, b: &PositiveSequence) -> f64 {
        let (la, lb) = (a.log_alpha(), b.log_alpha());
        (0..=self.checked_range.min(a.n_max()).min(b.n_max()))
            .map(|n| {
                let n_f = n as f64;
                let lo = self.k1.ln() + n_f * self.c1.ln() + la[n] - lb[n];
                let hi = lb[n] - self.k2.ln() - n_f * self.c2.ln() - la[n];
                lo.max(hi)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum SequenceEquivalence {
    Witness(SequenceEquivalenceWitness),
    /// The log-ratio grows superlinearly: its average slope over `[N/2, N]`
    /// differs from the one over `[N/4, N/2]` by `slope_gap`.
    Counterexample { index: usize, slope_gap: f64 },
}

/// Minimum `N` for the slope comparison to mean anything.
const MIN_LEN: usize = 8;

/// Fit geometric envelopes to `log(b(n)/a(n))`.
///
/// The rates `c₁`, `c₂` are the extreme increments of the log-ratio over the
/// second half of the range; `K₁`, `K₂` are then the tightest constants over
/// the whole range. A log-ratio whose slope keeps growing (a gap above
/// `ln 2 / 2` between consecutive dyadic blocks) is reported as a
/// counterexample.
pub fn seq_equivalent(a: &PositiveSequence, b: &PositiveSequence) -> Result<SequenceEquivalence> {
    if a.n_max() != b.n_max() {
        return Err(Error::InvalidInput(format!(
            "sequence lengths differ: {} vs {}",
            a.n_max() + 1,
            b.n_max() + 1
        )));
    }
    let n_max = a.n_max();
    let d: Vec<f64> = a.log_alpha().iter().zip(b.log_alpha()).map(|(x, y)| y - x).collect();
    if n_max >= MIN_LEN {
        let (q, h) = (n_max / 4, n_max / 2);
        let slope_hi = (d[n_max] - d[h]) / (n_max - h) as f64;
        let slope_lo = (d[h] - d[q]) / (h - q) as f64;
        let gap = slope_hi - slope_lo;
        if gap.abs() > std::f64::consts::LN_2 / 8.0 {
            return Ok(SequenceEquivalence::Counterexample { index: n_max, slope_gap: gap });
        }
    }
    let half = n_max / 2;
    let increments: Vec<f64> = (half.max(1)..=n_max).map(|n| d[n] - d[n - 1]).collect();
    let (s1, s2) = if increments.is_empty() {
        (0.0, 0.0)
    } else {
        (
            increments.iter().cloned().fold(f64::INFINITY, f64::min),
            increments.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    };
    let shifted = |s: f64| d.iter().enumerate().map(move |(n, v)| v - s * n as f64);
    let lk1 = shifted(s1).fold(f64::INFINITY, f64::min);
    let lk2 = shifted(s2).fold(f64::NEG_INFINITY, f64::max);
    Ok(SequenceEquivalence::Witness(SequenceEquivalenceWitness {
        k1: lk1.exp(),
        c1: s1.exp(),
        k2: lk2.exp(),
        c2: s2.exp(),
        checked_range: n_max,
    }))
}
