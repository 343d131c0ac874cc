use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GrowthFunction;

/// Geometric probe grid in `r`, plus the random-triple budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub random_triples: usize,
    pub seed: u64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec { r_min: 1e-6, r_max: 1e6, points: 512, random_triples: 256, seed: 0 }
    }
}

impl ProbeSpec {
    pub fn radii(&self) -> Vec<f64> {
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        let m = self.points.max(2);
        (0..m).map(|i| (a + (b - a) * i as f64 / (m - 1) as f64).exp()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "k")]
pub enum ConvexityKind {
    /// `log u(r)` convex in `r`.
    LogConvex,
    /// `log u(e^x)` convex in `x`.
    LogExp,
    /// `log u(x^k)` convex in `x >= 0`.
    LogXk(f64),
}

impl ConvexityKind {
    /// Test coordinate of radius `r`.
    fn coord(self, r: f64) -> f64 {
        match self {
            ConvexityKind::LogConvex => r,
            ConvexityKind::LogExp => r.ln(),
            ConvexityKind::LogXk(k) => r.powf(1.0 / k),
        }
    }

    /// Log-coordinate `x = log r` of test coordinate `s`.
    fn log_r(self, s: f64) -> f64 {
        match self {
            ConvexityKind::LogConvex => s.ln(),
            ConvexityKind::LogExp => s,
            ConvexityKind::LogXk(k) => k * s.ln(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvexityStatus {
    PassesOnGrid,
    FailsAt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub kind: ConvexityKind,
    pub status: ConvexityStatus,
    /// `(r₁, r₂, λ)` of the first violated midpoint inequality.
    pub fail_point: Option<(f64, f64, f64)>,
    pub triples_checked: usize,
    /// Whether central second differences at sampled grid points agree in sign
    /// with the midpoint verdict.
    pub second_differences_agree: bool,
}

impl ConvexityVerdict {
    pub fn passes(&self) -> bool {
        self.status == ConvexityStatus::PassesOnGrid
    }
}

const MIDPOINT_TOL: f64 = 1e-8;

fn midpoint_violation(g_a: f64, g_m: f64, g_b: f64) -> bool {
    let scale = g_a.abs().max(g_b.abs()).max(g_m.abs()).max(1.0);
    g_m - 0.5 * (g_a + g_b) > MIDPOINT_TOL * scale
}

/// Midpoint convexity of the composed function on structured and seeded
/// random pairs of probe points. Non-finite evaluations are skipped.
pub fn classify_convexity(u: &GrowthFunction, kind: ConvexityKind, probe: &ProbeSpec) -> ConvexityVerdict {
    let g = |s: f64| u.eval_log(kind.log_r(s)).ok().filter(|v| v.is_finite());
    let s: Vec<f64> = probe.radii().into_iter().map(|r| kind.coord(r)).collect();
    let vals: Vec<Option<f64>> = s.iter().map(|&x| g(x)).collect();
    let m = s.len();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for span in [2usize, 8, 32, 128] {
        pairs.extend((0..m.saturating_sub(span)).map(|i| (i, i + span)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
    for _ in 0..probe.random_triples {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i != j {
            pairs.push((i.min(j), i.max(j)));
        }
    }

    let mut verdict = ConvexityVerdict {
        kind,
        status: ConvexityStatus::PassesOnGrid,
        fail_point: None,
        triples_checked: 0,
        second_differences_agree: true,
    };
    for (i, j) in pairs {
        let (Some(ga), Some(gb)) = (vals[i], vals[j]) else { continue };
        let mid = 0.5 * (s[i] + s[j]);
        let Some(gm) = g(mid) else { continue };
        verdict.triples_checked += 1;
        if midpoint_violation(ga, gm, gb) {
            let r = |x: f64| kind.log_r(x).exp();
            verdict.status = ConvexityStatus::FailsAt;
            verdict.fail_point = Some((r(s[i]), r(s[j]), 0.5));
            break;
        }
    }

    let mut any_negative = false;
    for i in (1..m - 1).step_by(8) {
        let h = 1e-3 * s[i].abs().max(1e-3);
        let (Some(a), Some(b), Some(c)) = (g(s[i] - h), vals[i], g(s[i] + h)) else { continue };
        if midpoint_violation(a, b, c) {
            any_negative = true;
        }
    }
    verdict.second_differences_agree = any_negative != verdict.passes();
    verdict
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncreasingVerdict {
    pub increasing: bool,
    /// `(r₁, r₂)` with `r₁ < r₂` and `u(r₁) > u(r₂)`; `r₁ = 0` when the drop is from `u(0)`.
    pub first_inversion: Option<(f64, f64)>,
}

/// Monotonicity of `u` along the probe grid, starting at `r = 0` when defined.
pub fn check_increasing(u: &GrowthFunction, probe: &ProbeSpec) -> IncreasingVerdict {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    if let Some(v0) = u.log_at_zero() {
        pts.push((0.0, v0));
    }
    for r in probe.radii() {
        if let Ok(v) = u.log_u(r) {
            if v.is_finite() {
                pts.push((r, v));
            }
        }
    }
    for w in pts.windows(2) {
        let ((r1, v1), (r2, v2)) = (w[0], w[1]);
        if v2 < v1 - 1e-12 * v1.abs().max(1.0) {
            return IncreasingVerdict { increasing: false, first_inversion: Some((r1, r2)) };
        }
    }
    IncreasingVerdict { increasing: true, first_inversion: None }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "class", content = "j")]
pub enum GrowthClass {
    /// `log u(r) / log r → ∞`
    CPlusLog,
    /// `log u(r) / r^j → ∞`
    CPlusJ(f64),
}

impl GrowthClass {
    pub fn default_threshold(self) -> f64 {
        match self {
            GrowthClass::CPlusLog => 1e3,
            GrowthClass::CPlusJ(_) => 1e2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipStatus {
    HoldsUpToRange,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub class: GrowthClass,
    pub status: MembershipStatus,
    /// Defining ratio at the largest radius where `u` was finite.
    pub last_ratio: f64,
    pub r_last: f64,
    pub threshold: f64,
    pub note: String,
}

/// Finite evidence for a growth class: the defining ratio on `log r ∈ [1, 700]`,
/// cut back to where `u` is finite.
///
/// Holds when the ratio is nondecreasing over the last quarter of the finite
/// samples and ends above `threshold`; fails when it has flattened out below
/// it. Both thresholds are engineering choices and the verdict says so.
pub fn membership(u: &GrowthFunction, class: GrowthClass, threshold: Option<f64>) -> MembershipVerdict {
    let threshold = threshold.unwrap_or_else(|| class.default_threshold());
    let finite = |x: f64| u.eval_log(x).is_ok_and(f64::is_finite);
    // shrink the range to where u is still representable
    let mut x_hi = 700.0;
    if !finite(x_hi) {
        let mut lo = 1.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + x_hi);
            if finite(mid) {
                lo = mid;
            } else {
                x_hi = mid;
            }
        }
        x_hi = lo;
    }
    let mut ratios: Vec<(f64, f64)> = Vec::new();
    for i in 0..256 {
        let x = 1.0 + (x_hi - 1.0) * i as f64 / 255.0;
        let Ok(phi) = u.eval_log(x) else { continue };
        if !phi.is_finite() {
            continue;
        }
        let lr = match class {
            GrowthClass::CPlusLog => phi / x,
            GrowthClass::CPlusJ(j) => {
                if phi > 0.0 {
                    (phi.ln() - j * x).exp()
                } else {
                    phi / (j * x).exp()
                }
            }
        };
        ratios.push((x, lr));
    }
    let note = format!("finite evidence on log r in [1, {x_hi:.3}]; threshold {threshold:e} is an engineering choice");
    let mut v = MembershipVerdict {
        class,
        status: MembershipStatus::Inconclusive,
        last_ratio: f64::NAN,
        r_last: f64::NAN,
        threshold,
        note,
    };
    if ratios.len() < 8 {
        v.note.push_str("; fewer than 8 finite samples");
        return v;
    }
    let (x_last, last) = *ratios.last().unwrap();
    v.last_ratio = last;
    v.r_last = x_last.exp();
    let tail = &ratios[ratios.len() - ratios.len() / 4..];
    let nondecreasing = tail.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-12));
    let first = tail[0].1;
    v.status = if nondecreasing && last > threshold {
        MembershipStatus::HoldsUpToRange
    } else if last < threshold && (last - first).abs() <= 1e-2 * last.abs().max(1e-300) {
        MembershipStatus::Fails
    } else {
        MembershipStatus::Inconclusive
    };
    v
}
