use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// One end of a 1-D search domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Edge {
    /// Numeric search limit. An extremum that runs into it is an error.
    Cap(f64),
    /// True domain endpoint. An extremum may sit on it and is flagged.
    Closed(f64),
}

impl Edge {
    pub fn at(self) -> f64 {
        match self {
            Edge::Cap(x) | Edge::Closed(x) => x,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub lower: Edge,
    pub upper: Edge,
    /// First bracket-expansion step; doubles on every expansion.
    pub initial_step: f64,
    /// Final bracket width, relative to `max(1, |x|)`.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            lower: Edge::Cap(-700.0),
            upper: Edge::Cap(700.0),
            initial_step: 1.0,
            x_tol: 1e-12,
            max_iter: 300,
        }
    }
}

impl SearchOptions {
    pub fn with_lower(mut self, lower: Edge) -> Self {
        self.lower = lower;
        self
    }

    pub fn with_upper(mut self, upper: Edge) -> Self {
        self.upper = upper;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.initial_step = step;
        self
    }
}

/// Where an extremum was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Interior,
    Lower,
    Upper,
}

/// Three points with the middle one lowest; certifies a minimizer of a convex
/// function inside `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub mid: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_mid: f64,
    pub f_hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    pub arg: f64,
    pub value: f64,
    pub boundary: Boundary,
    pub evaluations: usize,
}

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(f64) -> f64> Counted<F> {
    fn call(&mut self, x: f64) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Golden-section refinement of a bracket. Returns the best point seen.
fn golden<F: FnMut(f64) -> f64>(
    f: &mut Counted<F>,
    br: Bracket,
    x_tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    let mut best = (br.mid, br.f_mid);
    for (x, fx) in [(br.lo, br.f_lo), (br.hi, br.f_hi)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    let (mut a, mut b) = (br.lo, br.hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f.call(c);
    let mut fd = f.call(d);
    for _ in 0..max_iter {
        if fc < best.1 {
            best = (c, fc);
        }
        if fd < best.1 {
            best = (d, fd);
        }
        if (b - a).abs() <= x_tol * (0.5 * (a + b)).abs().max(1.0) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f.call(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f.call(d);
        }
    }
    best
}

/// Bracket expansion by doubling from `seed`, then golden section.
///
/// The objective is assumed convex (or at least unimodal). If it keeps
/// decreasing into a [`Edge::Closed`] end, the end is returned with a
/// boundary flag; running into an [`Edge::Cap`] end is `NotBracketable`.
pub fn minimize_convex_with<F>(f: F, seed: f64, opts: &SearchOptions) -> Result<Extremum>
where
    F: FnMut(f64) -> f64,
{
    let lo_lim = opts.lower.at();
    let hi_lim = opts.upper.at();
    if !(lo_lim < hi_lim) {
        return Err(Error::InvalidInput(format!(
            "empty search interval [{lo_lim}, {hi_lim}]"
        )));
    }
    let mut f = Counted { f, evals: 0 };
    let clamp = |x: f64| x.clamp(lo_lim, hi_lim);
    let h = opts.initial_step.abs().max(f64::MIN_POSITIVE);

    let x0 = clamp(if seed.is_finite() { seed } else { 0.0 });
    let f0 = f.call(x0);
    let xr = clamp(x0 + h);
    let fr = if xr != x0 { f.call(xr) } else { f0 };

    let (mut prev, mut fprev, mut cur, mut fcur, dir) = if xr != x0 && fr < f0 {
        (x0, f0, xr, fr, 1.0)
    } else {
        let xl = clamp(x0 - h);
        let fl = if xl != x0 { f.call(xl) } else { f0 };
        if xl != x0 && fl < f0 {
            (x0, f0, xl, fl, -1.0)
        } else {
            let br = Bracket {
                lo: xl,
                mid: x0,
                hi: xr,
                f_lo: fl,
                f_mid: f0,
                f_hi: fr,
            };
            return finish(&mut f, br, opts);
        }
    };

    let mut step = h;
    loop {
        step *= 2.0;
        let limit = if dir > 0.0 { hi_lim } else { lo_lim };
        let target = cur + dir * step;
        let next = if (dir > 0.0 && target >= limit) || (dir < 0.0 && target <= limit) {
            limit
        } else {
            target
        };
        let fnext = f.call(next);
        if fnext >= fcur {
            let (lo, f_lo, hi, f_hi) = if dir > 0.0 {
                (prev, fprev, next, fnext)
            } else {
                (next, fnext, prev, fprev)
            };
            let br = Bracket {
                lo,
                mid: cur,
                hi,
                f_lo,
                f_mid: fcur,
                f_hi,
            };
            return finish(&mut f, br, opts);
        }
        if next == limit {
            // the minimizer lies in [cur, limit]; `finish` flags it if it sits on the edge
            let br = if dir > 0.0 {
                Bracket { lo: cur, mid: limit, hi: limit, f_lo: fcur, f_mid: fnext, f_hi: fnext }
            } else {
                Bracket { lo: limit, mid: limit, hi: cur, f_lo: fnext, f_mid: fnext, f_hi: fcur }
            };
            return finish(&mut f, br, opts);
        }
        prev = cur;
        fprev = fcur;
        cur = next;
        fcur = fnext;
    }
}

fn finish<F: FnMut(f64) -> f64>(
    f: &mut Counted<F>,
    br: Bracket,
    opts: &SearchOptions,
) -> Result<Extremum> {
    let (x, fx) = golden(f, br, opts.x_tol, opts.max_iter);
    let edge_tol = 10.0 * opts.x_tol;
    for (edge, flag) in [(opts.lower, Boundary::Lower), (opts.upper, Boundary::Upper)] {
        let e = edge.at();
        let touches = (flag == Boundary::Lower && br.lo == e) || (flag == Boundary::Upper && br.hi == e);
        if touches && near(x, e, edge_tol) {
            return match edge {
                Edge::Closed(_) => {
                    let fe = if flag == Boundary::Lower { br.f_lo } else { br.f_hi };
                    Ok(Extremum {
                        arg: e,
                        value: fe.min(fx),
                        boundary: flag,
                        evaluations: f.evals,
                    })
                }
                Edge::Cap(_) => Err(Error::NotBracketable { coordinate: e }),
            };
        }
    }
    Ok(Extremum {
        arg: x,
        value: fx,
        boundary: Boundary::Interior,
        evaluations: f.evals,
    })
}

/// Minimize a convex function on the default range `[-700, 700]`.
pub fn minimize_convex_1d<F>(f: F, seed: f64, rel_tol: f64) -> Result<Extremum>
where
    F: FnMut(f64) -> f64,
{
    let opts = SearchOptions {
        x_tol: rel_tol.min(1e-12),
        ..SearchOptions::default()
    };
    minimize_convex_with(f, seed, &opts)
}

pub fn maximize_concave_with<F>(mut f: F, seed: f64, opts: &SearchOptions) -> Result<Extremum>
where
    F: FnMut(f64) -> f64,
{
    let ext = minimize_convex_with(|x| -f(x), seed, opts)?;
    Ok(Extremum {
        value: -ext.value,
        ..ext
    })
}

/// Maximize a concave function; `lower_clamp` turns the lower end into a
/// closed domain endpoint (e.g. `t >= 0`).
pub fn maximize_concave_1d<F>(
    f: F,
    seed: f64,
    rel_tol: f64,
    lower_clamp: Option<f64>,
) -> Result<Extremum>
where
    F: FnMut(f64) -> f64,
{
    let mut opts = SearchOptions {
        x_tol: rel_tol.min(1e-12),
        ..SearchOptions::default()
    };
    if let Some(lo) = lower_clamp {
        opts.lower = Edge::Closed(lo);
    }
    maximize_concave_with(f, seed, &opts)
}

/// Global grid scan followed by golden refinement of every descent basin.
/// For objectives that are not known to be convex.
pub fn minimize_scan<F>(f: F, points: usize, opts: &SearchOptions) -> Result<Extremum>
where
    F: FnMut(f64) -> f64,
{
    let lo = opts.lower.at();
    let hi = opts.upper.at();
    let points = points.max(3);
    let mut f = Counted { f, evals: 0 };
    let xs: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f.call(x)).collect();

    let mut best: Option<Extremum> = None;
    for i in 0..points {
        let left = if i == 0 { f64::INFINITY } else { fs[i - 1] };
        let right = if i + 1 == points { f64::INFINITY } else { fs[i + 1] };
        if !(fs[i] <= left && fs[i] <= right) || fs[i] == f64::INFINITY {
            continue;
        }
        let candidate = if i == 0 || i + 1 == points {
            let edge = if i == 0 { opts.lower } else { opts.upper };
            let flag = if i == 0 { Boundary::Lower } else { Boundary::Upper };
            match edge {
                Edge::Closed(e) => Extremum {
                    arg: e,
                    value: fs[i],
                    boundary: flag,
                    evaluations: 0,
                },
                Edge::Cap(e) => {
                    if best.is_none() && i + 1 == points {
                        return Err(Error::NotBracketable { coordinate: e });
                    }
                    continue;
                }
            }
        } else {
            let br = Bracket {
                lo: xs[i - 1],
                mid: xs[i],
                hi: xs[i + 1],
                f_lo: fs[i - 1],
                f_mid: fs[i],
                f_hi: fs[i + 1],
            };
            let (x, fx) = golden(&mut f, br, opts.x_tol, opts.max_iter);
            Extremum {
                arg: x,
                value: fx,
                boundary: Boundary::Interior,
                evaluations: 0,
            }
        };
        if best.as_ref().is_none_or(|b| candidate.value < b.value) {
            best = Some(candidate);
        }
    }
    match best {
        Some(mut b) => {
            b.evaluations = f.evals;
            Ok(b)
        }
        None => Err(Error::NotBracketable { coordinate: lo }),
    }
}

/// Solve `g(x) = target` for increasing `g` by bisection.
///
/// If `[lo, hi]` does not bracket the target it is widened (doubling the
/// width on the failing side, at most 64 times).
pub fn bisect_monotone<G>(mut g: G, target: f64, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty interval [{lo}, {hi}]")));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut glo = g(lo);
    let mut ghi = g(hi);
    let mut width = hi - lo;
    let mut expansions = 0;
    while !(glo <= target) || !(ghi >= target) {
        if expansions == 64 {
            return Err(Error::TargetOutOfRange { target, lo, hi });
        }
        expansions += 1;
        width *= 2.0;
        if !(glo <= target) {
            lo -= width;
            glo = g(lo);
            if glo.is_nan() {
                return Err(Error::TargetOutOfRange { target, lo, hi });
            }
        } else {
            hi += width;
            ghi = g(hi);
            if ghi.is_nan() {
                return Err(Error::TargetOutOfRange { target, lo, hi });
            }
        }
    }
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == target {
            return Ok(mid);
        }
        if gm < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
