use std::process::ExitCode;
use std::time::{Duration, Instant};

use growthcalc_core::growthfn::{
    check_increasing, classify_convexity, membership, ConvexityKind, ConvexityStatus, GrowthClass, MembershipStatus,
    ProbeSpec,
};
use growthcalc_core::holo::{
    coeff_bound_check, embedding_check_51, embedding_check_52, measured_bound, pointwise_check, BoundParams,
    ChaosPolynomial, NuclearScale, DEFAULT_MULTISTART,
};
use growthcalc_core::legendre::suites::{verify_suite, Suite, SuiteParams};
use growthcalc_core::legendre::{dual, ell, inverse_legendre, LogConcaveProfile};
use growthcalc_core::registry::default_registry;
use growthcalc_core::sequences::{check_condition, gen_bell, Condition};
use growthcalc_core::GrowthFunction;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into() }
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn closed_form_ell() -> Outcome {
    let mut worst = 0.0f64;
    for beta in [0.0, 0.25, 0.5, 1.0] {
        let u = GrowthFunction::ks(beta);
        for n in 1..=40 {
            let nf = n as f64;
            let want = (1.0 + beta) * nf * (1.0 - nf.ln());
            let got = ell(&u, nf).map_or(f64::NAN, |e| e.log_ell);
            // n = e is not an integer, so want is never 0 here
            worst = worst.max(rel_err(got, want));
        }
    }
    Outcome::new(worst <= 1e-7, format!("max rel err {worst:.2e}"))
}

fn dual_pairs() -> Outcome {
    let mut worst = 0.0f64;
    for beta in [0.0, 0.25, 0.5] {
        let u = GrowthFunction::ks(beta);
        for r in geometric(1e-2, 1e2, 64) {
            let want = (1.0 - beta) * r.powf(1.0 / (1.0 - beta));
            let got = dual(&u, r).unwrap_or(f64::NAN);
            worst = worst.max(rel_err(got, want));
        }
    }
    Outcome::new(worst <= 1e-6, format!("max rel err {worst:.2e}"))
}

fn dual_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut fails = Vec::new();
    let us = [GrowthFunction::ks(0.0), GrowthFunction::ks(0.25), GrowthFunction::ks(0.5), GrowthFunction::exp_k(2)];
    for u in us {
        let params = SuiteParams { u: Some(u.clone()), range: Some((0.5, 30.0)), ..Default::default() };
        match verify_suite(Suite::Thm42, &params) {
            Ok(rep) => {
                worst = worst.max(rep.max_violation);
                if !rep.passed() {
                    fails.push(u.name());
                }
            }
            Err(e) => fails.push(format!("{}: {e}", u.name())),
        }
    }
    Outcome::new(fails.is_empty(), format!("max |diff| {worst:.2e} {}", fails.join(", ")))
}

fn admissible_profiles() -> Vec<LogConcaveProfile> {
    vec![
        LogConcaveProfile::new("gauss", |t| -t * t, 0.0),
        LogConcaveProfile::new("exp-dual", |t| if t == 0.0 { 0.0 } else { 2.0 * t - 2.0 * t * t.ln() }, 1.0),
        LogConcaveProfile::new("ks-0.5", |t| if t == 0.0 { 0.0 } else { 1.5 * t * (1.0 - t.ln()) }, 1.0),
    ]
}

fn round_trips() -> Outcome {
    let probe = ProbeSpec::default();
    let mut worst = 0.0f64;
    let mut used = Vec::new();
    let mut fails = Vec::new();
    for (name, u) in default_registry().build_all().expect("registry builds") {
        let convex = classify_convexity(&u, ConvexityKind::LogExp, &probe).status == ConvexityStatus::PassesOnGrid;
        let admissible = check_increasing(&u, &probe).increasing
            && membership(&u, GrowthClass::CPlusLog, None).status != MembershipStatus::Fails;
        if !(convex && admissible) {
            continue;
        }
        used.push(name.clone());
        let f = LogConcaveProfile::from_legendre(&u);
        // series-backed entries are only evaluable on a bounded range
        for r in geometric(1e-3, 10.0, 48).into_iter().filter(|&r| u.log_u(2.0 * r).is_ok_and(f64::is_finite)) {
            match (inverse_legendre(&f, r), u.log_u(r)) {
                (Ok(got), Ok(want)) => worst = worst.max((got - want).abs()),
                (a, b) => fails.push(format!("{name} at r={r}: {a:?} {b:?}")),
            }
        }
    }
    for f in admissible_profiles() {
        let g = f.clone();
        let theta = GrowthFunction::custom(
            format!("theta[{}]", f.name),
            move |x| inverse_legendre(&g, x.exp()).unwrap_or(f64::NAN),
            Some(f.log_f(0.0)),
            true,
        );
        for i in 0..40 {
            let t = 0.5 + 19.5 * i as f64 / 39.0;
            match ell(&theta, t) {
                Ok(e) => worst = worst.max((e.log_ell - f.log_f(t)).abs()),
                Err(e) => fails.push(format!("{} at t={t}: {e}", f.name)),
            }
        }
    }
    let ok = worst <= 1e-6 && fails.is_empty() && used.len() >= 6;
    Outcome::new(ok, format!("max |diff| {worst:.2e} over {} {}", used.join(" "), fails.join("; ")))
}

fn inequality_suites() -> Outcome {
    let mut runs: Vec<(Suite, SuiteParams)> = vec![
        (Suite::LemA1, SuiteParams { n_max: Some(30), ..Default::default() }),
        (Suite::A4, SuiteParams { n_max: Some(100), ..Default::default() }),
        (Suite::Stirling, SuiteParams { n_max: Some(100), ..Default::default() }),
        (Suite::KsSandwich, SuiteParams::default()),
    ];
    for beta in [0.0, 0.25, 0.5, 1.0] {
        let u = Some(GrowthFunction::ks(beta));
        for s in [Suite::LemA2, Suite::Thm31Upper, Suite::Thm31Lower] {
            runs.push((s, SuiteParams { u: u.clone(), ..Default::default() }));
        }
    }
    for beta in [0.0, 0.25, 0.5] {
        runs.push((Suite::Thm43, SuiteParams { u: Some(GrowthFunction::ks(beta)), ..Default::default() }));
    }
    let mut worst = 0.0f64;
    let mut fails = Vec::new();
    for (suite, params) in &runs {
        match verify_suite(*suite, params) {
            Ok(rep) => {
                worst = worst.max(rep.max_violation);
                if !rep.passed() {
                    fails.push(format!("{suite} {}", rep.params));
                }
            }
            Err(e) => fails.push(format!("{suite}: {e}")),
        }
    }
    Outcome::new(fails.is_empty(), format!("{} runs, max violation {worst:.2e} {}", runs.len(), fails.join("; ")))
}

fn set_partitions(n: usize) -> u64 {
    // restricted growth strings a[0] = 0, a[i] <= 1 + max(a[..i])
    fn go(i: usize, n: usize, max: usize) -> u64 {
        if i == n {
            return 1;
        }
        (0..=max + 1).map(|v| go(i + 1, n, max.max(v))).sum()
    }
    if n == 0 {
        1
    } else {
        go(1, n, 0)
    }
}

/// `n! [x^n] exp(e^x - 1)` as `Σ_j (e^x - 1)^j / j!`.
fn bell_by_composition(n_max: usize) -> Vec<BigInt> {
    let fact: Vec<BigInt> = (0..=n_max).scan(BigInt::one(), |f, i| {
        if i > 0 {
            *f *= BigInt::from(i);
        }
        Some(f.clone())
    })
    .collect();
    let mut g: Vec<BigRational> = fact.iter().map(|f| BigRational::new(BigInt::one(), f.clone())).collect();
    g[0] = BigRational::zero();
    let mul = |a: &[BigRational], b: &[BigRational]| {
        let mut c = vec![BigRational::zero(); n_max + 1];
        for i in 0..=n_max {
            for j in 0..=n_max - i {
                c[i + j] += &a[i] * &b[j];
            }
        }
        c
    };
    let mut total = vec![BigRational::zero(); n_max + 1];
    let mut power = vec![BigRational::zero(); n_max + 1];
    power[0] = BigRational::one();
    for j in 0..=n_max {
        for i in 0..=n_max {
            total[i] += &power[i] / BigRational::from_integer(fact[j].clone());
        }
        power = mul(&power, &g);
    }
    total.iter().zip(&fact).map(|(c, f)| (c * BigRational::from_integer(f.clone())).to_integer()).collect()
}

fn bell_numbers() -> Outcome {
    let seq = gen_bell(2, 25).expect("bell");
    let la = seq.log_alpha();
    let mut bad = Vec::new();
    for (n, l) in la.iter().enumerate().take(13) {
        if l.exp().round() as u64 != set_partitions(n) {
            bad.push(format!("brute n={n}"));
        }
    }
    let oracle = bell_by_composition(25);
    for (n, b) in oracle.iter().enumerate() {
        if (la[n] - b.to_f64().unwrap().ln()).abs() > 1e-12 {
            bad.push(format!("egf n={n}"));
        }
    }
    let conds = [Condition::A1, Condition::A2, Condition::B2, Condition::B3, Condition::C1, Condition::C2, Condition::C3];
    for k in [2, 3] {
        let s = gen_bell(k, 40).expect("bell");
        for c in conds {
            if !check_condition(&s, c, 50.0).holds() {
                bad.push(format!("k={k} {c}"));
            }
        }
    }
    Outcome::new(bad.is_empty(), if bad.is_empty() { "all agree".to_string() } else { bad.join(", ") })
}

fn convexity_chain() -> Outcome {
    let probe = ProbeSpec::default();
    let passes = |u: &GrowthFunction, k: ConvexityKind| classify_convexity(u, k, &probe).status == ConvexityStatus::PassesOnGrid;
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, u) in default_registry().build_all().expect("registry builds") {
        if !check_increasing(&u, &probe).increasing {
            continue;
        }
        checked += 1;
        let xk: Vec<bool> = [1.0, 2.0, 4.0].iter().map(|&k| passes(&u, ConvexityKind::LogXk(k))).collect();
        if passes(&u, ConvexityKind::LogConvex) && xk.iter().any(|p| !p) {
            bad.push(format!("{name}: log-convex but not (log, x^k)"));
        }
        if xk.iter().any(|&p| p) && !passes(&u, ConvexityKind::LogExp) {
            bad.push(format!("{name}: (log, x^k) but not (log, exp)"));
        }
    }
    let quartic = GrowthFunction::exp_poly(vec![0.0, 0.0, 1.0, -1.0, 1.0]);
    if !passes(&quartic, ConvexityKind::LogExp) {
        bad.push("quartic fails (log, exp)".into());
    }
    let lq = default_registry().get("log-quadratic").expect("registered");
    if check_increasing(&lq, &probe).increasing {
        bad.push("log-quadratic passes increasing".into());
    }
    if !passes(&lq, ConvexityKind::LogExp) {
        bad.push("log-quadratic fails (log, exp)".into());
    }
    let ok = bad.is_empty() && checked >= 6;
    Outcome::new(ok, format!("{checked} increasing families {}", bad.join("; ")))
}

fn desk_model() -> Outcome {
    let scale = NuclearScale::new(vec![2.0, 4.0], 0.5).expect("scale");
    let us = [GrowthFunction::ks(0.0), GrowthFunction::ks(0.5)];
    let mut bad = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let mut strict_51 = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = ChaosPolynomial::random(2, 4, &mut rng).expect("poly");
        for u in &us {
            let ms = DEFAULT_MULTISTART;
            let mut run = || -> growthcalc_core::Result<Vec<(String, bool, f64)>> {
                let e51 = embedding_check_51(&f, u, &scale, 2, 0, ms, seed)?;
                if e51.params["holds_without_inflation"].as_bool() == Some(true) {
                    strict_51 += 1;
                }
                let e52 = embedding_check_52(&f, u, &scale, 1, ms, seed)?;
                let k = measured_bound(&f, u, &scale, 2, 1.0, ms, seed)?;
                let cb = coeff_bound_check(&f, u, &scale, BoundParams { k, a: 1.0, p: 2, q: 0 })?;
                let pw = pointwise_check(&f, u, &scale, 2, 1.0, 1000, false, seed)?;
                Ok([e51, e52, cb, pw].into_iter().map(|r| (r.check.clone(), r.passed(), r.max_violation)).collect())
            };
            match run() {
                Ok(res) => {
                    for (check, ok, v) in res {
                        worst = worst.max(v);
                        if !ok {
                            bad.push(format!("seed {seed} {} {check}", u.name()));
                        }
                    }
                }
                Err(e) => bad.push(format!("seed {seed} {}: {e}", u.name())),
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("200 instances, max violation {worst:.2e}, norm embedding holds uninflated in {strict_51}/200 {}", bad.join("; ")),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 8] = [
        ("closed-form Legendre values", closed_form_ell, Some(Duration::from_secs(1))),
        ("dual pairs", dual_pairs, Some(Duration::from_secs(1))),
        ("dual identity", dual_identity, Some(Duration::from_secs(5))),
        ("round trips", round_trips, None),
        ("inequality suites", inequality_suites, Some(Duration::from_secs(30))),
        ("Bell numbers", bell_numbers, Some(Duration::from_secs(10))),
        ("convexity chain", convexity_chain, None),
        ("desk model", desk_model, Some(Duration::from_secs(60))),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = budget.is_none_or(|b| took <= b);
        let ok = out.ok && in_time;
        if !ok {
            failed += 1;
        }
        let budget = budget.map_or(String::new(), |b| format!(" / {:.0} s", b.as_secs_f64()));
        println!(
            "criterion {}: {} {name} ({:.2} s{budget}) {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail.trim_end()
        );
    }
    println!("acceptance: {}/8 passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
