use std::fmt;
use std::path::Path;

use growthcalc_core::growthfn::{
    check_increasing, classify_convexity, membership, ConvexityKind, ConvexityStatus, GrowthClass, ProbeSpec,
};
use growthcalc_core::holo::{
    coeff_bound_check, embedding_check_51, embedding_check_52, measured_bound, pointwise_check, BoundParams,
    ChaosPolynomial, HoloReport, NuclearScale,
};
use growthcalc_core::legendre::suites::{verify_suite, Suite, SuiteParams, SuiteReport};
use growthcalc_core::legendre::{
    dual, ell, function_equivalent, inverse_legendre, l_function, l_sharp, FunctionEquivalence,
    LogConcaveProfile,
};
use growthcalc_core::registry::{default_registry, read_sequence, FamilySpec, Registry, SeriesKindSpec};
use growthcalc_core::sequences::{
    check_condition, gen_bell, gen_power_factorial, seq_equivalent, Condition, ConditionStatus, SequenceEquivalence,
};
use growthcalc_core::numerics::Boundary;
use growthcalc_core::{GrowthFunction, PositiveSequence};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cli::{
    Cli, Command, FnArgs, FnCommand, HoloArgs, HoloCheck, HoloCommand, PointArgs, SeqCommand, SeqGenArgs, SeqSource,
    VerifyArgs,
};
use crate::output::{object, Report, Table};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(growthcalc_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<growthcalc_core::Error> for CliError {
    fn from(e: growthcalc_core::Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required for family {family}")))
}

struct Functions {
    user: Option<Registry>,
    builtin: Registry,
}

impl Functions {
    fn load(path: Option<&Path>) -> Result<Self> {
        Ok(Functions { user: path.map(Registry::load).transpose()?, builtin: default_registry() })
    }

    fn named(&self, name: &str) -> Result<GrowthFunction> {
        if let Some(reg) = &self.user {
            if reg.functions.contains_key(name) {
                return Ok(reg.get(name)?);
            }
        }
        if self.builtin.functions.contains_key(name) {
            return Ok(self.builtin.get(name)?);
        }
        Err(usage(format!("unknown family or registry name '{name}'")))
    }

    fn build(&self, a: &FnArgs) -> Result<GrowthFunction> {
        let fam = a.family.as_str();
        let spec = match fam {
            "ks" => FamilySpec::Ks { beta: need(a.beta, "beta", fam)? },
            "ksgen" => FamilySpec::Ksgen { beta: need(a.beta, "beta", fam)? },
            "expk" => FamilySpec::Expk { k: need(a.k, "k", fam)? },
            "exp-poly" if a.coeffs.is_empty() => return Err(usage("--coeffs is required for family exp-poly")),
            "exp-poly" => FamilySpec::ExpPoly { coeffs: a.coeffs.clone() },
            "log-quadratic" => FamilySpec::LogQuadratic { a: need(a.qa, "qa", fam)?, b: need(a.qb, "qb", fam)? },
            "power" => FamilySpec::Power { c: need(a.c, "c", fam)?, k: need(a.p, "p", fam)? },
            "series" => FamilySpec::Series {
                file: Some(need(a.file.clone(), "file", fam)?),
                bell: None,
                power_factorial: None,
                kind: parse_kind(&a.kind)?,
            },
            name => return self.named(name),
        };
        Ok(spec.build(Path::new("."))?)
    }

    /// Registry name or inline JSON spec.
    fn resolve(&self, s: &str) -> Result<GrowthFunction> {
        if s.trim_start().starts_with('{') {
            let spec: FamilySpec =
                serde_json::from_str(s).map_err(|e| usage(format!("inline family spec: {e}")))?;
            return Ok(spec.build(Path::new("."))?);
        }
        self.named(s)
    }

    fn simple(&self, family: &str, beta: Option<f64>) -> Result<GrowthFunction> {
        self.build(&FnArgs {
            family: family.to_string(),
            beta,
            k: None,
            coeffs: vec![],
            qa: None,
            qb: None,
            c: None,
            p: None,
            file: None,
            kind: "plain".into(),
        })
    }
}

fn parse_kind(s: &str) -> Result<SeriesKindSpec> {
    match s {
        "plain" => Ok(SeriesKindSpec::Plain),
        "g-alpha" => Ok(SeriesKindSpec::GAlpha),
        "g-inv-alpha" => Ok(SeriesKindSpec::GInvAlpha),
        _ => Err(usage(format!("--kind must be plain, g-alpha or g-inv-alpha, got '{s}'"))),
    }
}

enum Points {
    One(f64),
    Grid(Vec<f64>),
}

fn grid(g: &[f64], geometric: bool) -> Result<Vec<f64>> {
    let &[lo, hi, n] = g else {
        return Err(usage("--grid takes lo,hi,points"));
    };
    if !(n >= 1.0 && n.fract() == 0.0) {
        return Err(usage(format!("--grid point count must be a positive integer, got {n}")));
    }
    let n = n as usize;
    if geometric && !(lo > 0.0 && hi > 0.0) {
        return Err(usage("--grid for radii needs lo, hi > 0"));
    }
    let step = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
    Ok((0..n)
        .map(|i| if geometric { (lo.ln() + (hi.ln() - lo.ln()) * step(i)).exp() } else { lo + (hi - lo) * step(i) })
        .collect())
}

fn t_points(p: &PointArgs) -> Result<Points> {
    match (p.t, p.grid.is_empty()) {
        (Some(t), _) => Ok(Points::One(t)),
        (None, false) => Ok(Points::Grid(grid(&p.grid, false)?)),
        (None, true) => Err(usage("one of --t or --grid is required")),
    }
}

fn r_points(p: &PointArgs) -> Result<Points> {
    if p.t.is_some() {
        return Err(usage("--t does not apply here; use --r or --grid"));
    }
    match (p.r, p.grid.is_empty()) {
        (Some(r), _) => Ok(Points::One(r)),
        (None, false) => Ok(Points::Grid(grid(&p.grid, true)?)),
        (None, true) => Err(usage("one of --r or --grid is required")),
    }
}

/// Evaluates `f` at each point; a single point reports just the values, a
/// grid reports rows keyed by `coord`.
fn pointwise(
    u: &GrowthFunction,
    pts: Points,
    coord: &'static str,
    names: &[&'static str],
    f: impl Fn(f64) -> Result<Vec<Value>>,
) -> Result<Report> {
    match pts {
        Points::One(x) => Ok(Report::ok(object(names.iter().copied().zip(f(x)?)))),
        Points::Grid(xs) => {
            let mut rows = Vec::new();
            let mut table = Vec::new();
            for x in xs {
                let vals = f(x)?;
                let mut row = vec![(coord, json!(x))];
                row.extend(names.iter().copied().zip(vals.iter().cloned()));
                rows.push(object(row));
                let mut cells = vec![json!(x)];
                cells.extend(vals);
                table.push(cells);
            }
            let mut header = vec![coord];
            header.extend_from_slice(names);
            Ok(Report::ok(json!({"function": u.describe(), "rows": rows})).with_table(Table { header, rows: table }))
        }
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let fns = Functions::load(cli.run.registry.as_deref())?;
    match &cli.command {
        Command::Seq(c) => run_seq(c),
        Command::Func(FnCommand::Eval { f, at }) => {
            let u = fns.build(f)?;
            pointwise(&u, r_points(at)?, "r", &["log_u"], |r| Ok(vec![json!(u.log_u(r)?)]))
        }
        Command::Func(FnCommand::Classify { f, r_min, r_max, points }) => {
            let u = fns.build(f)?;
            classify(&u, ProbeSpec { r_min: *r_min, r_max: *r_max, points: *points, seed: cli.run.seed, ..ProbeSpec::default() })
        }
        Command::Ell { f, at } => {
            let u = fns.build(f)?;
            let pts = t_points(at)?;
            let single = matches!(pts, Points::One(_));
            pointwise(&u, pts, "t", &["log_ell", "rho", "boundary"], |t| {
                let e = ell(&u, t)?;
                let boundary = match e.boundary {
                    Boundary::Interior if single => Value::Null,
                    b => json!(b),
                };
                Ok(vec![json!(e.log_ell), json!(e.rho), boundary])
            })
            .map(strip_nulls)
        }
        Command::Dual { f, at } => {
            let u = fns.build(f)?;
            pointwise(&u, r_points(at)?, "r", &["log_dual"], |r| Ok(vec![json!(dual(&u, r)?)]))
        }
        Command::Lfn { f, at } => {
            let u = fns.build(f)?;
            pointwise(&u, r_points(at)?, "r", &["log_l"], |r| Ok(vec![json!(l_function(&u, r.ln())?)]))
        }
        Command::Lsharp { f, at } => {
            let u = fns.build(f)?;
            pointwise(&u, r_points(at)?, "r", &["log_lsharp"], |r| Ok(vec![json!(l_sharp(&u, r.ln())?)]))
        }
        Command::Theta { f, at } => {
            let u = fns.build(f)?;
            let prof = LogConcaveProfile::from_legendre(&u);
            pointwise(&u, r_points(at)?, "r", &["log_theta", "log_u"], |r| {
                Ok(vec![json!(inverse_legendre(&prof, r)?), json!(u.log_u(r)?)])
            })
        }
        Command::Equiv { u, v, r_min, r_max } => {
            let (u, v) = (fns.resolve(u)?, fns.resolve(v)?);
            let res = function_equivalent(&u, &v, *r_min, *r_max)?;
            let fail = matches!(res, FunctionEquivalence::Counterexample { .. });
            Ok(Report::ok(json!({"u": u.describe(), "v": v.describe(), "equivalence": res})).failing_if(fail))
        }
        Command::Verify(a) => verify(&fns, a, cli.run.tol),
        Command::Holo(HoloCommand::Check(a)) => holo(&fns, a, cli.run.seed),
    }
}

fn strip_nulls(mut r: Report) -> Report {
    if let Value::Object(o) = &mut r.value {
        o.retain(|_, v| !v.is_null());
    }
    r
}

fn gen_sequence(a: &SeqGenArgs) -> Result<PositiveSequence> {
    match a.family.as_str() {
        "bell" => Ok(gen_bell(need(a.order, "order", "bell")?, a.n)?),
        "power-factorial" => Ok(gen_power_factorial(need(a.beta, "beta", "power-factorial")?, a.n)?),
        other => Err(usage(format!("--family must be bell or power-factorial, got '{other}'"))),
    }
}

/// `α(n)` as integers when every value is one (and exactly representable).
fn plain_values(seq: &PositiveSequence) -> Value {
    let vals: Vec<f64> = seq.log_alpha().iter().map(|l| l.exp()).collect();
    let integral = vals.iter().all(|v| *v < 9.0e15 && (v - v.round()).abs() <= 1e-9 * v.max(1.0));
    if integral {
        json!(vals.iter().map(|v| v.round() as u64).collect::<Vec<_>>())
    } else {
        json!(vals)
    }
}

fn run_seq(c: &SeqCommand) -> Result<Report> {
    match c {
        SeqCommand::Gen { s } => {
            let seq = gen_sequence(s)?;
            let mut v = seq.to_json();
            let values = plain_values(&seq);
            v["values"] = values.clone();
            let rows = seq
                .log_alpha()
                .iter()
                .enumerate()
                .map(|(n, la)| vec![json!(n), values[n].clone(), json!(la)])
                .collect();
            Ok(Report::ok(v).with_table(Table { header: vec!["n", "alpha", "log_alpha"], rows }))
        }
        SeqCommand::Check { s, conditions, search_cap } => {
            let seq = sequence_from(s)?;
            let conds: Vec<Condition> = if conditions.is_empty() {
                Condition::ALL.to_vec()
            } else {
                conditions.iter().map(|c| c.parse::<Condition>()).collect::<std::result::Result<_, _>>()?
            };
            let verdicts: Vec<_> = conds.iter().map(|&c| check_condition(&seq, c, *search_cap)).collect();
            let fail = verdicts.iter().any(|v| v.status == ConditionStatus::FailsAtIndex);
            let rows = verdicts
                .iter()
                .map(|v| {
                    vec![json!(v.condition), json!(v.status), json!(v.witness), json!(v.fail_index), json!(v.note)]
                })
                .collect();
            Ok(Report::ok(json!({"n_max": seq.n_max(), "verdicts": verdicts}))
                .with_table(Table { header: vec!["condition", "status", "witness", "fail_index", "note"], rows })
                .failing_if(fail))
        }
        SeqCommand::Equiv { a, b } => {
            let (sa, sb) = (read_sequence(a)?, read_sequence(b)?);
            let res = seq_equivalent(&sa, &sb)?;
            let fail = matches!(res, SequenceEquivalence::Counterexample { .. });
            let mut v = json!({"equivalence": res});
            if let SequenceEquivalence::Witness(w) = &res {
                v["max_violation"] = json!(w.max_violation(&sa, &sb));
            }
            Ok(Report::ok(v).failing_if(fail))
        }
    }
}

fn sequence_from(s: &SeqSource) -> Result<PositiveSequence> {
    match (&s.file, &s.family) {
        (Some(f), _) => Ok(read_sequence(f)?),
        (None, Some(fam)) => {
            gen_sequence(&SeqGenArgs { family: fam.clone(), order: s.order, beta: s.beta, n: s.n })
        }
        (None, None) => Err(usage("one of --file or --family is required")),
    }
}

fn classify(u: &GrowthFunction, probe: ProbeSpec) -> Result<Report> {
    let kinds = [
        ("log_convex", ConvexityKind::LogConvex),
        ("log_x1_convex", ConvexityKind::LogXk(1.0)),
        ("log_x2_convex", ConvexityKind::LogXk(2.0)),
        ("log_x4_convex", ConvexityKind::LogXk(4.0)),
        ("log_exp_convex", ConvexityKind::LogExp),
    ];
    let mut v = json!({"function": u.describe(), "probe": probe});
    let mut rows = Vec::new();
    for (name, kind) in kinds {
        let verdict = classify_convexity(u, kind, &probe);
        rows.push(vec![json!(name), json!(verdict.status == ConvexityStatus::PassesOnGrid)]);
        v[name] = json!(verdict);
    }
    let inc = check_increasing(u, &probe);
    rows.push(vec![json!("increasing"), json!(inc.increasing)]);
    v["increasing"] = json!(inc);
    let m = membership(u, GrowthClass::CPlusLog, None);
    rows.push(vec![json!("c_plus_log"), json!(m.status)]);
    v["c_plus_log"] = json!(m);
    Ok(Report::ok(v).with_table(Table { header: vec!["property", "verdict"], rows }))
}

fn suite_rows(rep: &SuiteReport, rows: &mut Vec<Vec<Value>>) {
    for r in &rep.rows {
        rows.push(vec![
            json!(rep.suite),
            json!(r.label),
            json!(r.x),
            json!(r.y),
            json!(r.relation),
            json!(r.lhs),
            json!(r.rhs),
            json!(r.slack),
        ]);
    }
}

fn verify(fns: &Functions, a: &VerifyArgs, tol: Option<f64>) -> Result<Report> {
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(usage(format!("tolerance must be positive, got {t}")));
        }
    }
    let suites: Vec<Suite> =
        if a.suite == "all" { Suite::ALL.to_vec() } else { vec![a.suite.parse::<Suite>()?] };
    let range = match a.range.as_slice() {
        [] => None,
        [lo, hi] => Some((*lo, *hi)),
        _ => return Err(usage("--range takes lo,hi")),
    };
    let u = a.family.as_deref().map(|f| fns.simple(f, a.beta)).transpose()?;
    let params = SuiteParams {
        beta: if u.is_none() { a.beta } else { None },
        u,
        a: a.a,
        k: a.k,
        n_max: a.nmax,
        range,
        points: a.points,
        tol,
    };
    let reports: Vec<SuiteReport> = suites.iter().map(|&s| verify_suite(s, &params)).collect::<std::result::Result<_, _>>()?;
    let fail = reports.iter().any(|r| !r.passed());
    let mut rows = Vec::new();
    for r in &reports {
        suite_rows(r, &mut rows);
    }
    let value = if reports.len() == 1 { json!(reports[0]) } else { json!({"reports": reports}) };
    let header = vec!["suite", "label", "x", "y", "relation", "lhs", "rhs", "slack"];
    Ok(Report::ok(value).with_table(Table { header, rows }).failing_if(fail))
}

fn holo(fns: &Functions, a: &HoloArgs, seed: u64) -> Result<Report> {
    let u = match a.family.as_str() {
        "ks" | "ksgen" => fns.simple(&a.family, Some(a.beta))?,
        name => fns.named(name)?,
    };
    let scale = NuclearScale::new(a.lambda.clone(), a.rho)?;
    let f = match &a.poly {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            ChaosPolynomial::from_json(&v)?
        }
        None => ChaosPolynomial::random(a.dim, a.degree, &mut ChaCha8Rng::seed_from_u64(seed))?,
    };
    let want = |c: HoloCheck| a.check == c || a.check == HoloCheck::All;
    let mut reports: Vec<HoloReport> = Vec::new();
    if want(HoloCheck::KByG) {
        reports.push(embedding_check_51(&f, &u, &scale, a.p, a.q, a.multistart, seed)?);
    }
    if want(HoloCheck::GByK) {
        reports.push(embedding_check_52(&f, &u, &scale, a.p, a.multistart, seed)?);
    }
    if want(HoloCheck::CoeffBound) {
        let k = match a.k {
            Some(k) => k,
            None => measured_bound(&f, &u, &scale, a.p, a.a, a.multistart, seed)?,
        };
        reports.push(coeff_bound_check(&f, &u, &scale, BoundParams { k, a: a.a, p: a.p, q: a.q })?);
    }
    if want(HoloCheck::Pointwise) {
        reports.push(pointwise_check(&f, &u, &scale, a.p, a.a, a.samples, a.series, seed)?);
    }
    let fail = reports.iter().any(|r| !r.passed());
    let rows = reports
        .iter()
        .flat_map(|r| {
            r.rows.iter().map(|row| {
                vec![json!(r.check), json!(row.label), json!(row.index), json!(row.lhs), json!(row.rhs), json!(row.slack)]
            })
        })
        .collect();
    let value = json!({"function": u.describe(), "polynomial": f.to_json(), "reports": reports});
    let header = vec!["check", "label", "index", "lhs", "rhs", "slack"];
    Ok(Report::ok(value).with_table(Table { header, rows }).failing_if(fail))
}
