use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn growthcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_growthcalc"))
        .args(args)
        .env_remove("GROWTHCALC_TOL")
        .output()
        .expect("run growthcalc")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("growthcalc-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn ell_at_one_point() {
    let out = growthcalc(&["ell", "--family", "ks", "--beta", "0", "--t", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "{\"log_ell\":1.0,\"rho\":1.0}\n");
}

#[test]
fn ell_on_a_grid_as_csv() {
    let out = growthcalc(&["ell", "--family", "ks", "--beta", "0", "--grid", "1,3,3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,log_ell,rho,boundary");
    assert_eq!(lines.len(), 4);
    // log ℓ(t) = t(1 - ln t) for e^r
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        let t: f64 = cells[0].parse().unwrap();
        let le: f64 = cells[1].parse().unwrap();
        assert!((le - t * (1.0 - t.ln())).abs() < 1e-9, "{line}");
    }
}

#[test]
fn dual_of_exp_is_exp() {
    let v = json(&growthcalc(&["dual", "--family", "ks", "--beta", "0", "--r", "3"]));
    assert!((v["log_dual"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn theta_recovers_u() {
    let v = json(&growthcalc(&["theta", "--family", "ks", "--beta", "0.5", "--r", "2"]));
    let (th, u) = (v["log_theta"].as_f64().unwrap(), v["log_u"].as_f64().unwrap());
    assert!((th - u).abs() < 1e-6 * u.abs().max(1.0), "{v}");
}

#[test]
fn bell_numbers_are_printed_as_integers() {
    let out = growthcalc(&["seq", "gen", "--family", "bell", "--order", "2", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["values"], serde_json::json!([1, 1, 2, 5, 15, 52]));
    assert_eq!(v["N"], 5);
}

#[test]
fn generated_sequences_round_trip_through_files() {
    let dir = scratch("seq");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    let gen = |beta: &str| growthcalc(&["seq", "gen", "--family", "power-factorial", "--beta", beta, "--n", "30"]).stdout;
    std::fs::write(&a, gen("0.5")).unwrap();
    std::fs::write(&b, gen("0.5")).unwrap();
    let same = growthcalc(&["seq", "equiv", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap()]);
    assert_eq!(same.status.code(), Some(0), "{}", String::from_utf8_lossy(&same.stdout));
    std::fs::write(&b, gen("0.25")).unwrap();
    let differ = growthcalc(&["seq", "equiv", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap()]);
    assert_eq!(differ.status.code(), Some(1));
    assert_eq!(json(&differ)["equivalence"]["result"], "counterexample");
}

#[test]
fn seq_check_reports_every_condition() {
    let out = growthcalc(&["seq", "check", "--family", "bell", "--order", "2", "--n", "30"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdicts"].as_array().unwrap().len(), 11);
    let one = json(&growthcalc(&["seq", "check", "--family", "bell", "--order", "2", "--condition", "C1"]));
    assert_eq!(one["verdicts"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_a4_passes() {
    let out = growthcalc(&["verify", "--suite", "a4", "--nmax", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "pass");
}

#[test]
fn verify_fails_under_an_impossible_tolerance() {
    let out = Command::new(env!("CARGO_BIN_EXE_growthcalc"))
        .args(["verify", "--suite", "thm42", "--range", "0.5,10", "--points", "8"])
        .env("GROWTHCALC_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "fail");
}

#[test]
fn verify_csv_lists_rows() {
    let out = growthcalc(&["verify", "--suite", "stirling", "--nmax", "10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("suite,label,x,y,relation,lhs,rhs,slack\n"));
    assert!(text.lines().count() > 10);
}

#[test]
fn equiv_detects_inequivalent_functions() {
    let out = growthcalc(&["equiv", "--u", "exp", "--v", "ks-0.5"]);
    assert_eq!(out.status.code(), Some(1));
    let ok = growthcalc(&["equiv", "--u", "exp", "--v", r#"{"family":"ksgen","beta":0.0}"#, "--r-max", "100"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
}

#[test]
fn fn_classify_reports_the_convexity_chain() {
    let v = json(&growthcalc(&["fn", "classify", "--family", "exp", "--r-max", "100", "--points", "64"]));
    for key in ["log_convex", "log_x1_convex", "log_x2_convex", "log_x4_convex", "log_exp_convex"] {
        assert_eq!(v[key]["status"], "passes-on-grid", "{key}: {v}");
    }
    assert_eq!(v["increasing"]["increasing"], true);
}

#[test]
fn user_registry_names_resolve() {
    let dir = scratch("registry");
    let path = dir.join("fns.toml");
    std::fs::write(&path, "[functions.mine]\nfamily = \"ksgen\"\nbeta = 0.5\n").unwrap();
    let out = growthcalc(&["--registry", path.to_str().unwrap(), "fn", "eval", "--family", "mine", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // (1 - β) r^{1/(1-β)} at r = 1
    assert!((json(&out)["log_u"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn holo_check_is_deterministic_per_seed() {
    let args = ["holo", "check", "--seed", "7", "--samples", "200"];
    let a = growthcalc(&args);
    let b = growthcalc(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let c = growthcalc(&["holo", "check", "--seed", "8", "--samples", "200"]);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json(&a)["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn cache_reuses_reports() {
    let dir = scratch("cache");
    let d = dir.to_str().unwrap();
    let first = growthcalc(&["--cache-dir", d, "lfn", "--family", "ks", "--beta", "0", "--r", "2"]);
    let entries: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let path = entries[0].as_ref().unwrap().path();
    let mut stored: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    stored["output"] = Value::String("cached\n".into());
    std::fs::write(&path, stored.to_string()).unwrap();
    let second = growthcalc(&["--cache-dir", d, "lfn", "--family", "ks", "--beta", "0", "--r", "2"]);
    assert_eq!(String::from_utf8_lossy(&second.stdout), "cached\n");
    assert_ne!(first.stdout, second.stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(growthcalc(&["--bogus"]).status.code(), Some(2));
    assert_eq!(growthcalc(&["ell", "--family", "ks", "--t", "1"]).status.code(), Some(2));
    assert_eq!(growthcalc(&["ell", "--family", "nosuch", "--t", "1"]).status.code(), Some(2));
    assert_eq!(growthcalc(&["verify", "--suite", "nosuch"]).status.code(), Some(2));
}

#[test]
fn numeric_errors_name_their_kind() {
    let out = growthcalc(&["dual", "--family", "ks", "--beta", "1", "--r", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: NotBracketable"), "{err}");
}

#[test]
fn every_subcommand_has_help() {
    for path in [
        &["seq"][..],
        &["seq", "gen"],
        &["seq", "check"],
        &["seq", "equiv"],
        &["fn", "eval"],
        &["fn", "classify"],
        &["ell"],
        &["dual"],
        &["lfn"],
        &["lsharp"],
        &["theta"],
        &["equiv"],
        &["verify"],
        &["holo", "check"],
    ] {
        let mut args = path.to_vec();
        args.push("--help");
        let out = growthcalc(&args);
        assert_eq!(out.status.code(), Some(0), "{path:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{path:?}");
    }
}
