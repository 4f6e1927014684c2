use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_density-lab"));
    c.env_remove("DENSITY_LAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn build(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut all = vec!["build"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", &path]);
    let o = run(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn build_writes_a_versioned_file_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(
        dir.path(),
        "b.json",
        &["boxes", "-d", "2", "--preset", "relaxed", "-N", "8"],
    );
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["kind"], "boxes");
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["radii"].as_array().unwrap().len(), 9);

    let o = run(&["build", "annuli", "-d", "3", "--eps0", "1/100", "-N", "6"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["params"]["epsilon0"]["den"], "100");
    assert!(String::from_utf8_lossy(&o.stderr).contains("certificates hold"));
}

#[test]
fn bad_input_is_rejected() {
    let o = run(&["build", "boxes", "-d", "1"]);
    assert_ne!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension 1"));
    for args in [
        &["build", "annuli", "--eps0", "0.01"][..],
        &["build", "boxes", "--eps", "1e-2"],
        &["verify", "no-such-check"],
        &["profile", "/nonexistent/file.json"],
    ] {
        let o = run(args);
        assert_ne!(code(&o), 0, "{args:?}");
        assert_ne!(code(&o), 2, "{args:?} must not look inconclusive");
    }
}

#[test]
fn documented_examples_pass() {
    let dir = tempfile::tempdir().unwrap();
    let boxes = build(dir.path(), "b.json", &["boxes", "-N", "8"]);
    let o = run(&[
        "verify",
        "counterexample",
        "--construction",
        &boxes,
        "--pins",
        "grid:3",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["check"], "counterexample");
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["schema_version"], 1);

    let annuli = build(dir.path(), "a.json", &["annuli", "-N", "6"]);
    let o = run(&["verify", "theorem", "--construction", &annuli, "--pin", "0"]);
    assert_eq!(code(&o), 0);

    let o = run(&["verify", "annular-bound", "--random", "100", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["items"].as_array().unwrap().len(), 2000);
}

#[test]
fn every_check_runs_with_defaults() {
    for (check, extra) in [
        ("sharpness", &["--pins", "0", "--pins", "1,0"][..]),
        ("translation", &["-N", "3", "--samples", "20000"]),
        ("submon", &[]),
        ("density-bound", &["-d", "3"]),
        ("mc-crosscheck", &["--cases", "10", "--samples", "20000"]),
    ] {
        let mut args = vec!["verify", check];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(
            code(&o),
            0,
            "{check}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(json(&o)["schema_version"], 1);
    }
}

#[test]
fn exit_code_matches_the_verdict() {
    // A tiny Monte Carlo budget cannot decide straddling radii.
    let o = run(&[
        "verify",
        "translation",
        "-N",
        "3",
        "--samples",
        "1",
        "--seed",
        "1",
    ]);
    let verdict = json(&o)["verdict"].as_str().unwrap().to_string();
    let expected = match verdict.as_str() {
        "pass" => 0,
        "fail" => 1,
        _ => 2,
    };
    assert_eq!(code(&o), expected);
    assert_eq!(verdict, "inconclusive");
}

#[test]
fn profiles_are_csv_with_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let boxes = build(dir.path(), "b.json", &["boxes", "-N", "5"]);
    let o = run(&["profile", &boxes]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("radius,measure_low,measure_high,ratio_low,ratio_high,mode,schema_version")
    );
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let ratio: f64 = cols[3].parse().unwrap();
        assert!(ratio >= 1.0 / 16.0, "{line}");
        assert_eq!(cols[6], "1");
    }

    let annuli = build(dir.path(), "a.json", &["annuli", "-N", "4"]);
    let pins = dir.path().join("pins.txt");
    std::fs::write(&pins, "# pins\n0,0\n1/2,3/4  # inside the first gap\n").unwrap();
    let o = run(&[
        "pinned",
        &annuli,
        "--pins-file",
        pins.to_str().unwrap(),
        "--schedule",
        "geom:1,2,5",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("pin,radius,measure,ratio,mode,schema_version\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 5);
}

#[test]
fn mc_reports_estimate_and_analytic_value() {
    let dir = tempfile::tempdir().unwrap();
    let annuli = build(dir.path(), "a.json", &["annuli", "-N", "3"]);
    let o = run(&[
        "mc",
        &annuli,
        "--radius",
        "3",
        "--samples",
        "200000",
        "--seed",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    // S_1 = {1 <= |y| <= 101/100}: area π((101/100)² − 1).
    let exact = std::f64::consts::PI * (1.0201 - 1.0);
    assert!((v["analytic"]["low"].as_f64().unwrap() - exact).abs() < 1e-12);
    let (lo, hi) = (
        v["estimate"]["ci_low"].as_f64().unwrap(),
        v["estimate"]["ci_high"].as_f64().unwrap(),
    );
    assert!(lo <= exact && exact <= hi, "[{lo}, {hi}] misses {exact}");
}

#[test]
fn outputs_are_deterministic_and_seed_falls_back_to_env() {
    let args = [
        "verify",
        "mc-crosscheck",
        "--cases",
        "5",
        "--samples",
        "5000",
    ];
    let with_env = |seed: &str| {
        bin()
            .args(args)
            .env("DENSITY_LAB_SEED", seed)
            .output()
            .unwrap()
    };
    let a = with_env("42");
    let b = with_env("42");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 42);
    let explicit = run(&[&args[..], &["--seed", "42"]].concat());
    assert_eq!(explicit.stdout, a.stdout);
    assert_ne!(with_env("43").stdout, a.stdout);

    let dir = tempfile::tempdir().unwrap();
    let boxes = build(dir.path(), "b.json", &["boxes", "-N", "4"]);
    assert_eq!(
        run(&["profile", &boxes]).stdout,
        run(&["profile", &boxes]).stdout
    );
}
