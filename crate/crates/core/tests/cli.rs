use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BALL: &str = r#"{"kind":"ball","params":{"center":[0,0],"radius":1}}"#;

fn qhlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("QHLAB_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, want, "{name} differs from its golden file");
}

#[test]
fn dist_radial_example() {
    let o = qhlab(&["dist", "--domain", BALL, "--points", "0,0;0.5,0", "--metric", "k", "--tol", "1e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["tool"], "qhlab");
    assert_eq!(v["config"]["seed"], 0);
    assert_eq!(v["result"]["method"], "closed_form");
    let k = v["result"]["value"].as_f64().unwrap();
    assert!((k - std::f64::consts::LN_2).abs() < 1e-15);
    golden("dist_radial.json", &stdout(&o));
}

#[test]
fn dist_other_metrics() {
    for (metric, want) in [("j", 0.5f64.ln_1p() * 2.0), ("rho", 2.0 * (4.0f64 / 3.0).asinh()), ("q", 1.0 / 1.25)] {
        let o = qhlab(&["dist", "--domain", BALL, "--points", "-0.5,0;0.5,0", "--metric", metric, "--format", "csv"]);
        assert_eq!(o.status.code(), Some(0), "{metric}");
        let s = stdout(&o);
        let row = s.lines().last().unwrap();
        let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        if metric == "j" {
            // j(-x, x) = log(1 + 1/0.5)
            assert!((v - 3f64.ln()).abs() < 1e-15);
        } else {
            assert!((v - want).abs() < 1e-15, "{metric}: {v} vs {want}");
        }
    }
}

#[test]
fn numeric_dist_and_geodesic() {
    let o = qhlab(&["dist", "--domain", BALL, "--points", "-0.3,0;0.3,0", "--method", "numeric"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let k = v["result"]["value"].as_f64().unwrap();
    assert!((k - 0.713_349_887_877_464_8).abs() < 1e-3);
    assert_eq!(v["result"]["estimate"]["converged"], true);

    let o = qhlab(&["geodesic", "--domain", BALL, "--points", "-0.3,0;0.3,0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("# qhlab "));
    assert!(s.lines().any(|l| l == "x1,x2,cumulative_k"));
}

#[test]
fn verify_small_suite_is_deterministic() {
    let args = ["verify", "--suite", "all", "--samples", "2000", "--seed", "42"];
    let a = qhlab(&args);
    let b = qhlab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["config"]["seed"], 42);
    let reports = v["result"]["reports"].as_array().unwrap();
    assert!(reports.len() >= 14);
    assert!(reports.iter().all(|r| r["violation_count"] == 0));
}

#[test]
fn verify_single_bound_csv() {
    let o = qhlab(&["verify", "--suite", "bernoulli", "--samples", "500", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("bernoulli,500,")));
}

#[test]
fn sequence_half_strip_column_is_log5() {
    let o = qhlab(&["sequence", "--example", "half_strip", "--n-max", "20", "--tol", "1e-2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let rows: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 20);
    let log5 = qhlab::report::fmt_f64(5f64.ln());
    for r in rows {
        assert_eq!(r.split(',').nth(1).unwrap(), log5);
    }
}

#[test]
fn constants_golden() {
    let o = qhlab(&["constants", "--alpha", "0.2,0.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    golden("constants.csv", &stdout(&o));
}

#[test]
fn profile_with_prediction() {
    let o = qhlab(&[
        "profile", "--domain", BALL, "--samples", "200", "--bins", "8", "--tol", "1e-2",
        "--phi", r#"{"kind":"log_one_plus","coef":2}"#,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["comparison"]["passed"], true);
    assert_eq!(v["result"]["profile"]["lower_estimate"], true);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = qhlab(&["constants", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let direct = qhlab(&["constants"]);
    let written: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(written["config"]["out"], out.to_str().unwrap());
    assert_eq!(written["result"], json(&direct)["result"]);
}

#[test]
fn domain_file_flag() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("ball.json");
    std::fs::write(&f, BALL).unwrap();
    let a = qhlab(&["dist", "--domain-file", f.to_str().unwrap(), "--points", "0,0;0.5,0"]);
    assert_eq!(a.status.code(), Some(0));
    let both = qhlab(&["dist", "--domain", BALL, "--domain-file", f.to_str().unwrap(), "--points", "0,0;0.5,0"]);
    assert_eq!(both.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&both.stderr).starts_with("qhlab: "));
}

#[test]
fn errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let unwritable = dir.path().join("missing").join("out.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["constants", "--out", unwritable.to_str().unwrap()],
        vec!["dist", "--domain", BALL, "--points", "0,0;2,0"],
        vec!["dist", "--domain", "{not json", "--points", "0,0;0.5,0"],
        vec!["dist", "--domain", BALL, "--points", "0,0"],
        vec!["dist", "--domain", BALL, "--points", "0,0;0.5,0", "--tol", "0"],
        vec!["verify", "--suite", "no_such_bound"],
        vec!["verify", "--samples", "0"],
        vec!["sequence", "--example", "half_strip", "--n-max", "1"],
        vec!["constants", "--theta", "1.5"],
        vec!["profile", "--domain", r#"{"kind":"half_space","params":{"dim":2}}"#],
        vec!["dist", "--points", "0,0;0.5,0"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = qhlab(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}
