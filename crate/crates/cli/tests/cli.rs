use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use leverage_cli::{analyze, ingest_csv, DiagnosticsReport, RunConfig};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn levdiag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levdiag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn golden_args(input: &Path) -> Vec<&str> {
    vec!["analyze", "--input", path_str(input), "--response", "y", "--format", "json"]
}

#[test]
fn golden_json() {
    let input = fixture("golden_input.csv");
    let out = levdiag(&golden_args(&input));
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let golden = fixture("golden.json");
    if std::env::var_os("LEVDIAG_BLESS").is_some() {
        std::fs::write(&golden, &out.stdout).unwrap();
    }
    let want = std::fs::read(&golden).expect("golden.json exists; set LEVDIAG_BLESS=1 to create it");
    assert!(out.stdout == want, "output differs from golden.json");
}

#[test]
fn json_is_byte_identical_across_runs() {
    let input = fixture("golden_input.csv");
    let first = levdiag(&golden_args(&input));
    for _ in 0..3 {
        assert_eq!(levdiag(&golden_args(&input)).stdout, first.stdout);
    }
}

#[test]
fn json_round_trips_bit_exactly() {
    let input = fixture("golden_input.csv");
    let out = levdiag(&golden_args(&input));
    let parsed: DiagnosticsReport = serde_json::from_slice(&out.stdout).unwrap();
    let mut config = RunConfig::new(&input);
    config.response_column = Some("y".into());
    let direct = analyze(&ingest_csv(&input, Some("y")).unwrap(), &config).unwrap();
    assert_eq!(parsed, direct);
    // PartialEq would accept 0.0 == -0.0; compare the bits too
    for (a, b) in parsed.rows.iter().zip(&direct.rows) {
        assert_eq!(a.leverage.to_bits(), b.leverage.to_bits());
        assert_eq!(a.mahalanobis_sq.to_bits(), b.mahalanobis_sq.to_bits());
        for (x, y) in a.decomposition_one.iter().flatten().zip(b.decomposition_one.iter().flatten()) {
            assert_eq!(x.term.to_bits(), y.term.to_bits());
            assert_eq!(x.aux_residual.to_bits(), y.aux_residual.to_bits());
        }
    }
}

#[test]
fn json_top_level_keys() {
    let out = levdiag(&golden_args(&fixture("golden_input.csv")));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["meta", "regressors", "rows"]);
}

#[test]
fn exit_codes() {
    let line = fixture("line.csv");
    let line = path_str(&line);
    assert_eq!(levdiag(&["analyze", "--input", line]).status.code(), Some(0));
    assert_eq!(levdiag(&["analyze", "--input", line, "--threshold", "0.55"]).status.code(), Some(2));
    assert_eq!(levdiag(&["analyze", "--input", "/no/such/file.csv"]).status.code(), Some(1));
    assert_eq!(levdiag(&["analyze", "--input", line, "--threshold", "-1"]).status.code(), Some(1));
    assert_eq!(levdiag(&["analyze", "--input", line, "--top-k", "0"]).status.code(), Some(1));
    assert_eq!(levdiag(&["analyze", "--input", line, "--decompose", "III"]).status.code(), Some(1));
    assert_eq!(levdiag(&["analyze"]).status.code(), Some(1));
    assert_eq!(levdiag(&["--help"]).status.code(), Some(0));
    assert_eq!(levdiag(&["verify", "--input", line]).status.code(), Some(0));
}

#[test]
fn parse_errors_carry_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n1,2\n3,NaN\n5,6\n").unwrap();
    let out = levdiag(&["analyze", "--input", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3, column 2"), "{}", stderr(&out));
}

#[test]
fn duplicated_column_error_names_both() {
    let out = levdiag(&["analyze", "--input", path_str(&fixture("duplicated.csv"))]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("collinear") && msg.contains("a, c"), "{msg}");
}

#[test]
fn text_report_on_a_clean_dataset() {
    let out = levdiag(&["analyze", "--input", path_str(&fixture("line.csv"))]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("no rows exceed threshold"));
    assert!(text.contains("regressors\nname"));
    // rows 1 and 5 tie at h = 0.6; the earlier row comes first
    let order: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("row "))
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(order, ["1", "5", "2", "4", "3"]);
}

#[test]
fn top_k_limits_text_rows() {
    let input = fixture("golden_input.csv");
    let out = levdiag(&["analyze", "--input", path_str(&input), "--response", "y", "--top-k", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("row ")).count(), 3);
    assert!(text.contains("2 of 10 rows exceed threshold"));
}

#[test]
fn decompose_flag_selects_sections() {
    let input = fixture("golden_input.csv");
    let out = levdiag(&["analyze", "--input", path_str(&input), "--decompose", "II", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &v["rows"][0];
    assert!(row["decomposition_one"].is_null());
    assert_eq!(row["decomposition_two"].as_array().unwrap().len(), 4);
    assert_eq!(v["meta"]["decompositions"], serde_json::json!(["II"]));
}

#[test]
fn verify_flag_reports_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let input = fixture("golden_input.csv");
    let out = levdiag(&[
        "analyze", "--input", path_str(&input), "--response", "y", "--verify", "--format", "json",
        "--output", path_str(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let report: DiagnosticsReport = serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    let checks = report.meta.verification.unwrap();
    assert_eq!(checks.len(), 13);
    assert!(checks.iter().all(|c| c.passed));
    let sum = checks.iter().find(|c| c.name == "decomposition_one_sum").unwrap();
    let max_d2 = report.rows.iter().map(|r| r.mahalanobis_sq).fold(0.0, f64::max);
    assert!(sum.max_deviation <= 1e-9 * max_d2);
}

#[test]
fn synth_is_deterministic_and_feeds_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("scenario.txt");
    std::fs::write(&spec, "seed = 7\nn = 40\np = 3\nplant = marginal_outlier 0 1 8\n").unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let run = levdiag(&["synth", "--seedfile", path_str(&spec), "--output", path_str(out)]);
        assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let run = levdiag(&["analyze", "--input", path_str(&a), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["rows"][0]["flagged"], true);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn synth_rejects_bad_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("scenario.txt");
    std::fs::write(&spec, "seed = 7\nn = 40\np = 3\nplant = marginal_outlier 0 9 8\n").unwrap();
    let run = levdiag(&["synth", "--seedfile", path_str(&spec)]);
    assert_eq!(run.status.code(), Some(1));
    std::fs::write(&spec, "seed = 7\nn = forty\n").unwrap();
    let run = levdiag(&["synth", "--seedfile", path_str(&spec)]);
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).contains("line 2"), "{}", stderr(&run));
}
