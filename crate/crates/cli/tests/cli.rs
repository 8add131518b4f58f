//! End-to-end tests of the `qpin` binary: exit codes, byte-stable output and
//! the documented subcommand behaviour.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn qpin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpin")).args(args).output().expect("run qpin")
}

fn qpin_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qpin"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn qpin");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

const BD_POINT: &str = "0.9,0.6,0.55,0.45,0.4,0.1";

#[test]
fn analyze_borland_dennis_point() {
    let o = qpin(&["--format", "json-lines", "analyze", "--lambda", BD_POINT]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    let c: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(c["index"], 1);
    assert_eq!(c["q_state"], "finite");
    let q = c["q"].as_f64().unwrap();
    assert!((q - 2f64.log10()).abs() < 1e-12, "Q = −log10(0.05/0.1) = log10 2, got {q}");
    let s: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(s["record"], "summary");
    assert_eq!(s["argmax"], 1);
    assert_eq!(s["setting"], serde_json::json!([3, 6]));
}

#[test]
fn floats_print_with_17_significant_digits() {
    let o = qpin(&["--format", "csv", "analyze", "--lambda", BD_POINT]);
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    let d = row.split(',').nth(2).unwrap();
    let mantissa = d.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{d}");
}

#[test]
fn structured_output_is_byte_stable() {
    let batch = temp_file("a 1,1,1,0,0,0\nb 0.9,0.6,0.55,0.45,0.4,0.1\nc 0.8,0.7,0.6,0.4,0.3,0.2\n");
    let p = batch.path().to_str().unwrap();
    for format in ["json-lines", "csv"] {
        let runs: Vec<Vec<u8>> = (0..3).map(|_| qpin(&["--format", format, "scan", p]).stdout).collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]), "{format} output differs between runs");
        let runs: Vec<Vec<u8>> =
            (0..2).map(|_| qpin(&["--format", format, "analyze", "--kind", "batch", p]).stdout).collect();
        assert_eq!(runs[0], runs[1]);
    }
}

#[test]
fn exit_codes() {
    // Parse failure.
    assert_eq!(code(&qpin(&["analyze", "--lambda", "1,x,0"])), 1);
    // Validation failure: not ordered.
    assert_eq!(code(&qpin(&["analyze", "--lambda", "0.5,1,1,0,0,0.5"])), 1);
    // Not normalizable to an integer N.
    assert_eq!(code(&qpin(&["analyze", "--lambda", "0.9,0.9,0.9,0.9,0.4,0.1"])), 1);
    // Unknown setting without a budget.
    assert_eq!(code(&qpin(&["--setting", "3,7", "analyze", "--lambda", "1,1,1,0,0,0,0"])), 1);
    // Pauli-admissible but outside the GPC polytope.
    let o = qpin(&["analyze", "--lambda", "1,1,0.5,0.5,0,0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside the polytope"));
    // Bad flag.
    assert_ne!(code(&qpin(&["analyze", "--format", "xml", "--lambda", BD_POINT])), 0);
}

#[test]
fn stdin_input_and_setting_override() {
    let o = qpin_stdin(&["--setting", "3,6", "analyze", "-"], "1 1 1 0 0 0\n");
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("pinned constraints: 1"));
    // An explicit setting that contradicts the input is a validation error.
    assert_eq!(code(&qpin_stdin(&["--setting", "4,6", "analyze", "-"], "1 1 1 0 0 0\n")), 1);
}

#[test]
fn scan_reports_per_row_errors() {
    let batch = temp_file("# comment\ngood 0.9,0.6,0.55,0.45,0.4,0.1\nbad 0.9,0.6\noutside 1,1,0.5,0.5,0,0\n");
    let o = qpin(&["--format", "json-lines", "scan", batch.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "partial failures keep exit 0");
    let recs: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 3);
    assert_eq!(recs[0]["label"], "good");
    assert!(recs[0]["error"].is_null());
    assert!(recs[1]["error"].is_string());
    assert!(recs[2]["error"].as_str().unwrap().contains("outside"));

    let all_bad = temp_file("x 1,2\ny 0.3\n");
    assert_eq!(code(&qpin(&["scan", all_bad.path().to_str().unwrap()])), 1);
}

#[test]
fn scan_forty_orbitals_with_budget() {
    // Three nearly occupied orbitals and a flat tail of 37 weakly occupied ones.
    let mut v = vec![0.99999, 0.99998, 0.99997];
    let tail = (3.0 - v.iter().sum::<f64>()) / 37.0;
    v.extend(std::iter::repeat(tail).take(37));
    let line = v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let batch = temp_file(&format!("s40 {line}\n"));
    let p = batch.path().to_str().unwrap();

    let o = qpin(&["--setting", "3,40", "--budget", "1e-2", "--format", "json-lines", "scan", p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert!(rec["error"].is_null(), "{rec}");
    let t = &rec["truncation"];
    assert_eq!(t["target"][0], 3);
    assert!(t["error_bound"].as_f64().unwrap() <= 1e-2);

    // Without a budget there is no table to use.
    let o = qpin(&["--setting", "3,40", "--format", "json-lines", "scan", p]);
    assert_eq!(code(&o), 1);
}

#[test]
fn ci_state_input() {
    let ci = temp_file("{\"occupied\": [1,2,3], \"re\": 0.8}\n{\"occupied\": [1,2,4], \"re\": 0.0, \"im\": 0.6}\n");
    let p = ci.path().to_str().unwrap();
    let o = qpin(&["--setting", "3,6", "--format", "json-lines", "analyze", p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    // {1,2,3} and {1,2,4} differ by one orbital: ρ has a 3–4 coherence and
    // the state is a single determinant in rotated orbitals.
    assert_eq!(summary["ci"]["aligned"], false);
    let lambda: Vec<f64> = summary["lambda"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let expect = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
    for (a, b) in lambda.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12, "{lambda:?}");
    }
    // The setting cannot be inferred from CI records.
    assert_eq!(code(&qpin(&["analyze", p])), 1);
    // Unnormalized state.
    let bad = temp_file("{\"occupied\": [1,2,3], \"re\": 0.5}\n");
    assert_eq!(code(&qpin(&["--setting", "3,6", "analyze", bad.path().to_str().unwrap()])), 1);
}

#[test]
fn verify_borland_dennis() {
    let o = qpin(&["verify", "3,6"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("1/1 verified"));
    for k in 1..=3 {
        assert!(out.contains(&format!("class C({k},{k}): member")), "{out}");
    }
    assert!(out.contains("minimal pairs: (1,1)"));
    assert!(out.contains("c(1,1) = 1/2"));
}

#[test]
fn verify_sample_is_reproducible_and_dumps_lps() {
    let dump = tempfile::NamedTempFile::new().unwrap();
    let d = dump.path().to_str().unwrap();
    let a = qpin(&["--format", "json-lines", "--lp-dump", d, "verify", "3,10", "--sample", "4", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    let b = qpin(&["--format", "json-lines", "verify", "3,10", "--sample", "4", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 5);
    let text = std::fs::read_to_string(d).unwrap();
    assert!(text.contains("Subject To") && text.contains("End"), "LP dump is written");
}

#[test]
fn verify_flags_a_corrupted_catalog() {
    let export = qpin(&["--format", "json-lines", "catalog", "3,10"]);
    assert_eq!(code(&export), 0);
    let text = stdout(&export);
    // Row 8 has prefactor 3/4; change it.
    let corrupted: String = text
        .lines()
        .map(|l| {
            if l.starts_with(r#"{"index":8,"kind":"inequality""#) {
                format!("{}\n", l.replace(r#""c":["3/4"]"#, r#""c":["2/3"]"#))
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    assert_ne!(corrupted, text);
    let f = temp_file(&corrupted);
    let o = qpin(&["verify", "3,10", "--catalog", f.path().to_str().unwrap(), "--rows", "7,8,9"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("row   8 MISMATCH"));

    // The untouched export verifies.
    let f = temp_file(&text);
    let o = qpin(&["verify", "3,10", "--catalog", f.path().to_str().unwrap(), "--rows", "7,8,9"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn pin_structure_counts() {
    let count = |args: &[&str]| -> serde_json::Value {
        let mut full = vec!["--format", "json-lines", "pin-structure"];
        full.extend_from_slice(args);
        let o = qpin(&full);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap()
    };
    let s = count(&["--setting", "3,6", "--constraint", "1"]);
    assert_eq!(s["i_d"], 9);
    // λ1 = 1 and λ6 = 0: C(4,2) configurations.
    let s = count(&["--setting", "3,6", "--pair", "1,1"]);
    assert_eq!(s["i_s"], 6);
    // Active space {2..7}: C(6,2).
    let s = count(&["--setting", "3,10", "--pair", "1,3"]);
    assert_eq!(s["i_s"], 15);
    let s = count(&["--setting", "3,6", "--pair", "3,3"]);
    assert_eq!(s["i_s"], 1);
    let s = count(&["--setting", "3,6", "--constraint", "1", "--pair", "1,1"]);
    assert_eq!(s["inclusion"], false);
    // Table notation {1, 8} in (3,10) is the pair (1,3).
    let s = count(&["--setting", "3,10", "--cell", "{1,8}"]);
    assert_eq!(s["pair"], serde_json::json!([1, 3]));

    assert_eq!(code(&qpin(&["--setting", "3,6", "pin-structure", "--constraint", "2"])), 1);
    assert_eq!(code(&qpin(&["--setting", "3,6", "pin-structure"])), 1);
}

#[test]
fn catalog_export_round_trips_through_verify_input() {
    let o = qpin(&["--format", "json-lines", "catalog", "--setting", "3,10"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.contains("\"inequality\"")).count(), 93);
    assert!(out.contains(r#"{"index":3,"kind":"inequality","kappa":[3,-2,0,0,0,-1,-1,-1,-1,0,-2],"pairs":[],"c":["9/14"]}"#));
    assert_eq!(code(&qpin(&["catalog", "3,9"])), 1);
}

#[test]
fn truncate_subcommand() {
    let o = qpin(&["--format", "json-lines", "truncate", "--lambda", "1,1,1,1,0,0,0,0,0,0", "--delta-n", "1", "--delta-d", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(rec["target"], serde_json::json!([3, 6]));
    assert_eq!(rec["error_bound"].as_f64().unwrap(), 0.0);
    // Invalid plan.
    assert_eq!(code(&qpin(&["truncate", "--lambda", "1,1,1,0,0,0", "--delta-n", "3", "--delta-d", "3"])), 1);
    // Budget exceeded.
    let o = qpin(&["--budget", "1e-6", "truncate", "--lambda", "0.9,0.6,0.55,0.45,0.4,0.1", "--delta-n", "0", "--delta-d", "1"]);
    assert_eq!(code(&o), 1);
}
