use std::process::{Command, Output};

use kloosterman::{batch_kloosterman, report::format_sig, PrimeModulus};
use serde_json::Value;

fn kloosterman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kloosterman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn compute_prints_value_and_vector() {
    let out = kloosterman(&["compute", "-p", "5", "-a", "1", "-b", "1", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0.3819660113\n[2,0,1,1,0]\n");
}

#[test]
fn compute_degenerate_needs_flag() {
    let out = kloosterman(&["compute", "-p", "7", "-a", "3", "-b", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kloosterman(&["compute", "-p", "7", "-a", "3", "-b", "0", "--degenerate"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "-1\n");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["compute", "-p", "4", "-a", "1", "-b", "1"][..],
        &["compute", "-p", "2", "-a", "1", "-b", "1"],
        &["verify", "--from", "11", "--to", "5"],
        &["verify", "--from", "3", "--to", "5", "--checks", "nope"],
        &["kr", "-r", "0", "--from", "3", "--to", "5"],
        &["frobnicate"],
    ] {
        let out = kloosterman(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn unmet_sentinel_exits_1() {
    let out = kloosterman(&[
        "verify",
        "--from",
        "3",
        "--to",
        "3",
        "--checks",
        "bounds",
        "--sentinel",
        "0.99",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).ends_with("FAILED\n"));
}

#[test]
fn verify_json_report() {
    let out = kloosterman(&[
        "verify", "--from", "3", "--to", "13", "--format", "json", "--jobs", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    // p − 1 values of b for each of the five primes, five checks per pair
    let pairs = 2 + 4 + 6 + 10 + 12;
    assert_eq!(report["totals"]["primes"], 5);
    assert_eq!(report["totals"]["run"], 5 * pairs);
    assert_eq!(report["totals"]["passed"], 5 * pairs);
    assert_eq!(report["mode"], "exact");
    assert_eq!(report["parameter_policy"], "fixed_a_all_b");
    assert!(report["counterexamples"].as_array().unwrap().is_empty());
    assert!(report.get("records").is_none());
    let weil = report["worst"]["weil"]["value"].as_f64().unwrap();
    assert!(weil > 0.0 && weil <= 1.0);
}

#[test]
fn verify_csv_has_one_row_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = kloosterman(&[
        "verify",
        "--from",
        "5",
        "--to",
        "7",
        "--checks",
        "sq,bounds",
        "--mode",
        "float",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,a,b,check,exact_pass,float_residual,abs_value,weil_ratio,kloosterman_ratio,corollary_ratio"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2 * (4 + 6));
    assert!(rows.iter().any(|r| r.starts_with("5,1,1,sq_identity,,")));
    assert!(rows.iter().any(|r| r.starts_with("7,1,6,bounds,,,")));
}

#[test]
fn batch_csv_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("batch.csv");
    let out = kloosterman(&["batch", "-p", "31", "--fft", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let expected = batch_kloosterman(&PrimeModulus::new(31).unwrap());
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 30);
    for (t, row) in rows.iter().enumerate() {
        let (idx, value) = row.split_once(',').unwrap();
        assert_eq!(idx.parse::<usize>().unwrap(), t + 1);
        let value: f64 = value.parse().unwrap();
        assert!(
            (value - expected[t]).abs() < 1e-8,
            "t={} {value} vs {}",
            t + 1,
            format_sig(expected[t])
        );
    }
}

#[test]
fn kr_csv_columns() {
    let out = kloosterman(&["kr", "-r", "1", "--from", "3", "--to", "29", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "p,pairs,a,b,max_abs,max_ratio,envelope");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for row in rows {
        let ratio: f64 = row[5].parse().unwrap();
        let envelope: f64 = row[6].parse().unwrap();
        assert!(ratio <= envelope * (1.0 + 1e-9));
    }
}

#[test]
fn run_without_spawning() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = kloosterman::cli::run(
        ["kloosterman", "compute", "-p", "13", "-a", "2", "-b", "3"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    let via_product = kloosterman::kloosterman_float(&PrimeModulus::new(13).unwrap(), 1, 6).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().trim(), format_sig(via_product));
}
