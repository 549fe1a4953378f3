//! End-to-end checks of the `polydiam` binary: exit codes, output files,
//! determinism, and agreement between sweep rows and single-cell rows.

use std::path::Path;
use std::process::{Command, Output};

fn polydiam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polydiam"))
        .args(args)
        .env_remove("POLYDIAM_MAX_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bounds_anchor_row_exits_zero() {
    let o = polydiam(&["bounds", "--q", "5", "--n", "5", "--d", "2", "--with-bfs"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("q,n,d,f,status,connected,diameter"));
    let row: Vec<&str> = lines.next().unwrap().split("\",").collect();
    assert!(row[0].starts_with("5,5,2,\""));
    let rest: Vec<&str> = row[1].split(',').collect();
    assert_eq!(&rest[..4], ["ok", "true", "6", "15"]);
    assert_eq!(rest[7], "NA", "bound_thm2 does not apply for d = 2");
    assert_eq!(rest[11], "none");
    assert!(lines.next().is_none());
}

#[test]
fn bounds_json_uses_null_for_inapplicable() {
    let o = polydiam(&["bounds", "--q", "11", "--n", "3", "--d", "1", "--with-bfs", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &v.as_array().unwrap()[0];
    assert!(row["bound_thm1"].is_null());
    assert_eq!(row["diameter"], 6);
    assert!((row["bound_thm2"].as_f64().unwrap() - 9.20).abs() < 0.01);
    assert!(row["runtime_ms"].is_null());
}

#[test]
fn sweep_writes_file_and_rows_match_single_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = polydiam(&[
        "sweep", "--q-list", "2,3,5", "--n-range", "2..5", "--d-range", "1..3", "--max-order", "1000",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // (q, n, d) with d < n, 2 <= n <= 5, d <= 3: 1 + 2 + 3 + 3 = 9 cells per q
    assert_eq!(lines.len(), 1 + 27);
    for line in &lines[1..] {
        let mut rec = csv::ReaderBuilder::new().has_headers(false).from_reader(line.as_bytes());
        let r = rec.records().next().unwrap().unwrap();
        if r.get(4) != Some("ok") {
            continue;
        }
        let single = polydiam(&[
            "bounds", "--q", &r[0], "--n", &r[1], "--d", &r[2], "--modulus", &r[3], "--with-bfs",
        ]);
        assert_eq!(single.status.code(), Some(0));
        let s = stdout(&single);
        assert_eq!(s.lines().nth(1).unwrap(), *line, "cell {line}");
    }
}

#[test]
fn repeated_sweeps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let p = dir.path().join(name);
        let o = polydiam(&[
            "sweep", "--q-list", "3,4,7", "--n-range", "2..4", "--d-range", "1..2", "--format", "json",
            "--jobs", jobs, "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "4");
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let rows = v.as_array().unwrap();
    let keys: Vec<Vec<&String>> = rows.iter().map(|r| r.as_object().unwrap().keys().collect()).collect();
    assert!(keys.windows(2).all(|w| w[0] == w[1]), "identical keys in every object");
}

#[test]
fn capped_cells_are_marked_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = polydiam(&[
        "sweep", "--q-list", "2", "--n-range", "3..12", "--d-range", "1..1", "--max-order", "100",
        "--skip-charsums", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let skipped = text.lines().filter(|l| l.contains("skipped:max_order")).count();
    assert_eq!(skipped, 6, "2^n - 1 > 100 for n = 7..12");
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped:max_order"));
}

#[test]
fn env_var_overrides_default_max_order() {
    let o = Command::new(env!("CARGO_BIN_EXE_polydiam"))
        .args(["diameter", "--q", "5", "--n", "3", "--d", "1"])
        .env("POLYDIAM_MAX_ORDER", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("max_order"));
}

fn assert_usage_error_without_file(args: &[&str], out: &Path) {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", out.to_str().unwrap()]);
    let o = polydiam(&full);
    assert_eq!(o.status.code(), Some(2), "{args:?}");
    assert!(!out.exists(), "{args:?} must not create an output file");
}

#[test]
fn usage_errors_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    for args in [
        &["sweep", "--q-list", "2", "--q-range", "2..5", "--n-range", "2..3", "--d-range", "1..1"][..],
        &["sweep", "--q-list", "2", "--n-range", "4..3", "--d-range", "1..1"],
        &["sweep", "--q-list", "2", "--q-list", "3", "--n-range", "2..3", "--d-range", "1..1"],
        &["sweep", "--q-list", "6", "--n-range", "2..3", "--d-range", "1..1"],
        &["sweep", "--q-list", "2", "--n-range", "2..3", "--d-range", "1..1", "--format", "xml"],
        &["bounds", "--q", "5", "--q", "7", "--n", "3", "--d", "1"],
        &["bounds", "--q", "5", "--n", "3", "--d", "3"],
        &["diameter", "--q", "2", "--n", "3", "--d", "1", "--modulus", "1,1,1,1"],
        &["charsums", "--q", "3", "--n", "3", "--d", "1", "--mode", "weil", "--exact"],
        &["bounds", "--q", "5", "--n", "3", "--d", "1", "--no-such-flag"],
    ] {
        assert_usage_error_without_file(args, &out);
    }
}

#[test]
fn diameter_oracle_and_stepping_agree() {
    let run = |stepping: &str| {
        let o = polydiam(&["diameter", "--q", "3", "--n", "4", "--d", "2", "--stepping", stepping, "--oracle"]);
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        (v["diameter"].clone(), v["oracle_diameter"].clone())
    };
    let (a, oa) = run("follow-edges");
    let (b, _) = run("products");
    assert_eq!(a, b);
    assert_eq!(a, oa);
}

#[test]
fn enumerate_and_charsums_commands() {
    let o = polydiam(&["enumerate", "--q", "2", "--d", "3"]);
    assert_eq!(stdout(&o), "index,poly\n0,\"1,1,0,1\"\n1,\"1,0,1,1\"\n");
    let o = polydiam(&["enumerate", "--q", "7", "--d", "4", "--kind", "prime-power", "--count-only"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with(",true\n"));
    for mode in ["weil", "moment", "spectrum"] {
        let o = polydiam(&["charsums", "--q", "5", "--n", "3", "--d", "1", "--mode", mode]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
    }
    let o = polydiam(&["charsums", "--q", "4", "--n", "3", "--mode", "characters"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["multiplicativity"]["exhaustive"], true);
    let o = polydiam(&["repcount", "--q", "5", "--n", "5", "--d", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["k"], 38);
    assert_eq!(v["all_positive"], true);
    assert_eq!(v["total_matches"], true);
}

#[test]
fn selftest_detects_seeded_fault() {
    let o = polydiam(&["selftest", "--criterion", "4", "--inject-fault", "shrink-improved-bound"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("criterion 4"), "{err}");
    let o = polydiam(&["selftest", "--criterion", "9", "--criterion", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("criterion 9") && s.contains("criterion 1") && s.contains("assertions per module"));
}
