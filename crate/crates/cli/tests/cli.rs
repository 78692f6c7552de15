//! End-to-end checks of the command-line surface: output shapes, file
//! output, records ingestion, and error exit codes.

use parkmatch_core::{CSV_HEADER, SUMMARY_CSV_HEADER};
use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parkmatch"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

/// Two drivers, two spots, two time slots; d2-p1 collides on the schedule,
/// every other pair is feasible.
const RECORDS: &str = r#"{
  "drivers": [
    {"id": "d1", "location": [0.0, 0.0], "max_price": 10.0, "min_spot_reputation": 0.2, "demand": [1, 0], "reputation": 0.9},
    {"id": "d2", "location": [3.0, 4.0], "max_price": 8.0, "min_spot_reputation": 0.0, "demand": [0, 1], "reputation": 0.8}
  ],
  "spots": [
    {"id": "p1", "location": [0.0, 1.0], "price": 2.0, "min_driver_reputation": 0.1, "availability": [0, 1], "reputation": 0.7},
    {"id": "p2", "location": [3.0, 0.0], "price": 5.0, "min_driver_reputation": 0.5, "availability": [0, 0], "reputation": 0.95}
  ]
}"#;

#[test]
fn generate_emits_a_reloadable_scenario_and_out_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    let args = [
        "generate", "--drivers", "6", "--spots", "5", "--eta", "0.5", "--seed", "3",
    ];
    let stdout = run_ok(&args);

    let value: serde_json::Value = serde_json::from_str(&stdout).expect("scenario parses");
    assert_eq!(value["config"]["num_drivers"], 6);
    assert_eq!(value["config"]["num_spots"], 5);
    assert_eq!(value["drivers"].as_array().unwrap().len(), 6);
    assert_eq!(value["spots"].as_array().unwrap().len(), 5);

    let mut with_out: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap();
    with_out.extend(["--out", path_str]);
    assert_eq!(run_ok(&with_out), "");
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn match_json_rows_cover_matchers_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    let path_str = path.to_str().unwrap();
    run_ok(&[
        "generate", "--drivers", "8", "--spots", "8", "--eta", "0.4", "--seed", "1", "--out",
        path_str,
    ]);

    let stdout = run_ok(&[
        "match", path_str, "--matchers", "mm,km", "--seed", "7", "--seeds", "2",
    ]);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout).expect("metric rows parse");
    assert_eq!(rows.len(), 4);
    let matchers: Vec<&str> = rows.iter().map(|r| r["matcher"].as_str().unwrap()).collect();
    assert_eq!(matchers, ["mm", "km", "mm", "km"], "seed-major row order");
    let seeds: Vec<u64> = rows.iter().map(|r| r["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, [7, 7, 8, 8]);
    for row in &rows {
        assert_eq!(row["drivers"], 8);
        assert_eq!(row["spots"], 8);
        assert!(row["wall_time_s"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn match_csv_uses_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    let path_str = path.to_str().unwrap();
    run_ok(&[
        "generate", "--drivers", "8", "--spots", "8", "--eta", "0.4", "--seed", "1", "--out",
        path_str,
    ]);

    let stdout = run_ok(&["match", path_str, "--format", "csv"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 4, "four default matchers, one seed");
}

#[test]
fn records_file_ingests_and_matches() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.json");
    let path_str = path.to_str().unwrap();
    fs::write(&path, RECORDS).unwrap();

    let stdout = run_ok(&["match", path_str, "--matchers", "mm", "--format", "csv"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[0], "mm");
    assert_eq!(fields[1], "2", "two drivers ingested");
    assert_eq!(fields[2], "2", "two spots ingested");
    assert_eq!(fields[3], "1", "ingested records span every pair");
    assert_eq!(fields[6], "2", "both drivers matched (d2-p1 collides, rest feasible)");
    assert_eq!(fields[7], "0", "stable outcome");
}

#[test]
fn sweep_row_count_is_exact() {
    let stdout = run_ok(&[
        "sweep-size", "--sizes", "10,20", "--eta", "0.4", "--seeds", "3", "--matchers",
        "mm,greedy",
    ]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 2 * 3 * 2, "sizes x seeds x matchers rows");
}

#[test]
fn time_emits_one_summary_row_per_size_and_matcher() {
    let stdout = run_ok(&[
        "time", "--sizes", "10,20", "--eta", "0.5", "--seeds", "3", "--matchers", "mm,km",
    ]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], SUMMARY_CSV_HEADER);
    assert_eq!(lines.len(), 1 + 2 * 2);
}

#[test]
fn verify_reports_every_check_passing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    let path_str = path.to_str().unwrap();
    run_ok(&[
        "generate", "--drivers", "5", "--spots", "5", "--eta", "0.6", "--seed", "9", "--out",
        path_str,
    ]);

    let stdout = run_ok(&["verify", path_str]);
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("report parses");
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert_eq!(report["oracle_checked"], true, "5x5 fits the exhaustive oracle");
}

#[test]
fn config_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["match", "/nonexistent/input.json"],
        &["generate", "--drivers", "5", "--spots", "5", "--eta", "1.5"],
        &["generate", "--drivers", "5", "--spots", "5", "--format", "csv"],
        &["sweep-size", "--matchers", "mm,bogus"],
        &["sweep-size", "--no-such-flag"],
        &["generate", "--spots", "5"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?} should exit 2, stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    let path_str = path.to_str().unwrap();
    fs::write(&path, "{ not json").unwrap();
    let out = run(&["match", path_str]);
    assert_eq!(out.status.code(), Some(2));

    // Valid JSON that is neither a scenario nor a records file.
    fs::write(&path, r#"{"other": 1}"#).unwrap();
    let out = run(&["verify", path_str]);
    assert_eq!(out.status.code(), Some(2));
}
