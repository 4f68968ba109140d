//! End-to-end checks of the command-line interface: argument handling, exit
//! codes, and the stability of the emitted formats.

use std::process::Command;

fn teneig(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_teneig"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn bench_csv_has_exact_header_and_rows() {
    let out = teneig(&[
        "bench", "--problem", "p1", "--trials", "5", "--seed", "3", "--format", "csv",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "problem,method,iter,cpu_s,res,suc_pct");
    assert_eq!(lines.len(), 5);
    for (line, method) in lines[1..].iter().zip(["pm", "plm", "imp1", "imp2"]) {
        assert!(line.starts_with(&format!("p1,{method},")));
        assert!(line.ends_with(",100"));
    }
}

#[test]
fn bench_json_round_trips_and_table_prints_note() {
    let out = teneig(&[
        "bench", "--problem", "p4", "--trials", "3", "--format", "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["problem"], "p4");
    assert_eq!(value["trials"], 3);

    let out = teneig(&["bench", "--problem", "p4", "--trials", "3"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("note: p4 entries as printed are reducible"));
}

#[test]
fn config_errors_exit_with_code_2() {
    let missing = teneig(&["bench", "--trials", "2"]);
    assert_eq!(missing.status.code(), Some(2));

    let fixed_size = teneig(&["bench", "--problem", "p1", "--m", "5", "--trials", "2"]);
    assert_eq!(fixed_size.status.code(), Some(2));

    let too_big = teneig(&[
        "bench", "--problem", "p5", "--m", "9", "--n", "100", "--delta", "1", "--trials", "1",
    ]);
    assert_eq!(too_big.status.code(), Some(2));

    let unknown = teneig(&["bench", "--problem", "p9", "--trials", "1"]);
    assert_eq!(unknown.status.code(), Some(2));

    let bad_tol = teneig(&["bench", "--problem", "p1", "--tol", "0", "--trials", "1"]);
    assert_eq!(bad_tol.status.code(), Some(2));
}

#[test]
fn export_then_solve_tensor_file() {
    let dir = std::env::temp_dir().join("teneig-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p2.txt");

    let out = teneig(&["export", "--problem", "p2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("3 3\n"));
    assert_eq!(text.lines().count(), 28);

    let out = teneig(&[
        "bench",
        "--tensor-file",
        path.to_str().unwrap(),
        "--trials",
        "3",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("p2,plm,"));

    let missing = teneig(&["bench", "--tensor-file", "/nonexistent/t.txt", "--trials", "1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn traces_and_diagnose_outputs() {
    let dir = std::env::temp_dir().join("teneig-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("traces.csv");

    let out = teneig(&[
        "bench",
        "--problem",
        "p1",
        "--trials",
        "2",
        "--traces",
        path.to_str().unwrap(),
        "--diagnose",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"spectral_radius_t\""));
    assert!(stdout.contains("\"w_positive_definite\": true"));

    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "method,iteration,residual");
    assert!(csv.contains("\npm,0,"));
    assert!(csv.contains("\nimp2,0,"));
}
