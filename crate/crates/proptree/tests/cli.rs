//! End-to-end checks of the `pbt` binary: campaign runs with JSON-lines
//! output, bucket aggregation, shrink reports, and exit codes.

use std::path::PathBuf;
use std::process::Command;

fn pbt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pbt"))
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("pbt-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn run_emits_json_lines_and_exits_zero() {
    let out = temp_path("run.jsonl");
    let status = pbt()
        .args([
            "run",
            "--workload",
            "bst",
            "--mutant",
            "M3",
            "--property",
            "insert-valid",
            "--runner",
            "fuzz",
            "--pool",
            "heap",
            "--energy",
            "100",
            "--fuel",
            "20000",
            "--time-limit",
            "10",
            "--seed",
            "42",
            "--trials",
            "3",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "campaign completion must exit zero");

    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["task"], "bst/insert-dup-on-equal/insert-valid");
        assert_eq!(v["runner"], "fuzz");
        assert!(v["foundbug"].is_boolean());
        assert!(v["time_ms"].is_number());
    }

    // Aggregate those records into a bucket chart.
    let chart = pbt()
        .args(["buckets", "--rule", "any"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(chart.status.success());
    let csv = String::from_utf8(chart.stdout).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("task,bucket,mean_time,solve_rate"));
    let row = rows.next().unwrap();
    assert!(row.starts_with("bst/insert-dup-on-equal/insert-valid,"));
    std::fs::remove_file(&out).ok();
}

#[test]
fn bugs_found_still_exit_zero_and_no_bug_too() {
    // A pristine task finds nothing; exit code must still be zero.
    let status = pbt()
        .args([
            "run",
            "--workload",
            "stlc",
            "--property",
            "progress",
            "--fuel",
            "200",
            "--seed",
            "1",
        ])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn invalid_configuration_exits_nonzero() {
    let out = pbt()
        .args([
            "run",
            "--workload",
            "bst",
            "--property",
            "insert-valid",
            "--runner",
            "generate",
            "--pool",
            "heap",
            "--fuel",
            "10",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("--pool"), "useful message, got: {stderr}");

    let unknown = pbt()
        .args([
            "run",
            "--workload",
            "bst",
            "--mutant",
            "M99",
            "--property",
            "insert-valid",
        ])
        .output()
        .unwrap();
    assert!(!unknown.status.success());
}

#[test]
fn shrink_report_emits_statistics() {
    let out = pbt()
        .args([
            "shrink-report",
            "--workload",
            "bst",
            "--mutant",
            "insert-flip-compare",
            "--property",
            "insert-valid",
            "--trials",
            "5",
            "--seed",
            "3",
            "--fuel",
            "20000",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(stats["trials"].as_array().unwrap().len() >= 3);
    assert!(stats["mean_ratio"].as_f64().unwrap() >= 1.0);
    assert_eq!(stats["larger"], 0);
}

#[test]
fn repeated_campaigns_are_byte_identical_modulo_time() {
    let run_once = || {
        let out = pbt()
            .args([
                "run",
                "--workload",
                "rbt",
                "--mutant",
                "M2",
                "--property",
                "insert-valid",
                "--runner",
                "generate",
                "--fuel",
                "30000",
                "--seed",
                "7",
                "--trials",
                "4",
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let normalize = |text: &str| -> Vec<String> {
        text.lines()
            .map(|line| {
                let mut v: serde_json::Value = serde_json::from_str(line).unwrap();
                v["time_ms"] = 0.into();
                v["shrink_ms"] = 0.into();
                v.to_string()
            })
            .collect()
    };
    assert_eq!(normalize(&run_once()), normalize(&run_once()));
}
