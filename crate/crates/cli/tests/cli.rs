//! End-to-end tests of the binary: exit codes, output formats, worker
//! determinism, caching, and size refusals.  A claim that fails
//! mathematically would exit 1, but every claim in range verifies, so that
//! path has no cheap honest trigger here.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gramdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gramdet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn enum_lists_labels_one_per_line() {
    let out = gramdet(&["enum", "--kind", "mobius", "-n", "1"]);
    assert!(out.status.success());
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "0-1");
    assert_eq!(lines[2], "c0-1");

    let out = gramdet(&["enum", "--kind", "disc", "-n", "3"]);
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn gram_csv_has_header_and_labels() {
    let out = gramdet(&["gram", "--kind", "mobius", "-n", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("basis,"));
    assert!(lines[0].contains("c0-1"));
    assert!(lines[3].starts_with("c0-1,"));
}

#[test]
fn det_json_carries_kind_size_and_display() {
    let out = gramdet(&["det", "--kind", "mobius", "-n", "1", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["kind"], "mobius");
    assert_eq!(doc["n"], 1);
    assert_eq!(doc["size"], 3);
    // (d - z)((d + z)w - 2xy) expanded, leading term first.
    assert_eq!(doc["display"], "d^2*w - 2*d*x*y - z^2*w + 2*z*x*y");
}

#[test]
fn verify_text_and_exit_codes() {
    let out = gramdet(&["verify", "--claim", "typeb", "-n", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("typeB n=2: VERIFIED"));
}

#[test]
fn verify_json_uses_lowercase_status() {
    let out = gramdet(&["verify", "--claim", "gena", "-n", "2", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["claim"], "genA");
    assert_eq!(doc["n"], 2);
    assert_eq!(doc["status"], "verified");
    assert!(doc["timing_ms"].is_u64());
}

#[test]
fn worker_count_does_not_change_output() {
    let one = gramdet(&["gram", "--kind", "mobius", "-n", "2", "--workers", "1"]);
    let four = gramdet(&["gram", "--kind", "mobius", "-n", "2", "--workers", "4"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert!(!one.stdout.is_empty());
}

#[test]
fn cache_is_written_reused_and_healed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["det", "--kind", "disc", "-n", "3", "--cache-dir", cache];

    let first = gramdet(&args);
    assert!(first.status.success());
    let entry = dir
        .path()
        .join(format!("disc-3-v{}.json", env!("CARGO_PKG_VERSION")));
    assert!(entry.exists(), "cache entry written");

    // A second run reuses the entry and prints the same determinant.
    let second = gramdet(&args);
    assert_eq!(first.stdout, second.stdout);

    // A corrupt entry is rebuilt and replaced, not trusted.
    fs::write(&entry, "not json").unwrap();
    let healed = gramdet(&args);
    assert!(healed.status.success());
    assert_eq!(first.stdout, healed.stdout);
    let rewritten = fs::read_to_string(&entry).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&rewritten).is_ok());
}

#[test]
fn oversize_requests_are_refused_until_allowed() {
    let out = gramdet(&["det", "--kind", "mobius", "-n", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--allow-large"));

    let out = gramdet(&["enum", "--kind", "disc", "-n", "7"]);
    assert_eq!(out.status.code(), Some(2));

    let out = gramdet(&["enum", "--kind", "disc", "-n", "7", "--allow-large"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 429);
}

#[test]
fn output_flag_writes_the_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = gramdet(&[
        "verify",
        "--claim",
        "typea",
        "-n",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("typeA n=2: VERIFIED"));
}

#[test]
fn wenzl_suites_run_and_bounds_are_usage_errors() {
    let out = gramdet(&["wenzl", "--check", "dbasis", "-n", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("VERIFIED"));

    let out = gramdet(&["wenzl", "--check", "theta", "-n", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("strand-sums"));
}

#[test]
fn unknown_kind_is_a_usage_error() {
    let out = gramdet(&["enum", "--kind", "torus", "-n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_workers_is_rejected() {
    let out = gramdet(&["det", "--kind", "disc", "-n", "2", "--workers", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--workers"));
}

#[test]
fn csv_requested_for_a_report_is_an_error() {
    let out = gramdet(&["verify", "--claim", "p1", "-n", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

/// Guards the path invariant the cache key depends on.
#[test]
fn cache_ignores_an_entry_for_a_different_kind() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();

    // Seed the disc-2 slot with a mobius-1 matrix; the mismatch must be
    // detected and the real matrix rebuilt.
    let seed = gramdet(&["gram", "--kind", "mobius", "-n", "1", "--format", "json"]);
    let slot = Path::new(cache).join(format!("disc-2-v{}.json", env!("CARGO_PKG_VERSION")));
    fs::create_dir_all(slot.parent().unwrap()).unwrap();
    fs::write(&slot, stdout(&seed)).unwrap();

    let out = gramdet(&["det", "--kind", "disc", "-n", "2", "--cache-dir", cache]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "d^4 - d^2\n");
}
