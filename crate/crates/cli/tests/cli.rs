use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn aperion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aperion"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn check_ids(v: &Value) -> Vec<String> {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap().to_string())
        .collect()
}

fn copy_data(dir: &Path) {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    for f in ["recurrence.json", "corpus.json"] {
        fs::copy(root.join(f), dir.join(f)).unwrap();
    }
}

#[test]
fn table_runs_every_identity() {
    let out = aperion(&["table", "--json", "--no-cache"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let ids = check_ids(&v);
    assert_eq!(ids.len(), 15);
    assert!(ids.contains(&"gh-catalan".to_string()));
}

#[test]
fn table_filter_and_printed_offsets() {
    let out = aperion(&["table", "--only", "gh-chi8", "--json", "--no-cache"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(check_ids(&json(&out)), ["gh-chi8"]);

    let out = aperion(&["table", "gamma-half", "--printed", "--json", "--no-cache"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(check_ids(&v), ["gh-catalan-printed", "gh-chi8-printed"]);
    assert!(v["checks"][0]["note"].as_str().unwrap().contains("+9/10"));

    let out = aperion(&["table", "--only", "nope", "--no-cache"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_is_deterministic() {
    let args = [
        "mahler",
        "smyth81",
        "--bits",
        "64",
        "--nodes",
        "256",
        "--json",
        "--no-cache",
    ];
    let a = aperion(&args);
    let b = aperion(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn schema_is_shared_across_commands() {
    let reports = [
        aperion(&["lvalue", "-3", "--json", "--no-cache"]),
        aperion(&["trigamma", "2/7", "--json", "--no-cache"]),
        aperion(&["apery", "--nmax", "2", "--json", "--no-cache"]),
    ];
    let check_keys = [
        "description",
        "id",
        "lhs",
        "note",
        "pass",
        "precision_bits",
        "residual",
        "rhs",
        "tolerance",
    ];
    for out in &reports {
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stdout)
        );
        let v = json(out);
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["checks", "command", "config", "info", "pass"]);
        for c in v["checks"].as_array().unwrap() {
            let keys: Vec<_> = c.as_object().unwrap().keys().cloned().collect();
            assert_eq!(keys, check_keys);
            assert!(c["lhs"].is_string() && c["residual"].is_string());
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["mahler", "nosuch", "--no-cache"],
        vec!["table", "--bits", "32"],
        vec!["apery", "--nodes", "100"],
        vec!["apery", "--nmax", "1"],
        vec!["lvalue", "5"],
        vec!["lvalue", "-7", "--bits", "16"],
        vec!["trigamma", "0"],
        vec!["trigamma", "abc"],
        vec!["frobnicate"],
    ] {
        assert_eq!(aperion(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn low_precision_main_theorem_passes() {
    let out = aperion(&[
        "verify-main-theorem",
        "--bits",
        "64",
        "--nodes",
        "64",
        "--json",
        "--no-cache",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(
        check_ids(&v),
        [
            "apery-vs-L",
            "apery-vs-mahler",
            "L-vs-mahler",
            "prefactor",
            "negative-control"
        ]
    );
}

#[test]
fn corrupted_recurrence_is_a_failed_record() {
    let dir = tempfile::tempdir().unwrap();
    copy_data(dir.path());
    let path = dir.path().join("recurrence.json");
    let text = fs::read_to_string(&path).unwrap();
    fs::write(
        &path,
        text.replacen("\"constant\": \"32\"", "\"constant\": \"33\"", 1),
    )
    .unwrap();
    let d = dir.path().to_str().unwrap();
    for cmd in ["verify-main-theorem", "apery", "telescope"] {
        let out = aperion(&[
            cmd,
            "--data-dir",
            d,
            "--bits",
            "64",
            "--nodes",
            "64",
            "--json",
            "--no-cache",
        ]);
        assert_eq!(out.status.code(), Some(1), "{cmd}");
        let v = json(&out);
        assert_eq!(v["pass"], false);
        assert!(v["checks"][0]["note"].is_string());
    }
}

#[test]
fn data_dir_copy_behaves_like_builtin() {
    let dir = tempfile::tempdir().unwrap();
    copy_data(dir.path());
    let d = dir.path().to_str().unwrap();
    let base = [
        "mahler",
        "bv02-1",
        "--bits",
        "64",
        "--nodes",
        "256",
        "--json",
        "--no-cache",
    ];
    let builtin = aperion(&base);
    let mut with_dir = base.to_vec();
    with_dir.extend(["--data-dir", d]);
    let external = aperion(&with_dir);
    assert_eq!(external.status.code(), Some(0));
    assert_eq!(json(&builtin)["checks"], json(&external)["checks"]);
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    let args = ["lvalue", "-8", "--json", "--cache-dir", c];
    let first = aperion(&args);
    assert_eq!(first.status.code(), Some(0));
    assert!(fs::read_dir(&cache).unwrap().count() > 0);
    let second = aperion(&args);
    assert_eq!(first.stdout, second.stdout);

    let fresh = aperion(&["lvalue", "-8", "--json", "--no-cache"]);
    let (a, b) = (json(&first), json(&fresh));
    assert_eq!(a["checks"], b["checks"]);
    assert_eq!(a["info"], b["info"]);
    let verified = aperion(&["lvalue", "-8", "--json", "--cache-dir", c, "--verify-cache"]);
    assert_eq!(verified.status.code(), Some(0));

    for entry in fs::read_dir(&cache).unwrap() {
        fs::write(entry.unwrap().path(), "garbage").unwrap();
    }
    let recovered = aperion(&args);
    assert_eq!(recovered.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&recovered.stderr).contains("warning"));
    assert_eq!(first.stdout, recovered.stdout);
}

#[test]
fn telescope_and_apery_small_runs() {
    let out = aperion(&[
        "telescope",
        "--upto",
        "1",
        "--budget",
        "2000",
        "--bits",
        "64",
        "--json",
        "--no-cache",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        check_ids(&json(&out)),
        ["recurrence-residuals", "telescope-n0", "telescope-n1"]
    );

    let out = aperion(&["apery", "--nmax", "2", "--json", "--no-cache"]);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["info"]["apery_error_estimate"].is_string());
}

#[test]
fn text_output_ends_with_summary() {
    let out = aperion(&["trigamma", "1/2", "--no-cache"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("overall: PASS"));
}
