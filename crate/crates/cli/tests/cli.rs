use std::fs;
use std::process::{Command, Output};

fn ezf_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ezf-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn paper_tables_emit_published_gains() {
    let out = ezf_sim(&["fronthaul", "--paper-tables"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for needle in [
        "74.33", "52.26", "24.04", "7.62", "-14.66", // table 1
        "61.83", "36.83", "52.88", "22.12", // table 2
        "# table1", "# table2",
    ] {
        assert!(text.contains(needle), "missing {needle:?} in:\n{text}");
    }
}

#[test]
fn json_and_csv_agree() {
    let csv = stdout(&ezf_sim(&["fronthaul", "--paper-tables"]));
    let json = stdout(&ezf_sim(&["fronthaul", "--paper-tables", "--format", "json"]));
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    for table in ["table1", "table2"] {
        for row in parsed[table].as_array().unwrap() {
            let line = format!(
                "{},{},{},{}",
                row["scheme"].as_str().unwrap(),
                row["k"],
                row["p"],
                row["m"]
            );
            assert!(csv.contains(&line), "row {line} missing from CSV");
            let zeta = row["zeta"].as_u64().unwrap();
            assert!(csv.contains(&format!(",{zeta},")), "ζ = {zeta} missing from CSV");
        }
    }
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> String {
    let path = dir.path().join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_RUN: &str = r#"
[system]
n_t = 16
p = 4
m = 4
k = 4
n_r = 2
l = 1
tau = 8

[run]
seed = 9
trials = 10
power_db = [6.0, 12.0]
schemes = ["CEN", "DEZF"]
"#;

#[test]
fn ber_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, SMALL_RUN);
    let a = ezf_sim(&["ber", "--config", &cfg]);
    let b = ezf_sim(&["ber", "--config", &cfg]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same seed must give identical CSV bytes");
    let text = stdout(&a);
    assert!(text.starts_with("scheme,power_db,ber,bits,ci95"));
    assert!(text.contains("CEN,6,"));
    assert!(text.contains("DEZF,12,"));
}

#[test]
fn ber_metadata_lands_next_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, SMALL_RUN);
    let out_path = dir.path().join("curves.csv");
    let out = ezf_sim(&["ber", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let meta_path = dir.path().join("curves.meta.json");
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&meta_path).unwrap()).unwrap();
    let expect = ezf_core::channel::derive_seed(9, 0, 0);
    assert_eq!(meta[0]["meta"]["seed"].as_u64(), Some(expect));
    assert_eq!(meta[0]["meta"]["rng"], "chacha8");
    assert_eq!(meta[0]["meta"]["cfg"]["n_t"], 16);
}

#[test]
fn bad_partition_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        r#"
[system]
n_t = 16
p = 4
m = 3
k = 4
n_r = 2
l = 1
tau = 8
"#,
    );
    let out = ezf_sim(&["fronthaul", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("P·M = N_T"));
}

#[test]
fn zero_trials_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, SMALL_RUN);
    let out = ezf_sim(&["ber", "--config", &cfg, "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn preset_scale_shrinks_clusters() {
    let out = ezf_sim(&[
        "ber",
        "--preset",
        "fig3",
        "--scale",
        "0.25",
        "--trials",
        "2",
        "--scheme",
        "cen",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("# P=4 M=16 K=4"));
    assert!(text.contains("# P=8 M=8 K=4"));
}

#[test]
fn fractional_scale_is_rejected() {
    let out = ezf_sim(&["ber", "--preset", "fig3", "--scale", "0.3", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_passes_and_fault_injection_fails() {
    let out = ezf_sim(&["validate"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("PASS").count(), 4);
    assert!(text.contains("max integer diff 0"));

    let out = ezf_sim(&["validate", "--inject-fault", "skip-q-normalization"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("FAIL"));
}
