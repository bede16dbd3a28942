//! End-to-end command-line checks: deterministic reports under a fixed seed
//! (including across thread counts), the classification verdict chain, exit
//! codes, and report merging.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_trimod")
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    Command::new(bin())
        .args(args)
        .envs(envs.iter().map(|&(k, v)| (k, v)))
        .output()
        .expect("spawn trimod")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("trimod-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_geometric_config(path: &Path) {
    std::fs::write(path, br#"{"family":"geometric","s":2.0}"#).unwrap();
}

#[test]
fn criterion_11_determinism_and_verdict_chain() {
    let cfg = tmp("geo.json");
    write_geometric_config(&cfg);

    // Classification: byte-identical across runs, expected verdict chain.
    let out_a = tmp("classify_a.json");
    let out_b = tmp("classify_b.json");
    let run_a = run(
        &[
            "classify",
            "--config",
            cfg.to_str().unwrap(),
            "--window",
            "3",
            "--out",
            out_a.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(run_a.status.code(), Some(0));
    let run_b = run(
        &[
            "classify",
            "--config",
            cfg.to_str().unwrap(),
            "--window",
            "3",
            "--out",
            out_b.to_str().unwrap(),
        ],
        &[("TRIMOD_THREADS", "2")],
    );
    assert_eq!(run_b.status.code(), Some(0));
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert_eq!(
        bytes_a, bytes_b,
        "classification reports differ across runs"
    );

    let text = String::from_utf8(run_a.stdout).unwrap();
    for token in [
        "right quasi-invariance holds",
        "left quasi-invariance holds",
        "E(b) convergent",
        "commutation theorem applies",
        "type III_1 factor expected",
    ] {
        assert!(text.contains(token), "summary missing '{token}':\n{text}");
    }

    // Verification: byte-identical across runs and thread counts.
    let ver_a = tmp("verify_a.json");
    let ver_b = tmp("verify_b.json");
    let args = |out: &Path| {
        vec![
            "verify".to_string(),
            "--window".into(),
            "2".into(),
            "--seed".into(),
            "42".into(),
            "--points".into(),
            "60".into(),
            "--mc-samples".into(),
            "100000".into(),
            "--checks".into(),
            "d_inverse,triple_commutator,commutation,urm,generator_fd,moments,mc_unitarity".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let ra = Command::new(bin()).args(args(&ver_a)).output().unwrap();
    assert_eq!(
        ra.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&ra.stderr)
    );
    let rb = Command::new(bin())
        .args(args(&ver_b))
        .env("TRIMOD_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(rb.status.code(), Some(0));
    let va = std::fs::read(&ver_a).unwrap();
    let vb = std::fs::read(&ver_b).unwrap();
    assert_eq!(va, vb, "verification reports differ across runs/threads");

    println!(
        "criterion 11: PASS (classify and verify reports byte-identical across runs \
         and thread counts; verdict chain emitted)"
    );
}

#[test]
fn classify_rejects_geometric_s_of_one_at_parse() {
    let cfg = tmp("bad_geo.json");
    std::fs::write(&cfg, br#"{"family":"geometric","s":1.0}"#).unwrap();
    let out = run(&["classify", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("s > 1"), "diagnostic: {err}");
}

#[test]
fn classify_single_entry_table_is_decided() {
    let cfg = tmp("table.json");
    std::fs::write(&cfg, br#"{"family":"table","entries":[[0,1,2.0]]}"#).unwrap();
    let out = run(
        &[
            "classify",
            "--config",
            cfg.to_str().unwrap(),
            "--window",
            "1",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn classify_power_table_is_undecided() {
    let cfg = tmp("power_table.json");
    std::fs::write(&cfg, br#"{"family":"power","a":{"0":1.5,"1":2.0}}"#).unwrap();
    let out = run(
        &[
            "classify",
            "--config",
            cfg.to_str().unwrap(),
            "--window",
            "1",
        ],
        &[],
    );
    // The base table cannot certify the series below its range.
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_negative_control_exits_three() {
    let out = run(
        &[
            "verify",
            "--window",
            "1",
            "--points",
            "20",
            "--checks",
            "generator_fd",
            "--negative-control",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("generator_fd_misprint"), "{text}");
    assert!(text.contains("FAIL"), "{text}");
}

#[test]
fn report_merges_and_diagnoses() {
    let cfg = tmp("geo2.json");
    write_geometric_config(&cfg);
    let cls = tmp("merge_classify.json");
    assert_eq!(
        run(
            &[
                "classify",
                "--config",
                cfg.to_str().unwrap(),
                "--window",
                "2",
                "--out",
                cls.to_str().unwrap()
            ],
            &[],
        )
        .status
        .code(),
        Some(0)
    );
    let ver = tmp("merge_verify.json");
    assert_eq!(
        run(
            &[
                "verify",
                "--window",
                "1",
                "--points",
                "15",
                "--checks",
                "d_inverse,commutation",
                "--out",
                ver.to_str().unwrap()
            ],
            &[],
        )
        .status
        .code(),
        Some(0)
    );

    let merged = run(
        &["report", cls.to_str().unwrap(), ver.to_str().unwrap()],
        &[],
    );
    assert_eq!(merged.status.code(), Some(0));
    let table = String::from_utf8(merged.stdout).unwrap();
    assert!(table.contains("right_quasi_invariance"));
    assert!(table.contains("d_inverse"));

    // Empty input set: empty table, exit 0.
    let empty = run(&["report"], &[]);
    assert_eq!(empty.status.code(), Some(0));

    // Malformed JSON: exit 1 with a file/position diagnostic.
    let broken = tmp("broken.json");
    std::fs::write(&broken, b"{ not json").unwrap();
    let bad = run(&["report", broken.to_str().unwrap()], &[]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.contains("broken.json:1:"), "diagnostic: {err}");
}

#[test]
fn bad_thread_env_is_a_usage_error() {
    let out = run(&["verify", "--window", "1"], &[("TRIMOD_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(1));
}
