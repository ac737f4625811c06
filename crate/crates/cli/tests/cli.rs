use std::path::Path;
use std::process::{Command, Output};

fn nmutp(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmutp")).arg("--out").arg(out).args(args).env("RUST_LOG", "warn").output().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nmutp(dir.path(), &["table1", "--rows", "12", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(nmutp(dir.path(), &["sweep", "--dims", "1:3", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(nmutp(dir.path(), &["bogus"]).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    let o = nmutp(dir.path(), &["--config", missing.to_str().unwrap(), "table1", "--rows", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let o = nmutp(Path::new("/proc/forbidden"), &["scan", "--n", "3", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let o = nmutp(
        dir.path(),
        &["validate", "--n-qubit", "200", "--n-qudit", "20", "--d-max", "3", "--tolerance", "1e-300"],
    );
    assert_eq!(o.status.code(), Some(1));
    let o = nmutp(dir.path(), &["find-example", "--target", "0.1,1.9,0.1,1.9", "--tol", "0.001", "--max-draws", "50"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generated_seed_is_printed() {
    let dir = tempfile::tempdir().unwrap();
    let o = nmutp(dir.path(), &["table1", "--rows", "11", "--n", "10"]);
    assert!(o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    let seed: u64 = err.lines().find_map(|l| l.strip_prefix("seed: ")).unwrap().parse().unwrap();
    let csv = std::fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(&format!(",{seed}")));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"n_quartets": 40, "seed": 5, "case": {"slots": ["pure", "pure", "pure", "max-mixed"], "dim": 2}}"#,
    )
    .unwrap();
    let o = nmutp(dir.path(), &["--config", cfg.to_str().unwrap(), "--no-runtime", "scan", "--n", "25"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.json")).unwrap()).unwrap();
    assert_eq!(doc["seed"], 5);
    assert_eq!(doc["config"]["n_quartets"], 25);
    assert_eq!(doc["config"]["case"]["slots"][3], "max-mixed");
    assert!(doc.get("runtime_seconds").is_none());
    let lines = std::fs::read_to_string(dir.path().join("scan.ndjson")).unwrap();
    assert_eq!(lines.lines().count(), 25);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n_quartet": 40}"#).unwrap();
    assert_eq!(nmutp(dir.path(), &["--config", bad.to_str().unwrap(), "scan"]).status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nmutp"))
        .args(["sample", "--kind", "pure", "--dim", "3", "--count", "4", "--seed", "2"])
        .env("NMUTP_OUT_DIR", dir.path())
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("samples.ndjson")).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!((v["purity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
    assert_eq!(text.lines().count(), 4);
}
