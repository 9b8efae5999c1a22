use std::path::Path;
use std::process::Command;

fn plap() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_plap"));
    cmd.env("PLAP_THREADS", "2");
    cmd
}

fn write_config(dir: &Path, n: usize) -> std::path::PathBuf {
    let h = 1.0 / (n - 1) as f64;
    let config = serde_json::json!({
        "space": { "generate": { "kind": "grid", "n": n, "h": h, "profile": { "name": "dipole", "amplitude": 1.0 } } },
        "problem": { "p": 2.0, "c": 1.0, "gamma": 1.5, "q": 2.0 },
        "solver": { "starts": 3 },
        "verify": { "poincare": { "starts": 4, "iterations": 50 }, "embedding": { "starts": 8, "iterations": 100 } },
        "output_dir": "out"
    });
    let path = dir.join("config.json");
    std::fs::write(&path, config.to_string()).unwrap();
    path
}

#[test]
fn run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 3);
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let status = plap()
            .args(["run", "--config"])
            .arg(&config)
            .args(["--seed", "4", "--relax-radii", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        for name in ["hypothesis.json", "minimizer.json", "degiorgi.csv", "dgclass.csv", "summary.json"] {
            assert!(out.join(name).exists(), "{name}");
        }
        outputs.push(std::fs::read(out.join("summary.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let summary: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(summary["seed"], 4);
    assert!(summary["failures"].as_array().unwrap().is_empty());
}

#[test]
fn generate_check_and_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("space.json");
    let status = plap()
        .args(["generate", "--kind", "path", "--n", "1", "--out"])
        .arg(&space)
        .status()
        .unwrap();
    assert!(status.success());
    let check = plap().arg("check-space").arg(&space).output().unwrap();
    assert!(check.status.success());
    let report: serde_json::Value = serde_json::from_slice(&check.stdout).unwrap();
    assert!(report["k_d"].as_f64().unwrap() >= 1.0);

    let paths = dir.path().join("paths.json");
    std::fs::write(&paths, r#"[["b0", "x1"]]"#).unwrap();
    let out = plap().arg("modulus").arg(&space).arg(&paths).args(["--p", "2"]).output().unwrap();
    assert!(out.status.success());
    let value: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((value - 2.0).abs() < 1e-8);
}

#[test]
fn verify_json_and_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 3);
    let out = dir.path().join("v");
    let status = plap()
        .args(["verify", "--config"])
        .arg(&config)
        .args(["--format", "json", "--relax-radii", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("verify.json").exists());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"space": {"file": "missing.json"}, "problem": {"p": 2, "c": 1, "gamma": 1.5, "q": 2}}"#).unwrap();
    let failed = plap().args(["solve", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(failed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("does not exist"));
}
