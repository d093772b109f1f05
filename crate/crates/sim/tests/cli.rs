use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_urllc-sim"))
}

const SMALL: &str = "num_antennas = 4\ngroup_sizes = [2, 3]\nd_bits = 12\nseed = 5\n";

#[test]
fn run_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args([
            "run",
            "--scheme",
            "proposed",
            "--scheme",
            "b5",
            "--trials",
            "3",
            "--workers",
            "1",
        ])
        .arg("--config")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["schemes"]["proposed"]["probability"].is_number());
    let trials = fs::read_to_string(out.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 2 * 3);
    assert!(trials.starts_with(
        "trial,scheme,success_count,urllc,solver_failed,digest,leaders_g0,leaders_g1\n"
    ));
    assert!(String::from_utf8_lossy(&status.stdout).contains("proposed"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let mut outputs = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "1"), ("c", "2")] {
        let out = dir.path().join(name);
        let st = bin()
            .args([
                "sweep", "--scheme", "proposed", "--scheme", "b4", "--trials", "3",
            ])
            .args(["--d-bits", "10,12", "--workers", workers])
            .arg("--config")
            .arg(&cfg)
            .arg("--out-dir")
            .arg(&out)
            .status()
            .unwrap();
        assert!(st.success());
        outputs.push((
            fs::read(out.join("plot.csv")).unwrap(),
            fs::read(out.join("trials_d12.csv")).unwrap(),
            fs::read(out.join("summary_d12.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn bad_invocations_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = bin()
        .args(["run", "--trials", "0"])
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--trials"));

    let o = bin()
        .args(["sweep", "--trials", "2"])
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--d-bits"));

    let o = bin()
        .args(["run", "--config", "/nonexistent/cfg.toml"])
        .output()
        .unwrap();
    assert!(!o.status.success());

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "num_antennas = 0\n").unwrap();
    let o = bin()
        .args(["run"])
        .arg("--config")
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("num_antennas"));

    let o = bin()
        .args(["run", "--scheme", "b9"])
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert!(!o.status.success());
}

#[test]
fn dump_realization_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let st = bin()
            .args(["dump-realization", "--trial", "4"])
            .arg("--out-dir")
            .arg(&out)
            .status()
            .unwrap();
        assert!(st.success());
        texts.push(fs::read_to_string(out.join("realization_4.json")).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let v: serde_json::Value = serde_json::from_str(&texts[0]).unwrap();
    assert_eq!(v["downlink"].as_array().unwrap().len(), 48);
}

#[test]
fn validate_passes_and_strict_tolerance_reports() {
    let o = bin().arg("validate").output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert!(text.contains("23.10 dB"));
    assert!(text.contains("42.38 dB"));
    let o = bin().args(["validate", "--tol", "1e-14"]).output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(!o.status.success());
    assert!(text.contains("residuals"), "{text}");
}
