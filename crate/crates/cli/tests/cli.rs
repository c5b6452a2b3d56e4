use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/cameraman_64.pgm")
}

fn evoenhance(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evoenhance"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: &str = r#"{"ga": {"pop_size": 10, "iterations": 4, "elite_count": 2},
  "de": {"pop_size": 10, "iterations": 4}, "soma": {"pop_size": 6, "migration_loops": 4}}"#;

#[test]
fn enhance_writes_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("settings.json");
    std::fs::write(&cfg, SMALL).unwrap();
    let input = fixture();
    let mut images = Vec::new();
    for (tag, extra) in [("a", None), ("b", Some("--parallel"))] {
        let out = dir.path().join(format!("{tag}.pgm"));
        let trace = dir.path().join(format!("{tag}.csv"));
        let report = dir.path().join(format!("{tag}.json"));
        let mut args = vec![
            "enhance",
            "--input",
            s(&input),
            "--algo",
            "soma",
            "--seed",
            "4",
            "--config",
            s(&cfg),
            "--out",
            s(&out),
            "--trace",
            s(&trace),
            "--report",
            s(&report),
        ];
        args.extend(extra);
        let o = evoenhance(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).starts_with("SOMA: fitness"));
        assert_eq!(
            std::fs::read_to_string(&trace).unwrap().lines().count(),
            1 + 5
        );
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(json["seed"], 4);
        images.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(images[0], images[1]);
}

#[test]
fn metrics_prints_json() {
    let input = fixture();
    let o = evoenhance(&["metrics", "--input", s(&input)]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(json["fitness"]["fitness"].as_f64().unwrap() > 0.0);
    assert!(json["dv_bv"]["dv"].as_f64().is_some());
}

#[test]
fn compare_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("exp.json");
    let body = format!(
        r#"{{"input_images": [{:?}], "algorithms": ["HE", "DE", "SOMA"], "runs_per_algorithm": 2,
            "base_seed": 1, "output_dir": {:?}, "de": {{"pop_size": 6, "iterations": 2}},
            "soma": {{"pop_size": 4, "migration_loops": 2}}}}"#,
        s(&fixture()),
        s(&out)
    );
    std::fs::write(&cfg, body).unwrap();
    let o = evoenhance(&["compare", "--config", s(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(
        report["images"][0]["p_values"]["DE-SOMA"]
            .as_f64()
            .is_some()
            || report["images"][0]["p_values"]["SOMA-DE"]
                .as_f64()
                .is_some()
    );
}

#[test]
fn errors_are_one_line_and_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.pgm");
    let out = dir.path().join("x.pgm");
    let input = fixture();
    for args in [
        vec!["metrics", "--input", s(&missing)],
        vec![
            "enhance",
            "--input",
            s(&input),
            "--algo",
            "ga",
            "--config",
            s(&missing),
            "--out",
            s(&out),
        ],
    ] {
        let o = evoenhance(&args);
        assert!(!o.status.success());
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
        assert!(err.contains("missing.pgm"), "{err}");
    }
    let o = evoenhance(&[
        "enhance",
        "--input",
        s(&input),
        "--algo",
        "pso",
        "--out",
        s(&out),
    ]);
    assert!(!o.status.success());
}
