use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn file(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .display()
        .to_string()
}

fn monoplane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monoplane"))
        .args(args)
        .env_remove("MONOPLANE_DATA")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn missing_dataset_exits_2_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.csv");
    let missing = missing.display().to_string();
    let out_dir = dir.path().join("out").display().to_string();
    let out = monoplane(&["train", "--dataset", &missing, "--out", &out_dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(&missing), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(monoplane(&["train"]).status.code(), Some(2));
    let out = monoplane(&[
        "verify",
        "--dataset",
        &file("data/xor.csv"),
        "--format",
        "xml",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dataset_path_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let out = Command::new(env!("CARGO_BIN_EXE_monoplane"))
        .args(["grow", "--part", "all", "--out", &out_dir])
        .env("MONOPLANE_DATA", file("data/xor.csv"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("xor.csv"));
}

#[test]
fn growth_stall_exits_1_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let out = monoplane(&[
        "grow",
        "--dataset",
        &file("data/xor.csv"),
        "--part",
        "all",
        "--max-hidden",
        "1",
        "--format",
        "text",
        "--out",
        &out_dir,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("growth stalled"), "{}", stderr(&out));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("H = 1"));
    assert!(dir.path().join("growth.csv").exists());
    assert!(!dir.path().join("network.txt").exists());
}

#[test]
fn shuffled_dataset_without_split_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(file("data/sonar.all-data")).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.reverse();
    let shuffled = dir.path().join("shuffled.csv");
    fs::write(&shuffled, lines.join("\n")).unwrap();
    let out = monoplane(&["verify", "--dataset", &shuffled.display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout(&out);
    assert!(report.contains("missing"), "{report}");
    assert!(report.contains("cosines"));
    assert!(stderr(&out).contains("closest"));
}

#[test]
fn verify_reports_every_mode_and_cosine_conventions() {
    let out = monoplane(&[
        "verify",
        "--dataset",
        &file("data/sonar.all-data"),
        "--split-file",
        &file("data/sonar.surrogate.split"),
        "--raw-eq8",
    ]);
    let report = stdout(&out);
    for mode in [
        "scale=std stats=learning-set",
        "scale=std stats=all-patterns",
        "scale=variance stats=learning-set",
        "scale=variance stats=all-patterns",
    ] {
        assert!(report.contains(mode), "{mode}");
    }
    assert!(report.contains("0.51615"));
    assert!(report.contains("0.34238"));
    assert!(report.contains("[raw-eq8:"));
}

fn train_xor(dir: &Path) -> PathBuf {
    let out = monoplane(&[
        "train",
        "--dataset",
        &file("data/xor.csv"),
        "--part",
        "train",
        "--part",
        "test",
        "--out",
        &dir.display().to_string(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    dir.to_path_buf()
}

#[test]
fn several_parts_write_one_directory_each() {
    let dir = tempfile::tempdir().unwrap();
    let root = train_xor(dir.path());
    for part in ["train", "test"] {
        for name in ["weights.txt", "trace.csv", "report.json", "manifest.json"] {
            assert!(root.join(part).join(name).exists(), "{part}/{name}");
        }
        let manifest: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(root.join(part).join("manifest.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest["part"], part);
        assert_eq!(manifest["split"], "halves");
        assert!(manifest["config"]["t_initial"].is_number());
    }
}

#[test]
fn report_renders_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let root = train_xor(dir.path());
    let w = root.join("train/weights.txt").display().to_string();
    let w2 = root.join("test/weights.txt").display().to_string();

    let table = stdout(&monoplane(&["report", &w]));
    assert_eq!(table.lines().count(), 1);
    assert_eq!(table.trim_end().split(',').count(), 3);

    let cos = stdout(&monoplane(&["report", &w, &w]));
    assert_eq!(cos, "cosine (true) = 1.00000\n");
    let cos2 = monoplane(&["report", &w, &w2, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&cos2.stdout).unwrap();
    assert!(v["cosine"].as_f64().unwrap().abs() <= 1.0);

    let trace = stdout(&monoplane(&[
        "report",
        &root.join("train/trace.csv").display().to_string(),
    ]));
    assert!(trace.starts_with("T,E,errors\n"));
    assert!(trace.lines().count() > 2);

    let report = monoplane(&[
        "report",
        &root.join("train/report.json").display().to_string(),
    ]);
    assert!(report.status.success());
    assert!(stdout(&report).contains("\"generalization\""));
}

#[test]
fn report_accepts_published_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.txt");
    let values: Vec<String> = (0..61)
        .map(|i| format!("{:.4}", f64::from(i) / 100.0 - 0.3))
        .collect();
    fs::write(&path, format!("W = {{ {} }}", values.join(", "))).unwrap();
    let out = monoplane(&["report", &path.display().to_string()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 8);
    assert!(text
        .lines()
        .take(7)
        .all(|l| l.split(',').filter(|s| !s.trim().is_empty()).count() == 8));
}

#[test]
fn malformed_artifact_names_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.txt");
    fs::write(&path, "0.5\nnot-a-number\n").unwrap();
    let p = path.display().to_string();
    let out = monoplane(&["report", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(&p));
}
