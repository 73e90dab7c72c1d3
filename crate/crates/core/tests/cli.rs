use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rough-aco"));
    c.env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn rough-aco")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    let obj = v.as_object_mut().unwrap();
    obj.remove("train_time_s");
    obj.remove("test_time_s");
    v
}

#[test]
fn generate_writes_requested_rows_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = run(&[
            "generate",
            "--n",
            "2000",
            "--seed",
            "7",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 2001);
    assert!(text.starts_with("h2,ch4,c2h4,c2h6,c2h2,co,co2,n2,o2,label\n"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn generate_rejects_tiny_tables() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.csv");
    let out = run(&["generate", "--n", "5", "--out", p.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!p.exists());
}

#[test]
fn efb_run_writes_complete_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("efb");
    let out = run(&[
        "run",
        "--discretizer",
        "efb",
        "--seed",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let report = read_json(&out_dir.join("report.json"));
    for key in [
        "discretizer",
        "confusion",
        "accuracy",
        "auc",
        "num_rules",
        "num_certain_rules",
        "train_time_s",
        "test_time_s",
        "seed",
        "cuts_file",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    let c = &report["confusion"];
    let total: u64 = ["tp", "tn", "fp", "fn"]
        .iter()
        .map(|k| c[k].as_u64().unwrap())
        .sum();
    assert_eq!(total, 600);
    assert_eq!(report["discretizer"], "efb");

    let cuts = read_json(&out_dir.join("cuts.json"));
    assert_eq!(cuts.as_object().unwrap().len(), 9);
    let rules = read_json(&out_dir.join("rules.json"));
    assert_eq!(
        rules["rules"].as_array().unwrap().len() as u64,
        report["num_rules"].as_u64().unwrap()
    );
    let roc = fs::read_to_string(out_dir.join("roc.csv")).unwrap();
    assert!(roc.starts_with("threshold,fpr,tpr\n"));
    assert!(!out_dir.join("convergence.csv").exists());
}

#[test]
fn run_reads_csv_input() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    assert!(run(&[
        "generate",
        "--n",
        "300",
        "--seed",
        "4",
        "--out",
        data.to_str().unwrap()
    ])
    .status
    .success());
    let out_dir = dir.path().join("o");
    let out = run(&[
        "run",
        "--discretizer",
        "efb",
        "--data",
        data.to_str().unwrap(),
        "--clip-outliers",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = read_json(&out_dir.join("report.json"));
    let c = &report["confusion"];
    let total: u64 = ["tp", "tn", "fp", "fn"]
        .iter()
        .map(|k| c[k].as_u64().unwrap())
        .sum();
    assert_eq!(total, 90);
}

#[test]
fn aco_run_is_reproducible_and_logs_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "4")] {
        let out_dir = dir.path().join(name);
        let out = run(&[
            "run",
            "--discretizer",
            "aco",
            "--seed",
            "3",
            "--workers",
            workers,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        reports.push(without_timing(read_json(&out_dir.join("report.json"))));

        let conv = fs::read_to_string(out_dir.join("convergence.csv")).unwrap();
        let rows: Vec<&str> = conv.lines().skip(1).collect();
        assert_eq!(rows.len(), 100);
        let best: Vec<f64> = rows
            .iter()
            .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(best.windows(2).all(|w| w[1] <= w[0]));
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(
        fs::read(dir.path().join("a/cuts.json")).unwrap(),
        fs::read(dir.path().join("b/cuts.json")).unwrap()
    );
}

#[test]
fn compare_shares_split_and_reports_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("cmp");
    let out = run(&[
        "compare",
        "--seed",
        "1",
        "--iters",
        "20",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("Equal Frequency Bin") && stdout.contains("Ant Colony Optimized"));

    let doc = read_json(&out_dir.join("compare.json"));
    let total = |r: &Value| -> u64 {
        ["tp", "tn", "fp", "fn"]
            .iter()
            .map(|k| r["confusion"][k].as_u64().unwrap())
            .sum()
    };
    assert_eq!(total(&doc["efb"]), total(&doc["aco"]));
    for key in ["accuracy", "auc", "train_time_s"] {
        let d = doc["aco"][key].as_f64().unwrap() - doc["efb"][key].as_f64().unwrap();
        assert_eq!(doc["delta"][key].as_f64().unwrap(), d, "{key}");
    }
    let rules =
        doc["aco"]["num_rules"].as_i64().unwrap() - doc["efb"]["num_rules"].as_i64().unwrap();
    assert_eq!(doc["delta"]["num_rules"].as_i64().unwrap(), rules);
    for arm in ["efb", "aco"] {
        assert!(out_dir.join(arm).join("report.json").exists());
    }
    assert!(out_dir.join("compare.txt").exists());
}

#[test]
fn failures_exit_nonzero_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let out = run(&[
        "run",
        "--discretizer",
        "efb",
        "--data",
        "/no/such/file.csv",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert!(!out_dir.join("report.json").exists());

    let out = run(&[
        "run",
        "--discretizer",
        "aco",
        "--iters",
        "0",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(!out_dir.join("report.json").exists());
}
