use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approxvit::adder::{error_metrics, MetricsMode};
use approxvit::AdderModel;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_approxvit"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap())
        .collect()
}

#[test]
fn adder_metrics_file_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    ok(&["--out", s(&out), "adder-metrics", "--builtin", "lower-or:12:6"]);
    let written = std::fs::read_to_string(out.join("loa12_k6.json")).unwrap();
    let model = AdderModel::from_spec("lower-or:12:6").unwrap();
    let mut want = serde_json::to_string_pretty(&error_metrics(&model, MetricsMode::Exhaustive).unwrap()).unwrap();
    want.push('\n');
    assert_eq!(written, want);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn netlist_directory_gives_one_report_per_file() {
    let dir = tempfile::tempdir().unwrap();
    let nets = dir.path().join("nets");
    std::fs::create_dir(&nets).unwrap();
    for f in ["rca4.net", "gl_loa12_k4.net", "gl_trunc12_k3.net"] {
        std::fs::copy(data(&format!("netlists/{f}")), nets.join(f)).unwrap();
    }
    let out = dir.path().join("m");
    ok(&["--out", s(&out), "adder-metrics", "--netlist-dir", s(&nets)]);
    let reports: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    assert_eq!(reports.len(), 3, "{reports:?}");
}

fn sweep(dir: &Path, name: &str, extra: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let corpus = data("corpus.txt");
    let mut args = vec!["--seed", "11", "--out", s(&out)];
    args.extend_from_slice(extra);
    args.extend(["ber-sweep", "--corpus", s(&corpus), "--runs", "1"]);
    ok(&args);
    std::fs::read(&out).unwrap()
}

#[test]
fn default_sweep_covers_every_modulation_and_snr() {
    let dir = tempfile::tempdir().unwrap();
    sweep(dir.path(), "ber.csv", &[]);
    let rows = csv_rows(&dir.path().join("ber.csv"));
    assert_eq!(rows.len(), 3 * 26);
    for m in ["BASK", "BPSK", "QPSK"] {
        assert_eq!(rows.iter().filter(|r| &r[1] == m).count(), 26);
    }
    assert!(rows.iter().all(|r| &r[5] == "1"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ber.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["pipeline"]["runs_per_snr"], 1);
    assert_eq!(manifest["seed"], 11);
}

#[test]
fn sweep_bytes_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = sweep(dir.path(), "j1.csv", &["--jobs", "1"]);
    for j in ["4", "16"] {
        assert_eq!(sweep(dir.path(), &format!("j{j}.csv"), &["--jobs", j]), one);
    }
}

#[test]
fn tagger_reports_accuracy_per_adder() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pos.csv");
    let (model, sent, gold) = (data("pos/model.json"), data("pos/sentences.txt"), data("pos/gold.txt"));
    ok(&[
        "--out",
        s(&out),
        "pos-tag",
        "--model",
        s(&model),
        "--sentences",
        s(&sent),
        "--gold",
        s(&gold),
        "--adder",
        "exact:16,lower-or:16:0,truncated:16:14",
    ]);
    let rows = csv_rows(&out);
    let acc = |name: &str| rows.iter().find(|r| &r[0] == name).unwrap()[1].parse::<f64>().unwrap();
    assert_eq!(acc("float_oracle"), 100.0);
    assert_eq!(acc("exact16"), 100.0);
    assert_eq!(acc("loa16_k0"), acc("exact16"));
    assert!(acc("trunc16_k14") < 100.0);

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "\n").unwrap();
    let bad = run(&[
        "pos-tag",
        "--model",
        s(&model),
        "--sentences",
        s(&empty),
        "--gold",
        s(&gold),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn dse_on_comm_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let (acc, costs) = (data("comm_accuracy.csv"), data("comm_costs.csv"));
    let res = ok(&[
        "--out",
        s(&out),
        "dse",
        "--accuracy",
        s(&acc),
        "--costs",
        s(&costs),
        "--baseline",
        "add12u_CLA",
    ]);
    assert!(String::from_utf8_lossy(&res.stderr).contains("15 points, 6 corrupt"));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let usable = rows
        .iter()
        .filter(|r| r["adder"] != "add12u_CLA" && r["corrupt_flag"] == false)
        .count();
    assert_eq!(usable, 8);
    let r187 = rows.iter().find(|r| r["adder"] == "add12u_187").unwrap();
    assert!((r187["area_saving_pct"].as_f64().unwrap() - 21.5).abs() < 1e-9);
    assert!(dir.path().join("report.json.manifest.json").exists());
}

#[test]
fn dse_power_budget_on_tagger_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let (acc, costs) = (data("nlp_accuracy.csv"), data("nlp_costs.csv"));
    ok(&[
        "--out",
        s(&out),
        "dse",
        "--accuracy",
        s(&acc),
        "--costs",
        s(&costs),
        "--max-power",
        "120",
    ]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 4);
    let headers = csv::Reader::from_path(&out).unwrap().headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "accuracy").unwrap();
    assert!(rows.iter().all(|r| r[col].parse::<f64>().unwrap() <= 60.0));
}

#[test]
fn missing_input_fails() {
    let acc = data("nlp_accuracy.csv");
    let out = run(&["dse", "--accuracy", s(&acc), "--costs", "/nonexistent/costs.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
