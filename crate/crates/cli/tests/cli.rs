use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use iesplan_core::io::read_scenarios;
use iesplan_core::scengen::{column_moments, estimate_targets};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iesplan"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_history_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"history": "nowhere.csv"}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "scen", "gen"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nowhere.csv"), "{}", stderr(&o));
}

#[test]
fn scen_gen_converges_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = data("run.json");
    let args = ["--config", cfg.to_str().unwrap(), "scen", "gen", "--n", "100", "--seed", "7"];
    let oa = run(&args, &a);
    assert_eq!(code(&oa), 0, "{}", stderr(&oa));
    let ob = run(&args, &b);
    assert_eq!(code(&ob), 0);
    for f in ["scenarios_load.csv", "scenarios_ev.csv", "scengen_log.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs between reruns");
    }

    let generated = read_scenarios(&a.join("scenarios_load.csv"), Some(&a.join("scenarios_ev.csv"))).unwrap();
    assert_eq!(generated.len(), 100);
    let hist = read_scenarios(&data("history_load.csv"), Some(&data("history_ev.csv"))).unwrap();
    let targets = estimate_targets(&hist, true);
    for t in 0..24 {
        let col: Vec<f64> = generated.scenarios.iter().map(|s| s.elec_load[t]).collect();
        let (m, v, s, k) = column_moments(&col);
        let sd = targets.variance[t].sqrt();
        assert!(((m - targets.mean[t]) / sd).abs() <= 0.05, "hour {t} mean");
        assert!((v / targets.variance[t] - 1.0).abs() <= 0.05, "hour {t} variance");
        assert!((s - targets.skewness[t]).abs() <= 0.05, "hour {t} skewness");
        assert!((k - targets.kurtosis[t]).abs() <= 0.05, "hour {t} kurtosis");
    }
}

#[test]
fn small_scen_gen_is_best_effort() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = data("run.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "scen", "gen", "--n", "10"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(dir.path().join("scenarios_load.csv").exists());
}

#[test]
fn tiny_plan_is_optimal_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("tiny.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "plan", "--export-mps"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["plan_summary.csv", "cost_breakdown.csv", "audit.json", "model.mps", "dispatch_1.csv", "soc_1.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let audit: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("audit.json")).unwrap()).unwrap();
    assert_eq!(audit["status"], "optimal");
    assert!(audit["gap"].as_f64().unwrap() <= 1e-6);
    assert_eq!(audit["chance"]["pass"], true);
    assert!(audit["nodes"].as_u64().is_some());
    assert!(audit["wall_time_s"].as_f64().is_some());
}

#[test]
fn unreachable_soc_with_zero_zeta_exits_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("tiny_short.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "plan", "--zeta", "0"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("hint:"), "{}", stderr(&o));
}

#[test]
fn plan_reruns_are_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("tiny.json");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&run(&["--config", cfg.to_str().unwrap(), "plan"], &a)), 0);
    assert_eq!(code(&run(&["--config", cfg.to_str().unwrap(), "plan"], &b)), 0);
    for f in ["plan_summary.csv", "cost_breakdown.csv", "dispatch_1.csv", "soc_1.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let strip = |p: PathBuf| {
        let mut v: serde_json::Value = serde_json::from_slice(&fs::read(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    assert_eq!(strip(a.join("audit.json")), strip(b.join("audit.json")));
}

#[test]
fn sweep_rows_and_monotone_totals() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = data("run.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep", "--carbon-tax", "40,400,1000"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("cost_breakdown.csv")).unwrap();
    let totals: Vec<f64> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(totals.len(), 3);
    assert!(totals.windows(2).all(|w| w[1] >= w[0]), "{totals:?}");
    assert_eq!(fs::read_to_string(dir.path().join("plan_summary.csv")).unwrap().lines().count(), 4);
}

#[test]
fn sweep_single_tax_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("tiny.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep", "--carbon-tax", "100"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read_to_string(dir.path().join("plan_summary.csv")).unwrap().lines().count(), 2);
}

#[test]
fn empty_tax_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let tiny = fixture("tiny.json");
    let mut v: serde_json::Value = serde_json::from_slice(&fs::read(&tiny).unwrap()).unwrap();
    let base = tiny.parent().unwrap();
    for key in ["catalog", "tariffs", "scenarios", "scenarios_ev"] {
        let p = base.join(v[key].as_str().unwrap());
        v[key] = p.to_str().unwrap().into();
    }
    v["carbon_taxes"] = serde_json::json!([]);
    fs::write(&cfg, v.to_string()).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("empty"), "{}", stderr(&o));
}

#[test]
fn export_mps_writes_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("tiny.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "export-mps"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("model.mps")).unwrap();
    assert!(text.contains("ROWS") && text.contains("COLUMNS"));
}

#[test]
fn validate_reports_bad_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let load = dir.path().join("load.csv");
    let mut text = fs::read_to_string(fixture("tiny_load.csv")).unwrap();
    text = text.replacen("0,2,300,50,120", "0,2,300,50,1200", 1);
    fs::write(&load, text).unwrap();
    let cfg = fixture("tiny.json");
    let ok = run(&["--config", cfg.to_str().unwrap(), "validate"], dir.path());
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let args = ["--config", cfg.to_str().unwrap(), "validate", "--scenarios", load.to_str().unwrap(), "--scenarios-ev"];
    let bad = bin().args(args).arg(fixture("tiny_ev.csv")).output().unwrap();
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("1200"));
}

#[test]
fn bad_flag_value_is_an_input_error() {
    let o = bin().args(["plan", "--mode", "fuzzy"]).output().unwrap();
    assert_eq!(code(&o), 1);
}
