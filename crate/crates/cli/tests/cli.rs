use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qops(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qops"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("qops runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn records(p: &Path) -> Vec<Value> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} in {v}"))
}

#[test]
fn list_prints_the_catalogue() {
    let o = qops(&["list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l == "beta.fourier"));
    assert!(text.lines().any(|l| l == "delta.n2"));
}

#[test]
fn eval_s2_on_strip_points() {
    let d = TempDir::new().unwrap();
    let out = path(&d, "s2.jsonl");
    let o = qops(&["eval", "--target", "S2", "--periods", "1", "1.4142135623730951", "--grid", "re=0.3,0.8,1.2,1.7,2.1", "--grid", "im=0.25", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rs = records(&out);
    assert_eq!(rs.len(), 5);
    for r in &rs {
        assert!(num(r, "re").is_finite() && num(r, "im").is_finite());
    }
}

#[test]
fn eval_k_at_origin_is_one_in_csv() {
    let o = qops(&["eval", "--target", "K", "--grid", "x=0", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_reader(&o.stdout[..]);
    let headers = rdr.headers().unwrap().clone();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let col = headers.iter().position(|h| h == "re").unwrap();
    assert_eq!(rows[0][col].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn eval_config_errors_exit_2() {
    assert_eq!(code(&qops(&["eval", "--target", "nope", "--grid", "x=0"])), 2);
    assert_eq!(code(&qops(&["eval", "--target", "K"])), 2);
    assert_eq!(code(&qops(&["eval", "--target", "K", "--grid", "x=0", "--grid", "y=1"])), 2);
    assert_eq!(code(&qops(&["eval", "--target", "K", "--grid", "x=0", "--g", "-1"])), 2);
    assert_eq!(code(&qops(&["eval", "--target", "S2", "--grid", "re=0.5", "--grid", "im=0"])), 2);
}

#[test]
fn eval_failure_exits_1_with_marked_record() {
    let d = TempDir::new().unwrap();
    let out = path(&d, "pole.jsonl");
    // S₂ has a pole at ω₁ + ω₂
    let o = qops(&["eval", "--target", "S2", "--periods", "1", "1", "--grid", "re=0.5,2", "--grid", "im=0", "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    let rs = records(&out);
    assert_eq!(rs.len(), 2);
    assert!(rs[1]["re"].is_null());
    assert!(rs[1]["error"].is_string());
}

#[test]
fn coordinate_and_spectral_evaluations_agree() {
    let d = TempDir::new().unwrap();
    let (a, b) = (path(&d, "hr.jsonl"), path(&d, "mb.jsonl"));
    let grid = ["--g", "0.7", "--grid", "lambda1=0.5,-0.2", "--grid", "lambda2=0.1", "--grid", "x1=1.0,0.3", "--grid", "x2=-0.4"];
    for (target, out) in [("psi_HR", &a), ("psi_MB", &b)] {
        let mut args = vec!["eval", "--target", target, "--out", s(out)];
        args.extend(grid);
        assert_eq!(code(&qops(&args)), 0);
    }
    let (ra, rb) = (records(&a), records(&b));
    assert_eq!(ra.len(), 4);
    for (x, y) in ra.iter().zip(&rb) {
        assert_eq!(x["params"], y["params"]);
        let d = (num(x, "re") - num(y, "re")).hypot(num(x, "im") - num(y, "im"));
        assert!(d < 1e-7, "{d:e}");
    }
}

#[test]
fn check_report_round_trip() {
    let d = TempDir::new().unwrap();
    let out = path(&d, "check.jsonl");
    let o = qops(&["check", "special_fn.*", "beta.fourier", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let rs = records(&out);
    assert!(!rs.is_empty());
    for r in &rs {
        let tol = num(r, "tolerance");
        let verdict = num(r, "abs_err") <= tol || num(r, "rel_err") <= tol;
        assert_eq!(r["passed"].as_bool(), Some(verdict));
        for k in ["check_name", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "runtime_ms", "version", "config_hash", "timestamp"] {
            assert!(!r[k].is_null(), "missing {k}");
        }
    }
    let rep = qops(&["report", s(&out)]);
    assert_eq!(code(&rep), 0);
    let table = String::from_utf8(rep.stdout).unwrap();
    assert!(table.contains("beta.fourier") && table.contains("PASS") && !table.contains("FAIL"));
}

#[test]
fn forced_failure_exits_1_and_is_reported() {
    let d = TempDir::new().unwrap();
    let (good, bad) = (path(&d, "good.jsonl"), path(&d, "bad.jsonl"));
    assert_eq!(code(&qops(&["check", "beta.fourier", "--out", s(&good)])), 0);
    assert_eq!(code(&qops(&["check", "asymptotic.hatK", "--tol", "1e-16", "--out", s(&bad)])), 1);
    assert!(records(&bad).iter().any(|r| r["passed"] == Value::Bool(false)));
    assert_eq!(code(&qops(&["report", s(&good), s(&good)])), 0);
    let rep = qops(&["report", s(&good), s(&bad)]);
    assert_eq!(code(&rep), 1);
    assert!(String::from_utf8(rep.stdout).unwrap().contains("FAIL"));
}

#[test]
fn report_input_errors_exit_2() {
    assert_eq!(code(&qops(&["report"])), 2);
    let d = TempDir::new().unwrap();
    let junk = path(&d, "junk.jsonl");
    std::fs::write(&junk, "not json\n").unwrap();
    assert_eq!(code(&qops(&["report", s(&junk)])), 2);
    assert_eq!(code(&qops(&["report", s(&path(&d, "missing.jsonl"))])), 2);
    // a stored verdict that contradicts its own numbers
    let good = path(&d, "good.jsonl");
    assert_eq!(code(&qops(&["check", "beta.fourier", "--out", s(&good)])), 0);
    let text = std::fs::read_to_string(&good).unwrap().replacen("\"passed\":true", "\"passed\":false", 1);
    let forged = path(&d, "forged.jsonl");
    std::fs::write(&forged, text).unwrap();
    assert_eq!(code(&qops(&["report", s(&forged)])), 2);
}

#[test]
fn unknown_check_exits_2() {
    assert_eq!(code(&qops(&["check", "no.such.check"])), 2);
    assert_eq!(code(&qops(&["sweep", "--check", "beta.fourier", "--values", "1"])), 2);
    assert_eq!(code(&qops(&["sweep", "--check", "reduction.nope", "--values", "1"])), 2);
}

#[test]
fn config_file_and_flag_override() {
    let d = TempDir::new().unwrap();
    let cfg = path(&d, "run.toml");
    std::fs::write(&cfg, "g = 2.0\n[eval]\ntarget = \"K\"\n[eval.grid]\nx = [1.0]\n").unwrap();
    let o = qops(&["eval", "--config", s(&cfg)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((num(&v, "re") - 1.0f64.cosh().powi(-2)).abs() < 1e-15);
    let o = qops(&["eval", "--config", s(&cfg), "--g", "1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((num(&v, "re") - 1.0 / 1.0f64.cosh()).abs() < 1e-15);
    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(code(&qops(&["check", "beta.fourier", "--config", s(&cfg)])), 2);
}

#[test]
fn csv_and_json_lines_carry_identical_numbers() {
    let d = TempDir::new().unwrap();
    let (j, c) = (path(&d, "r.jsonl"), path(&d, "r.csv"));
    assert_eq!(code(&qops(&["check", "beta.*", "--deterministic", "--out", s(&j)])), 0);
    assert_eq!(code(&qops(&["check", "beta.*", "--deterministic", "--format", "csv", "--out", s(&c)])), 0);
    let js = records(&j);
    let mut rdr = csv::Reader::from_path(&c).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(js.len(), rows.len());
    for (jr, cr) in js.iter().zip(&rows) {
        for k in ["lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err", "tolerance"] {
            let col = headers.iter().position(|h| h == k).unwrap();
            assert_eq!(num(jr, k).to_bits(), cr[col].parse::<f64>().unwrap().to_bits(), "{k}");
        }
    }
}

#[test]
fn reduction_sweep_is_monotone() {
    let d = TempDir::new().unwrap();
    let out = path(&d, "sweep.jsonl");
    let o = qops(&["sweep", "--check", "reduction.Kg_to_hatK", "--values", "0.4,0.2,0.1,0.05", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rs = records(&out);
    assert_eq!(rs.len(), 4);
    let omegas: Vec<f64> = rs.iter().map(|r| r["params"]["omega2"].as_f64().unwrap()).collect();
    assert_eq!(omegas, [0.4, 0.2, 0.1, 0.05]);
    for w in rs.windows(2) {
        assert!(num(&w[1], "abs_err") < num(&w[0], "abs_err"));
    }
}

#[test]
fn delta_sweep_decreases() {
    let d = TempDir::new().unwrap();
    let out = path(&d, "delta.jsonl");
    let o = qops(&["sweep", "--check", "delta.n1_g1", "--values", "5,10,20,40", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rs = records(&out);
    assert_eq!(rs.len(), 4);
    for w in rs.windows(2) {
        assert!(num(&w[1], "abs_err") < num(&w[0], "abs_err"));
    }
}

#[test]
fn single_point_sweep() {
    let o = qops(&["sweep", "--check", "reduction.S2_to_gamma", "--values", "20"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1);
}

#[test]
fn deterministic_reports_ignore_jobs() {
    let d = TempDir::new().unwrap();
    let (a, b) = (path(&d, "a.jsonl"), path(&d, "b.jsonl"));
    for (jobs, out) in [("1", &a), ("4", &b)] {
        assert_eq!(code(&qops(&["check", "special_fn.*", "beta.*", "--deterministic", "--jobs", jobs, "--out", s(out)])), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(records(&a).iter().all(|r| r["runtime_ms"].as_f64() == Some(0.0) && r["timestamp"].as_u64() == Some(0)));
}

#[test]
fn guide_config_example_runs() {
    let md = include_str!("../../../book/src/command-line.md");
    let toml = md.split("```toml\n").nth(1).and_then(|s| s.split("```").next()).expect("toml block");
    let d = TempDir::new().unwrap();
    let cfg = path(&d, "guide.toml");
    let out = path(&d, "guide.csv");
    std::fs::write(&cfg, toml).unwrap();
    let o = qops(&["eval", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv::Reader::from_path(&out).unwrap().records().count(), 3);
}
