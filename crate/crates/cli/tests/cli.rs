use std::process::{Command, Output};

fn hwlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn roots_report() {
    let o = hwlab(&["roots", "--n", "3", "--format", "json", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suite"], "roots");
    let checks = v["checks"].as_array().unwrap();
    let count = checks.iter().find(|c| c["name"] == "|Φ| = 2(n+1)²").unwrap();
    assert_eq!(count["detail"], "|Φ| = 32");
    let wide = checks.iter().find(|c| c["name"] == "wide_criterion(T)").unwrap();
    assert_eq!(wide["pass"], true);
    assert!(v.get("duration_ms").is_none());
}

#[test]
fn lowest_weights_csv() {
    let o = hwlab(&["lowest-weights", "--k-max", "5", "--lambda", "1", "--mu", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let k2: Vec<&str> = out.lines().filter(|l| l.starts_with("2,")).collect();
    assert_eq!(k2, ["2,2,0,1.4142135623730951", "2,1,1,-2", "2,0,2,1.4142135623730951"]);
}

#[test]
fn indecomp_sym2() {
    let o = hwlab(&["indecomp", "--family", "sym", "--k", "2", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(indecomposable; commutant 10, radical 9)"));
}

#[test]
fn zero_sum_is_usage_error() {
    let o = hwlab(&["intertwine", "--lambda", "1", "--mu", "-1"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(hwlab(&["roots", "--n", "zero"]).status.code(), Some(64));
    assert_eq!(hwlab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(hwlab(&["roots", "--tol", "wide=-1"]).status.code(), Some(64));
    assert_eq!(hwlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn failing_check_exits_one() {
    let o = hwlab(&["oscillator", "--tol", "basis orthonormality=1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  basis orthonormality"));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# oscillator at a wider basis\nlambda = 3.5\ntruncation = 16\nformat = json\n").unwrap();
    let o = hwlab(&["oscillator", "--config", cfg.to_str().unwrap(), "--truncation", "14", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["lambda"], 3.5);
    assert_eq!(v["config"]["truncation"], 14);

    std::fs::write(&cfg, "lambda = oops\n").unwrap();
    assert_eq!(hwlab(&["oscillator", "--config", cfg.to_str().unwrap()]).status.code(), Some(64));
}

#[test]
fn output_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = hwlab(&["all", "--format", "json", "--no-timestamp", "--output", a.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        runs.push(std::fs::read(&a).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let seq = hwlab(&["all", "--format", "json", "--no-timestamp", "--sequential"]);
    let mut v: serde_json::Value = serde_json::from_slice(&seq.stdout).unwrap();
    v["config"]["output_path"] = serde_json::Value::String(a.to_str().unwrap().into());
    let par: serde_json::Value = serde_json::from_slice(&runs[0]).unwrap();
    assert_eq!(v, par);
}

#[test]
fn tables_command() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(hwlab(&["tables", "--output", d]).status.code(), Some(0));
    let t1 = std::fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    let first = std::fs::read(dir.path().join("table2_check.csv")).unwrap();
    let low = t1.lines().skip(1).filter(|l| l.split(',').next().unwrap().parse::<u32>().unwrap() <= 2);
    assert_eq!(low.count(), 6);
    assert_eq!(hwlab(&["tables", "--output", d]).status.code(), Some(0));
    assert_eq!(std::fs::read(dir.path().join("table2_check.csv")).unwrap(), first);
}

#[test]
fn csv_report_header() {
    let o = hwlab(&["embed", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("name,anchor,residual,tol,pass\n"));
}
