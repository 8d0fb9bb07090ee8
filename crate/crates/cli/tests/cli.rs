use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclewalk")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    let d = dir.to_str().unwrap();
    all.extend(["--out", d]);
    run(&all)
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn lazy_three_cycle_is_uniform_after_five_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["dist", "--law", "lazy", "--N", "3", "--horizon", "5"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("dist.csv")).unwrap();
    let r = rows(&text);
    assert_eq!(r.len(), 4);
    for row in &r[..3] {
        let p: f64 = row[1].parse().unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-11);
    }
    assert_eq!(r[3][0], "sum");
    assert!((r[3][1].parse::<f64>().unwrap() - 1.0).abs() <= 1e-9);
}

#[test]
fn dist_footer_sums_to_one_for_heavy_tails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["dist", "--law", "example2", "--N", "37", "--horizon", "11"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("dist.csv")).unwrap();
    let r = rows(&text);
    let total: f64 = r[..37].iter().map(|row| row[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() <= 1e-9);
    let phi = std::fs::read_to_string(dir.path().join("phi.csv")).unwrap();
    assert_eq!(rows(&phi).len(), 37);
    assert_eq!(summary(dir.path())["log_base"], "e");
}

#[test]
fn outputs_are_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["simulate", "--N", "30", "--hunter", "sweep", "--trials", "5000", "--seed", "9"];
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    let read = |d: &Path, f: &str| std::fs::read_to_string(d.join(f)).unwrap();
    assert_eq!(read(a.path(), "histogram.csv"), read(b.path(), "histogram.csv"));
    // the summary echoes --out, which differs between the two runs
    let strip = |d: &Path| read(d, "summary.json").replace(d.to_str().unwrap(), "OUT");
    assert_eq!(strip(a.path()), strip(b.path()));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["simulate", "--N", "25", "--trials", "9000", "--seed", "4"];
    let one = Command::new(env!("CARGO_BIN_EXE_cyclewalk")).args(args).env("CYCLEWALK_THREADS", "1").output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_cyclewalk")).args(args).env("CYCLEWALK_THREADS", "4").output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn table1_lists_preset_curve() {
    let out = run(&["reproduce", "table1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("N,inv_L,A,A_over_L"));
    let r = rows(&text);
    let sizes: Vec<&str> = r.iter().map(|row| row[0].as_str()).collect();
    assert_eq!(sizes, ["100", "500", "1000"]);
    let inv_l: f64 = r[1][1].parse().unwrap();
    assert!((inv_l - 7.76437).abs() < 1e-5);
    let a: f64 = r[1][2].parse().unwrap();
    let ratio: f64 = r[1][3].parse().unwrap();
    assert!((ratio - a * inv_l).abs() < 1e-10);
}

#[test]
fn table2_inverse_curve_at_thousand() {
    let out = run(&["reproduce", "table2"]);
    let r = rows(&String::from_utf8(out.stdout).unwrap());
    assert!((r[2][1].parse::<f64>().unwrap() - 8.15887).abs() < 1e-5);
}

#[test]
fn limit_product_grows() {
    let out = run(&["reproduce", "limit", "--grid", "100,1000"]);
    assert!(out.status.success());
    let r = rows(&String::from_utf8(out.stdout).unwrap());
    let p100: f64 = r[0][1].parse().unwrap();
    let p1000: f64 = r[1][1].parse().unwrap();
    assert!(p100 < p1000 && p1000 < 1.0);
}

#[test]
fn exact_summary_is_valid_json_with_config_echo() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["exact", "--law", "example3", "--N", "40", "--hunter", "sweep"]);
    assert!(out.status.success());
    let s = summary(dir.path());
    assert_eq!(s["command"], "exact");
    assert_eq!(s["config"]["hunter"], "sweep");
    assert_eq!(s["law"]["kind"], "lazy");
    let avg = s["results"]["average"].as_f64().unwrap();
    let per_start = std::fs::read_to_string(dir.path().join("per_start.csv")).unwrap();
    let r = rows(&per_start);
    assert_eq!(r.len(), 40);
    let mean = r.iter().map(|row| row[1].parse::<f64>().unwrap()).sum::<f64>() / 40.0;
    assert!((mean - avg).abs() < 1e-9);
    assert!(s["invariants"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn bounds_accepts_size_list() {
    let out = run(&["bounds", "--law", "example1", "--N", "50,100"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("N,p_sum,q_sum,lower,upper,L_closed_form,rho_star,C_star,r_star\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 2);
    for row in r {
        let lower: f64 = row[3].parse().unwrap();
        let upper: f64 = row[4].parse().unwrap();
        assert!(lower <= upper);
    }
}

#[test]
fn law_json_and_overrides() {
    let out = run(&["dist", "--law", r#"{"kind":"power_law","beta":1.5,"a":2.0}"#, "--beta", "1.2", "--N", "5"]);
    assert!(out.status.success());
    let s: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(s["law"]["beta"], 1.2);
}

#[test]
fn errors_exit_with_code_one() {
    let bad_law = run(&["dist", "--law", "example1", "--a", "0.1", "--N", "5"]);
    assert_eq!(bad_law.status.code(), Some(1));
    let bad_path = run(&["exact", "--N", "10", "--hunter", "custom", "--positions", "0,2"]);
    assert_eq!(bad_path.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_path.stderr).contains("cyclewalk:"));
    let few_trials = run(&["simulate", "--N", "10", "--trials", "10"]);
    assert_eq!(few_trials.status.code(), Some(1));
}
