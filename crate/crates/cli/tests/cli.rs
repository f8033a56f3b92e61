use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lane-emden"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SOLVABLE: &str = r#"
dimension = 3
[main_coefficient]
kind = "one_plus"
g = { kind = "power_law", amplitude = 1.0, exponent = 0.5 }
"#;

#[test]
fn lambda_star_prints_closed_form() {
    let o = run(&["lambda-star", "--n", "3", "--beta", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lambda_star"].as_f64(), Some(4.0));
}

#[test]
fn domain_errors_exit_with_two() {
    let o = run(&["lambda-star", "--n", "3", "--beta", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["certify", "--n", "2", "--beta", "1", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_or_malformed_config_exits_with_two() {
    assert_eq!(run(&["scan"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "dimension = 2\n");
    assert_eq!(run(&["solve", "--config", &bad]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn certify_reports_test_function_certificate() {
    let o = run(&["certify", "--n", "3", "--beta", "1", "--lambda", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "radial_test_function");
}

#[test]
fn solve_writes_profile_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "spec.toml", SOLVABLE);
    let prefix = dir.path().join("sol");
    let o = run(&["solve", "--config", &cfg, "--out", prefix.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sol.json")).unwrap()).unwrap();
    assert_eq!(v["status"], "found");
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("sol.csv")).unwrap();
    assert!(csv.starts_with("r,u,u_prime"));
}

#[test]
fn scan_output_is_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "grid.toml",
        "dimensions = [3]\n[beta]\nmin = 0.5\nmax = 1.5\ncount = 3\n[lambda]\nmin = 0.0\nmax = 100.0\ncount = 3\n",
    );
    let mut outs = Vec::new();
    for jobs in ["1", "3"] {
        let prefix = dir.path().join(format!("scan{jobs}"));
        let o = run(&["scan", "--config", &cfg, "--jobs", jobs, "--out", prefix.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(std::fs::read(dir.path().join(format!("scan{jobs}.csv"))).unwrap());
        assert!(dir.path().join(format!("scan{jobs}_phase.csv")).exists());
        assert!(dir.path().join(format!("scan{jobs}.json")).exists());
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn expansion_and_c30_emit_csv() {
    let o = run(&["expansion", "--n", "3", "--gamma", "1", "--q", "6", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("epsilon,norm_sq_minus_S,weighted_integral,J_eps"));
    let o = run(&["c30", "--n", "3", "--gamma", "1", "--format", "csv", "--ladder", "1e-2,1e-3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().nth(1), Some("0.01,0"));
}
