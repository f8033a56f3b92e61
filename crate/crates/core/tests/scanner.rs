use lane_emden::error::Error;
use lane_emden::pohozaev::certify_nonexistence;
use lane_emden::problem::{lambda_star, ProblemSpec};
use lane_emden::radial_ode::{find_dirichlet_solution, DirichletOutcome};
use lane_emden::scanner::*;

#[test]
fn subcritical_beta_line_is_all_existence() {
    let cfg = ScanConfig::new(vec![3], Axis::linear(0.1, 0.9, 5), Axis::single(1.0));
    let records = scan_grid(&cfg).unwrap();
    assert_eq!(records.len(), 5);
    for r in &records {
        assert!(r.classification.is_existence(), "{r:?}");
    }
}

#[test]
fn lambda_line_below_threshold_is_all_certified() {
    let cfg = ScanConfig::new(vec![3], Axis::single(1.0), Axis::linear(0.0, 4.0, 9));
    assert!(lambda_star(3, 1.0).unwrap() >= 4.0);
    let records = scan_grid(&cfg).unwrap();
    assert_eq!(records.len(), 9);
    for r in &records {
        assert_eq!(r.classification.name(), "nonexistence_certified", "{r:?}");
    }
}

fn mixed_config(jobs: usize) -> ScanConfig {
    let mut cfg = ScanConfig::new(vec![3, 4], Axis::linear(0.5, 2.5, 3), Axis::linear(0.0, 60.0, 4));
    cfg.jobs = jobs;
    cfg
}

#[test]
fn csv_is_identical_across_job_counts() {
    let a = records_csv(&scan_grid(&mixed_config(1)).unwrap());
    let b = records_csv(&scan_grid(&mixed_config(4)).unwrap());
    assert_eq!(a, b);
}

#[test]
fn records_come_back_in_grid_order_and_respect_lambda_star() {
    let cfg = mixed_config(3);
    let records = scan_grid(&cfg).unwrap();
    let points = cfg.points();
    assert_eq!(records.len(), points.len());
    for (i, (r, p)) in records.iter().zip(&points).enumerate() {
        assert_eq!(r.index, i);
        assert_eq!((r.n, r.beta, r.lambda), *p);
    }
    for t in empirical_thresholds(&records) {
        if let (Some(upper), Some(ls)) = (t.upper, t.lambda_star) {
            assert!(upper >= ls, "{t:?}");
        }
    }
}

#[test]
fn json_report_round_trips_exactly() {
    let cfg = mixed_config(0);
    let report = ScanReport::new(&cfg, scan_grid(&cfg).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_all(&report, &dir.path().join("out/scan")).unwrap();
    assert_eq!(paths.len(), 3);
    let back: ScanReport = serde_json::from_str(&std::fs::read_to_string(&paths[1]).unwrap()).unwrap();
    assert_eq!(back, report);
    let csv = std::fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(csv.lines().count(), report.records.len() + 1);
    assert!(csv.starts_with(CSV_HEADER));
    let phase = std::fs::read_to_string(&paths[2]).unwrap();
    assert!(phase.starts_with("N,beta,lambda,code"));
}

#[test]
fn certificate_colliding_with_solution_is_a_consistency_error() {
    let cert = certify_nonexistence(3, 1.0, 1.0, 5.0).unwrap();
    assert!(cert.is_certified());
    let solvable = ProblemSpec::critical_with_g(
        3,
        lane_emden::problem::CoefficientModel::PowerLaw { amplitude: 1.0, exponent: 0.5 },
    );
    let outcome = find_dirichlet_solution(&solvable, (1e-3, 1e6), 1e-10).unwrap();
    assert!(matches!(outcome, DirichletOutcome::Found { .. }));
    let err = check_coherence(&cert, &outcome).unwrap_err();
    assert!(matches!(err, Error::Consistency(_)));
    assert_eq!(err.exit_code(), 3);
}
