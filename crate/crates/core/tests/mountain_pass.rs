use lane_emden::functionals::DiscreteRadialFunction;
use lane_emden::mountain_pass::{find_endpoint, mpa_level, verify_mp_geometry_on};
use lane_emden::problem::{CoefficientModel, Nonlinearity, ProblemSpec};

#[test]
fn level_dominates_sampled_rim() {
    let spec = ProblemSpec::pure_critical(3).with_perturbation(
        1.0,
        CoefficientModel::power_law(1.0, 0.5),
        Nonlinearity::pure_power(5.0),
    );
    for (rho, seed) in [(0.05, 1), (0.1, 2), (0.2, 3)] {
        let geo = verify_mp_geometry_on(&spec, rho, 32, seed, 1024).unwrap();
        assert!(!geo.geometry_failed);
        let start = DiscreteRadialFunction::from_fn(3, 1024, |r| 1.0 - r).unwrap();
        let e = find_endpoint(&spec, &start).unwrap();
        let rep = mpa_level(&spec, &e.point, 200, 1e-6).unwrap();
        assert!(rep.level >= geo.a_estimate, "ρ = {rho}: {} < {}", rep.level, geo.a_estimate);
    }
}

#[test]
fn unperturbed_critical_level_sits_at_the_compactness_threshold() {
    // no solution exists, so descent approaches the non-compact level
    let spec = ProblemSpec::pure_critical(3);
    let s = lane_emden::functionals::sobolev_constant(3, 1e-8).unwrap();
    let threshold = s.powf(1.5) / 3.0;
    let start = DiscreteRadialFunction::from_fn(3, 4096, |r| 1.0 - r).unwrap();
    let e = find_endpoint(&spec, &start).unwrap();
    let rep = mpa_level(&spec, &e.point, 2000, 1e-8).unwrap();
    let rel = (rep.level - threshold).abs() / threshold;
    assert!(rel < 0.05, "level {} vs {threshold}", rep.level);
    assert!(rep.level >= threshold * (1.0 - 1e-6), "a discrete level cannot beat the Sobolev bound");
}
