//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lane_emden::functionals::{
    c30_integral, energy, expansion_check, sobolev_estimate, DiscreteRadialFunction, DEFAULT_CELLS,
};
use lane_emden::mountain_pass::{find_endpoint, mpa_level, t_lambda_curve};
use lane_emden::pohozaev::{general_identity_residual, min_h, pov_residual, TestFunctionPsi};
use lane_emden::problem::{f4_threshold, lambda_star, CoefficientModel, Nonlinearity, ProblemSpec};
use lane_emden::radial_ode::{find_dirichlet_solution, integrate_ivp, residual_check, DirichletOutcome};
use lane_emden::scanner::{records_csv, scan_grid, Axis, ScanConfig};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn exact_bubble() -> Check {
    let start = Instant::now();
    let spec = ProblemSpec::power(3, 5.0, CoefficientModel::constant(3.0));
    let prof = integrate_ivp(&spec, 1.0, 1.0, 1e-11).map_err(err)?;
    let mut worst = 0.0f64;
    for (r, u) in prof.mesh.iter().zip(&prof.values) {
        let exact = (1.0 + r * r).powf(-0.5);
        worst = worst.max((u - exact).abs() / exact);
    }
    for i in 0..=200 {
        let r = i as f64 / 200.0;
        let exact = (1.0 + r * r).powf(-0.5);
        worst = worst.max((prof.sample(r).0 - exact).abs() / exact);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst < 1e-8, format!("max relative error {worst:e}"))?;
    ensure(secs < 1.0, format!("took {secs:.2} s"))?;
    Ok(format!("max relative error {worst:.2e}, {secs:.3} s"))
}

fn pure_critical_nonexistence() -> Check {
    let start = Instant::now();
    let outcome = find_dirichlet_solution(&ProblemSpec::pure_critical(3), (1e-3, 1e6), 1e-10).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let trace = outcome.trace();
    ensure(matches!(outcome, DirichletOutcome::NotFound { .. }), "a Dirichlet bracket was found")?;
    ensure(trace.brackets.is_empty(), "brackets recorded")?;
    let positive = trace.shots.iter().all(|s| s.first_zero.is_none());
    ensure(positive, "some shot has a zero in (0, 1]")?;
    ensure(secs < 30.0, format!("took {secs:.1} s"))?;
    Ok(format!("{} shots, all positive at r = 1, {secs:.2} s", trace.shots.len()))
}

fn existence_band() -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    for beta in [0.25, 0.5, 0.75] {
        let spec = ProblemSpec::critical_with_g(3, CoefficientModel::power_law(1.0, beta));
        let outcome = find_dirichlet_solution(&spec, (1e-3, 1e6), 1e-10).map_err(err)?;
        let prof = outcome.profile().ok_or(format!("β = {beta}: no solution"))?;
        let ode = residual_check(prof).map_err(err)?;
        let poh = pov_residual(prof, beta, 1.0, 5.0).map_err(err)?;
        ensure(ode < 1e-6, format!("β = {beta}: ODE residual {ode:e}"))?;
        ensure(poh < 1e-5, format!("β = {beta}: Pohozaev residual {poh:e}"))?;
        parts.push(format!("β={beta}: d*={:.4} ode={ode:.1e} poh={poh:.1e}", prof.shooting_height));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, format!("took {secs:.1} s"))?;
    Ok(format!("{}; {secs:.2} s", parts.join(", ")))
}

fn threshold_formula() -> Check {
    let exact = [((3, 1.0), 4.0), ((3, 2.0), 24.0), ((4, 2.0), 3.0)];
    for ((n, beta), want) in exact {
        let got = lambda_star(n, beta).map_err(err)?;
        ensure(got == want, format!("λ*({n}, {beta}) = {got}, expected {want}"))?;
    }
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in [3u32, 4, 5] {
        let nf = n as f64;
        for beta in [nf - 2.0, nf - 1.5, nf - 1.0, 2.0 * (nf - 2.0)] {
            let ls = lambda_star(n, beta).map_err(err)?;
            let (_, h) = min_h(n, beta, ls).map_err(err)?;
            worst = worst.max(h.abs());
            count += 1;
        }
    }
    ensure(worst < 1e-10, format!("max |min h| = {worst:e}"))?;
    Ok(format!("closed forms exact, max |min h(λ*)| = {worst:.1e} over {count} pairs"))
}

fn certified_gap() -> Check {
    let low = scan_grid(&ScanConfig::new(vec![3], Axis::single(1.0), Axis::linear(0.0, 4.0, 5))).map_err(err)?;
    for r in &low {
        ensure(
            r.classification.name() == "nonexistence_certified",
            format!("λ = {}: {}", r.lambda, r.classification.name()),
        )?;
    }
    let high = scan_grid(&ScanConfig::new(
        vec![3],
        Axis::single(1.0),
        Axis {
            min: 10.0,
            max: 1000.0,
            count: 3,
            spacing: lane_emden::scanner::Spacing::Log,
        },
    ))
    .map_err(err)?;
    let first = high
        .iter()
        .find(|r| r.classification.is_existence())
        .ok_or("no existence up to λ = 1000")?;
    Ok(format!(
        "λ ∈ [0, 4] certified, existence at λ = {}, cross-check clean",
        first.lambda
    ))
}

fn subcritical_specs() -> Vec<ProblemSpec> {
    let cases: [(u32, f64, f64, f64, f64); 10] = [
        (3, 2.0, 0.5, 0.0, 2.0),
        (3, 3.0, 1.0, 0.5, 2.0),
        (3, 3.0, 0.5, 1.0, 3.0),
        (3, 4.0, 2.0, 2.0, 1.5),
        (3, 2.5, 1.0, 1.5, 4.0),
        (4, 1.5, 0.5, 0.0, 2.0),
        (4, 2.0, 1.0, 1.0, 1.5),
        (4, 2.5, 2.0, 0.5, 2.0),
        (4, 2.0, 0.5, 2.0, 2.5),
        (4, 1.8, 1.5, 3.0, 1.2),
    ];
    cases
        .iter()
        .map(|&(n, p, lambda, beta, q)| {
            ProblemSpec::power(n, p, CoefficientModel::constant(1.0)).with_perturbation(
                lambda,
                CoefficientModel::power_law(1.0, beta),
                Nonlinearity::pure_power(q),
            )
        })
        .collect()
}

fn pohozaev_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for spec in subcritical_specs() {
        let outcome = find_dirichlet_solution(&spec, (1e-3, 1e6), 1e-11).map_err(err)?;
        let prof = outcome.profile().ok_or(format!("no solution for {spec:?}"))?;
        let (beta, q) = match (&spec.k, &spec.f) {
            (CoefficientModel::PowerLaw { exponent, .. }, Nonlinearity::PurePower { q, .. }) => (*exponent, *q),
            _ => unreachable!(),
        };
        let g = CoefficientModel::power_law(spec.lambda, beta);
        for _ in 0..20 {
            let degree = rng.random_range(1..=4);
            let mut c = vec![0.0];
            c.extend((0..degree).map(|_| rng.random_range(-1.0..1.0)));
            let psi = TestFunctionPsi::polynomial(c).map_err(err)?;
            let res = general_identity_residual(prof, &psi, &g, q).map_err(err)?;
            worst = worst.max(res);
            checks += 1;
        }
    }
    ensure(worst < 1e-5, format!("max residual {worst:e}"))?;
    Ok(format!("{checks} checks, max residual {worst:.1e}"))
}

fn energy_expansions() -> Check {
    let start = Instant::now();
    let ladder = [1e-3, 5e-4, 2e-4, 1e-4, 5e-5, 2e-5, 1e-5];
    let mut parts = Vec::new();
    for (gamma, q) in [(0.5, 3.0), (1.0, 4.0)] {
        let rep = expansion_check(3, gamma, q, &ladder).map_err(err)?;
        ensure(
            (rep.slope_norm - 1.0).abs() <= 0.1,
            format!("norm slope {} for (γ, q) = ({gamma}, {q})", rep.slope_norm),
        )?;
        ensure(
            (rep.slope_weighted - rep.predicted_a).abs() <= 0.08,
            format!("weighted slope {} vs {}", rep.slope_weighted, rep.predicted_a),
        )?;
        parts.push(format!(
            "(γ,q)=({gamma},{q}): norm {:.4}, weighted {:.4} vs {}",
            rep.slope_norm, rep.slope_weighted, rep.predicted_a
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, format!("took {secs:.1} s"))?;
    Ok(format!("{}; {secs:.2} s", parts.join(", ")))
}

fn divergence_criterion() -> Check {
    let ladder = [1e-1, 3e-2, 1e-2, 3e-3];
    let (n, gamma) = (3, 1.0);
    let threshold = f4_threshold(n, gamma).map_err(err)?;
    let j = |q: f64| -> Result<Vec<f64>, String> {
        ladder
            .iter()
            .map(|&e| c30_integral(&Nonlinearity::pure_power(q), gamma, n, e).map_err(err))
            .collect()
    };
    let above = j(threshold + 1.0)?;
    ensure(
        above.windows(2).all(|w| w[1] > w[0]),
        format!("J not increasing above the threshold: {above:?}"),
    )?;
    let below = j(threshold - 2.0)?;
    println!("    q = {} below the threshold: J = {below:?}", threshold - 2.0);
    Ok(format!("q = {} above threshold {threshold}: J = {above:.4?}", threshold + 1.0))
}

fn mountain_pass_threshold() -> Check {
    let s = sobolev_estimate(3, 1e-4).map_err(err)?;
    ensure(s.spread < 1e-4, format!("Sobolev spread {}", s.spread))?;
    let bound = s.value.powf(1.5) / 3.0;
    let spec = ProblemSpec::pure_critical(3).with_perturbation(
        1.0,
        CoefficientModel::power_law(1.0, 0.5),
        Nonlinearity::pure_power(5.0),
    );
    let start = DiscreteRadialFunction::from_fn(3, DEFAULT_CELLS, |r| 1.0 - r).map_err(err)?;
    let e = find_endpoint(&spec, &start).map_err(err)?;
    let rep = mpa_level(&spec, &e.point, 2000, 1e-8).map_err(err)?;
    let outcome = find_dirichlet_solution(&spec, (1e-3, 1e6), 1e-10).map_err(err)?;
    let prof = outcome.profile().ok_or("shooting found no solution")?;
    let u = DiscreteRadialFunction::from_profile(prof, DEFAULT_CELLS).map_err(err)?;
    let shoot = energy(&spec, &u).map_err(err)?;
    let gap = (rep.level - shoot).abs() / shoot;
    ensure(rep.level < bound, format!("c = {} ≥ {bound}", rep.level))?;
    ensure(gap < 0.05, format!("relative gap {gap:e}"))?;
    Ok(format!(
        "c = {:.6} < {bound:.6} (S spread {:.1e}), shooting energy {shoot:.6}, gap {gap:.1e}",
        rep.level, s.spread
    ))
}

fn monotone_t_lambda() -> Check {
    let spec = ProblemSpec::pure_critical(3).with_perturbation(
        1.0,
        CoefficientModel::power_law(1.0, 1.0),
        Nonlinearity::pure_power(3.0),
    );
    let bump = DiscreteRadialFunction::from_fn(3, DEFAULT_CELLS, |r| {
        if (0.1..=0.9).contains(&r) {
            (std::f64::consts::PI * (r - 0.1) / 0.8).sin().powi(2)
        } else {
            0.0
        }
    })
    .map_err(err)?;
    let curve = t_lambda_curve(&spec, &bump, &[1.0, 10.0, 100.0, 1000.0]).map_err(err)?;
    let ts: Vec<f64> = curve.iter().map(|m| m.t).collect();
    ensure(ts.windows(2).all(|w| w[1] < w[0]), format!("t_λ not decreasing: {ts:?}"))?;
    let bound = sobolev_estimate(3, 1e-6).map_err(err)?.value.powf(1.5) / 3.0;
    for m in &curve[2..] {
        ensure(m.energy < bound, format!("I at λ = {} is {} ≥ {bound}", m.lambda, m.energy))?;
    }
    Ok(format!(
        "t_λ = {ts:.4?}, I = {:.4} and {:.4} < {bound:.4}",
        curve[2].energy, curve[3].energy
    ))
}

fn determinism() -> Check {
    let mut cfg = ScanConfig::new(vec![3, 4], Axis::linear(0.5, 2.5, 3), Axis::linear(0.0, 60.0, 4));
    let dir = tempfile::tempdir().map_err(err)?;
    let mut bytes = Vec::new();
    for (i, jobs) in [1usize, 4].into_iter().enumerate() {
        cfg.jobs = jobs;
        let path = dir.path().join(format!("run{i}.csv"));
        std::fs::write(&path, records_csv(&scan_grid(&cfg).map_err(err)?)).map_err(err)?;
        bytes.push(std::fs::read(&path).map_err(err)?);
    }
    ensure(bytes[0] == bytes[1], "CSV outputs differ")?;
    Ok(format!("{} bytes identical across runs", bytes[0].len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("exact bubble oracle", exact_bubble),
        ("pure critical nonexistence", pure_critical_nonexistence),
        ("existence band", existence_band),
        ("threshold formula", threshold_formula),
        ("certified gap and large-λ existence", certified_gap),
        ("Pohozaev soundness suite", pohozaev_suite),
        ("energy expansions", energy_expansions),
        ("divergence criterion", divergence_criterion),
        ("mountain-pass threshold", mountain_pass_threshold),
        ("monotone t_λ", monotone_t_lambda),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
