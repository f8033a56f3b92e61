//! Mountain-pass geometry, the min-max level and ray maximizers.
//!
//! Paths are rays `t ↦ t·w` from the origin through the current direction.
//! The level along a ray is the maximum of `t ↦ I(t w)`; descent moves the
//! ray maximizer along the `H¹₀` gradient of `I` and re-maximizes each sweep.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    critical_norm, energy, energy_gradient, h1_inner, h1_seminorm_sq, sobolev_gradient, DiscreteRadialFunction, RayMoments,
    DEFAULT_CELLS,
};
use crate::problem::ProblemSpec;

/// Number of nodes on a discretized path.
pub const PATH_NODES: usize = 33;
/// Scales probed on unit rays.
pub const RAY_SCALES: [f64; 3] = [10.0, 20.0, 40.0];
/// Doubling stops beyond this scale.
pub const SCALE_GUARD: f64 = 1e12;

const RANDOM_MODES: usize = 8;

/// Result of sampling the sphere `‖u‖ = ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub rho: f64,
    pub samples: usize,
    pub seed: u64,
    /// Smallest sampled energy on the sphere.
    pub a_estimate: f64,
    /// Every sampled direction, normalized in `L^{2*}`, has negative and
    /// strictly decreasing energy at [`RAY_SCALES`].
    pub ray_ok: bool,
    /// All sampled energies were ≤ 0: the rim is not separated from zero.
    pub geometry_failed: bool,
}

/// Random radial direction `|Σ a_k cos((k − ½)πr)|` with `a_k ∈ [−1, 1]/k`,
/// normalized to `‖u‖ = 1`. Nonnegative, since only `u₊` feels the
/// nonlinearity.
pub fn random_direction(rng: &mut impl Rng, dimension: u32, cells: usize) -> Result<DiscreteRadialFunction> {
    loop {
        let coeffs: Vec<f64> = (1..=RANDOM_MODES)
            .map(|k| rng.random_range(-1.0..=1.0) / k as f64)
            .collect();
        let u = DiscreteRadialFunction::from_fn(dimension, cells, |r| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a * ((k as f64 + 0.5) * std::f64::consts::PI * r).cos())
                .sum::<f64>()
                .abs()
        })?;
        let norm = h1_seminorm_sq(&u).sqrt();
        if norm > 0.0 {
            return Ok(u.scaled(norm.recip()));
        }
    }
}

pub fn verify_mp_geometry(spec: &ProblemSpec, rho: f64, samples: usize, seed: u64) -> Result<GeometryReport> {
    verify_mp_geometry_on(spec, rho, samples, seed, DEFAULT_CELLS)
}

pub fn verify_mp_geometry_on(
    spec: &ProblemSpec,
    rho: f64,
    samples: usize,
    seed: u64,
    cells: usize,
) -> Result<GeometryReport> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Precondition(format!("rho must be positive, got {rho}")));
    }
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<DiscreteRadialFunction> = (0..samples)
        .map(|_| random_direction(&mut rng, spec.dimension, cells))
        .collect::<Result<_>>()?;
    let per_sample: Vec<(f64, bool)> = dirs
        .par_iter()
        .map(|u| {
            let m = RayMoments::new(spec, u)?;
            let rim = m.energy(rho);
            let unit = critical_norm(u).recip();
            let ray: Vec<f64> = RAY_SCALES.iter().map(|&t| m.energy(t * unit)).collect();
            let ok = ray.iter().all(|&e| e < 0.0) && ray.windows(2).all(|w| w[1] < w[0]);
            Ok((rim, ok))
        })
        .collect::<Result<_>>()?;
    let a_estimate = per_sample.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    Ok(GeometryReport {
        rho,
        samples,
        seed,
        a_estimate,
        ray_ok: per_sample.iter().all(|s| s.1),
        geometry_failed: per_sample.iter().all(|s| s.0 <= 0.0),
    })
}

/// A point `e = t·direction` past the mountain with `I(e) ≤ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    pub scale: f64,
    pub energy: f64,
    pub point: DiscreteRadialFunction,
}

/// Smallest dyadic `t` (up to [`SCALE_GUARD`]) with `I(t·direction) ≤ 0` past
/// the positive part of the ray.
pub fn find_endpoint(spec: &ProblemSpec, direction: &DiscreteRadialFunction) -> Result<Endpoint> {
    if direction.values().iter().all(|&v| v == 0.0) {
        return Err(Error::Precondition("direction must be nonzero".into()));
    }
    let m = RayMoments::new(spec, direction)?;
    let mut t = 1.0;
    if m.energy(t) <= 0.0 {
        while t > 1.0 / SCALE_GUARD && m.energy(0.5 * t) <= 0.0 {
            t *= 0.5;
        }
    } else {
        while m.energy(t) > 0.0 {
            t *= 2.0;
            if t > SCALE_GUARD {
                return Err(Error::Diagnostics(format!(
                    "energy stays positive along the ray up to t = {SCALE_GUARD:e}"
                )));
            }
        }
    }
    Ok(Endpoint {
        scale: t,
        energy: m.energy(t),
        point: direction.scaled(t),
    })
}

/// Interior maximum of `t ↦ I(t w)` for `t > 0` from the sign change of the
/// derivative; `None` if the ray has no interior maximum below
/// [`SCALE_GUARD`].
pub fn ray_maximum(m: &RayMoments) -> Option<(f64, f64)> {
    let slope = |t: f64| m.derivative(t) / t;
    if !(m.a > 0.0) || slope(1e-300_f64.max(f64::MIN_POSITIVE)) <= 0.0 {
        return None;
    }
    let mut hi = 1.0;
    while slope(hi) > 0.0 {
        hi *= 2.0;
        if hi > SCALE_GUARD {
            return None;
        }
    }
    let mut lo = 0.5 * hi;
    while slope(lo) <= 0.0 {
        lo *= 0.5;
        if lo < 1.0 / SCALE_GUARD {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Some((t, m.energy(t)))
}

/// Golden-section maximization of `f` on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..400 {
        if hi - lo <= rel_tol * hi.abs() {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Discretized ray path `0 = γ(0), …, γ(1) = e` with per-node energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathState {
    /// Ray parameters of the nodes; the nodes are `scales[j]·direction`.
    pub scales: Vec<f64>,
    pub energies: Vec<f64>,
    pub direction: DiscreteRadialFunction,
}

impl PathState {
    /// Uniform nodes in `t` up to the first dyadic scale with `I ≤ 0`.
    fn along(spec: &ProblemSpec, direction: &DiscreteRadialFunction) -> Result<Self> {
        let end = find_endpoint(spec, direction)?;
        let m = RayMoments::new(spec, direction)?;
        let scales: Vec<f64> = (0..PATH_NODES)
            .map(|j| end.scale * j as f64 / (PATH_NODES - 1) as f64)
            .collect();
        let energies = scales.iter().map(|&t| m.energy(t)).collect();
        Ok(PathState {
            scales,
            energies,
            direction: direction.clone(),
        })
    }

    pub fn max_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One descent sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpaStep {
    pub iteration: usize,
    pub level: f64,
    pub gradient_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpaReport {
    pub level: f64,
    pub iterations: usize,
    /// `‖I'(u*)‖/‖u*‖` in the `H¹₀` norm.
    pub gradient_norm: f64,
    pub converged: bool,
    /// Line search could no longer lower the level.
    pub stalled: bool,
    /// `⟨I'(u*), u*⟩/‖u*‖²`.
    pub nehari: f64,
    pub maximizer: DiscreteRadialFunction,
    pub path: PathState,
    pub trace: Vec<MpaStep>,
}

impl MpaReport {
    /// Columns `iteration,level,gradient_norm,step`.
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iteration,level,gradient_norm,step")?;
        for s in &self.trace {
            writeln!(w, "{},{},{},{}", s.iteration, s.level, s.gradient_norm, s.step)?;
        }
        Ok(())
    }
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;

/// Ray level of `w`, i.e. `max_t I(t w)`, with the maximizer.
fn ray_level(spec: &ProblemSpec, w: &DiscreteRadialFunction) -> Result<Option<(f64, f64)>> {
    Ok(ray_maximum(&RayMoments::new(spec, w)?))
}

/// Mountain-pass level by steepest descent of the ray maximum starting from
/// the ray through `e`.
pub fn mpa_level(spec: &ProblemSpec, e: &DiscreteRadialFunction, iters: usize, tol: f64) -> Result<MpaReport> {
    spec.validate()?;
    if e.values().iter().all(|&v| v == 0.0) {
        return Err(Error::Precondition("endpoint must be nonzero".into()));
    }
    let e_energy = energy(spec, e)?;
    if e_energy > 0.0 {
        return Err(Error::Precondition(format!(
            "endpoint must satisfy I(e) ≤ 0, got {e_energy:e}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let Some((t0, mut level)) = ray_level(spec, e)? else {
        return Err(Error::Precondition("ray through the endpoint has no interior maximum".into()));
    };
    let mut u = e.scaled(t0);
    let mut trace = Vec::new();
    let mut step: f64 = 1.0;
    let mut converged = false;
    let mut stalled = false;
    let mut iterations = 0;
    let mut grad_rel;
    let mut nodal;
    loop {
        nodal = energy_gradient(spec, &u)?;
        let g = sobolev_gradient(&u, &nodal)?;
        let g_sq = h1_seminorm_sq(&g);
        let u_norm = h1_seminorm_sq(&u).sqrt();
        grad_rel = g_sq.sqrt() / u_norm;
        trace.push(MpaStep {
            iteration: iterations,
            level,
            gradient_norm: grad_rel,
            step,
        });
        log::debug!("mpa sweep {iterations}: level {level:.12e}, gradient {grad_rel:.3e}");
        if grad_rel <= tol {
            converged = true;
            break;
        }
        if iterations >= iters {
            break;
        }
        iterations += 1;
        step = (2.0 * step).min(1.0);
        let mut accepted = None;
        while step >= MIN_STEP {
            let vals: Vec<f64> = u.values().iter().zip(g.values()).map(|(a, b)| a - step * b).collect();
            let cand = u.with_values(vals)?;
            if let Some((t, lvl)) = ray_level(spec, &cand)? {
                if lvl <= level - ARMIJO * step * g_sq {
                    accepted = Some((cand.scaled(t), lvl));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((next, lvl)) => {
                u = next;
                level = lvl;
            }
            None => {
                stalled = true;
                converged = true;
                break;
            }
        }
    }
    let nehari = nodal.iter().zip(u.values()).map(|(g, v)| g * v).sum::<f64>() / h1_seminorm_sq(&u);
    let path = PathState::along(spec, &u)?;
    Ok(MpaReport {
        level,
        iterations,
        gradient_norm: grad_rel,
        converged,
        stalled,
        nehari,
        maximizer: u,
        path,
        trace,
    })
}

/// Ray maximizer for one value of λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayMaximum {
    pub lambda: f64,
    pub t: f64,
    pub energy: f64,
}

/// `t_λ = argmax_t I_λ(t u)` for each λ by golden-section search.
pub fn t_lambda_curve(spec: &ProblemSpec, u: &DiscreteRadialFunction, lambdas: &[f64]) -> Result<Vec<RayMaximum>> {
    if u.values().iter().any(|&v| v < 0.0) || u.values().iter().all(|&v| v == 0.0) {
        return Err(Error::Precondition("test function must be nonnegative and nonzero".into()));
    }
    spec.validate()?;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let s = spec.clone().with_lambda(lambda);
            let m = RayMoments::new(&s, u)?;
            let degenerate = || Error::Diagnostics(format!("ray at lambda = {lambda} has no interior maximum"));
            // bracket: first dyadic scale where the energy turns down
            let mut hi = 1.0;
            while m.derivative(hi) > 0.0 {
                hi *= 2.0;
                if hi > SCALE_GUARD {
                    return Err(degenerate());
                }
            }
            let t = golden_section_max(|t| m.energy(t), 0.0, hi, 1e-12);
            if !(t > 0.0) || !(m.energy(t) > 0.0) {
                return Err(degenerate());
            }
            Ok(RayMaximum {
                lambda,
                t,
                energy: m.energy(t),
            })
        })
        .collect()
}

/// `⟨I'(u), w⟩` in `H¹₀` for diagnostics.
pub fn directional_derivative(
    spec: &ProblemSpec,
    u: &DiscreteRadialFunction,
    w: &DiscreteRadialFunction,
) -> Result<f64> {
    let g = sobolev_gradient(u, &energy_gradient(spec, u)?)?;
    h1_inner(&g, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{sobolev_constant, weighted_lp};
    use crate::problem::{CoefficientModel, Nonlinearity};
    use crate::radial_ode::find_dirichlet_solution;
    use approx::assert_relative_eq;

    fn perturbed_critical() -> ProblemSpec {
        ProblemSpec::pure_critical(3).with_perturbation(
            1.0,
            CoefficientModel::power_law(1.0, 0.5),
            Nonlinearity::pure_power(5.0),
        )
    }

    #[test]
    fn geometry_of_perturbed_critical_problem() {
        let rep = verify_mp_geometry_on(&perturbed_critical(), 0.1, 64, 7, 1024).unwrap();
        assert!(rep.a_estimate > 0.0);
        assert!(rep.ray_ok);
        assert!(!rep.geometry_failed);
        let again = verify_mp_geometry_on(&perturbed_critical(), 0.1, 64, 7, 1024).unwrap();
        assert_eq!(rep, again);
    }

    #[test]
    fn geometry_failure_is_reported() {
        // the rim sits far beyond the mountain
        let rep = verify_mp_geometry_on(&perturbed_critical(), 100.0, 8, 1, 512).unwrap();
        assert!(rep.geometry_failed);
        assert!(verify_mp_geometry(&perturbed_critical(), 0.0, 8, 1).is_err());
    }

    #[test]
    fn endpoint_examples() {
        let spec = ProblemSpec::power(3, 3.0, CoefficientModel::constant(1.0));
        let sol = find_dirichlet_solution(&spec, (0.1, 100.0), 1e-10).unwrap();
        let u = DiscreteRadialFunction::from_profile(sol.profile().unwrap(), 1024).unwrap();
        let e = find_endpoint(&spec, &u).unwrap();
        assert!(e.energy <= 0.0 && e.scale.is_finite());
        let e2 = find_endpoint(&spec, &u.scaled(2.0)).unwrap();
        assert!(e2.scale < e.scale);
        assert_relative_eq!(e2.scale, 0.5 * e.scale);
        let zero = DiscreteRadialFunction::from_fn(3, 16, |_| 0.0).unwrap();
        assert!(matches!(find_endpoint(&spec, &zero), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_endpoint_rejected() {
        let zero = DiscreteRadialFunction::from_fn(3, 16, |_| 0.0).unwrap();
        assert!(matches!(mpa_level(&perturbed_critical(), &zero, 10, 1e-4), Err(Error::Precondition(_))));
        let small = DiscreteRadialFunction::from_fn(3, 64, |r| 0.01 * (1.0 - r)).unwrap();
        assert!(matches!(mpa_level(&perturbed_critical(), &small, 10, 1e-4), Err(Error::Precondition(_))));
    }

    #[test]
    fn ray_maximum_matches_calculus() {
        // λ = 0 critical: t^{2*−2} = ‖u‖²/‖u‖_{2*}^{2*}
        let spec = ProblemSpec::pure_critical(3);
        let u = DiscreteRadialFunction::from_fn(3, 512, |r| (1.0 - r * r) * (1.0 + r)).unwrap();
        let t_oracle = (h1_seminorm_sq(&u) / weighted_lp(&u, 6.0, 0.0)).powf(0.25);
        let (t, _) = ray_maximum(&RayMoments::new(&spec, &u).unwrap()).unwrap();
        assert_relative_eq!(t, t_oracle, max_relative = 1e-12);
        let curve = t_lambda_curve(&spec, &u, &[0.0]).unwrap();
        assert_relative_eq!(curve[0].t, t_oracle, max_relative = 1e-8);
    }

    #[test]
    fn subcritical_level_matches_shooting_energy() {
        let spec = ProblemSpec::power(3, 3.0, CoefficientModel::constant(1.0));
        let sol = find_dirichlet_solution(&spec, (0.1, 100.0), 1e-10).unwrap();
        let u_shoot = DiscreteRadialFunction::from_profile(sol.profile().unwrap(), DEFAULT_CELLS).unwrap();
        let shoot_energy = energy(&spec, &u_shoot).unwrap();
        let start = DiscreteRadialFunction::from_fn(3, DEFAULT_CELLS, |r| 1.0 - r).unwrap();
        let e = find_endpoint(&spec, &start).unwrap();
        let rep = mpa_level(&spec, &e.point, 400, 1e-5).unwrap();
        assert!((rep.level - shoot_energy).abs() / shoot_energy < 0.02, "{} vs {}", rep.level, shoot_energy);
        assert!(rep.trace.windows(2).all(|w| w[1].level <= w[0].level));
        assert!(rep.nehari.abs() < 1e-6);
        assert!(rep.path.energies[0] == 0.0 && *rep.path.energies.last().unwrap() <= 0.0);
        assert_eq!(rep.path.scales.len(), PATH_NODES);
        assert!(rep.level >= rep.path.max_energy() - 1e-12);
    }

    #[test]
    fn t_lambda_decreases_for_annulus_bump() {
        let spec = ProblemSpec::pure_critical(3).with_perturbation(
            1.0,
            CoefficientModel::power_law(1.0, 1.0),
            Nonlinearity::pure_power(3.0),
        );
        let bump = DiscreteRadialFunction::from_fn(3, 1024, |r| {
            if (0.1..=0.9).contains(&r) {
                (std::f64::consts::PI * (r - 0.1) / 0.8).sin().powi(2)
            } else {
                0.0
            }
        })
        .unwrap();
        let curve = t_lambda_curve(&spec, &bump, &[1.0, 10.0, 100.0]).unwrap();
        assert!(curve.windows(2).all(|w| w[1].t < w[0].t));
        let s = sobolev_constant(3, 1e-8).unwrap();
        let big = t_lambda_curve(&spec, &bump, &[100.0, 1000.0]).unwrap();
        assert!(big.iter().all(|m| m.energy < s.powf(1.5) / 3.0));
        let neg = bump.scaled(-1.0);
        assert!(t_lambda_curve(&spec, &neg, &[1.0]).is_err());
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let t = golden_section_max(|x| -(x - 0.7).powi(2), 0.0, 4.0, 1e-12);
        assert!((t - 0.7).abs() < 1e-8);
    }

    #[test]
    fn report_round_trips_through_json() {
        let spec = ProblemSpec::power(3, 3.0, CoefficientModel::constant(1.0));
        let start = DiscreteRadialFunction::from_fn(3, 128, |r| 1.0 - r).unwrap();
        let e = find_endpoint(&spec, &start).unwrap();
        let rep = mpa_level(&spec, &e.point, 5, 1e-12).unwrap();
        assert!(!rep.converged);
        let json = serde_json::to_string(&rep).unwrap();
        let back: MpaReport = serde_json::from_str(&json).unwrap();
        assert_eq!(rep, back);
        let mut csv = Vec::new();
        rep.write_trace_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), rep.trace.len() + 1);
    }
}
