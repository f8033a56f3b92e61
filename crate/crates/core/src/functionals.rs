//! Radial quadrature, energies, the Sobolev constant and Talenti bubbles.
//!
//! Radial functions live on the graded mesh `r_i = (i/M)²` and are
//! piecewise linear in `r`. Every integral carries the surface measure
//! `ω_N r^{N−1}` so the numbers are integrals over the ball in ℝᴺ.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{f4_threshold, sobolev_exponent, Nonlinearity, ProblemSpec};
use crate::quadrature::{gauss5, integrate};
use crate::radial_ode::RadialProfile;

/// Default number of mesh cells.
pub const DEFAULT_CELLS: usize = 4096;

/// Area of the unit sphere in ℝᴺ, `2π^{N/2}/Γ(N/2)`.
pub fn sphere_area(n: u32) -> f64 {
    // Γ(N/2) by recursion from Γ(1) = 1 or Γ(1/2) = √π
    let mut gamma = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < 0.5 * n as f64 - 1e-12 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(0.5 * n as f64) / gamma
}

/// Graded nodes `(i/M)²`, `i = 0..=M`.
pub fn graded_mesh(cells: usize) -> Arc<[f64]> {
    let m = cells as f64;
    (0..=cells).map(|i| (i as f64 / m).powi(2)).collect()
}

/// Piecewise-linear radial function on a mesh of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRadialFunction")]
pub struct DiscreteRadialFunction {
    dimension: u32,
    nodes: Arc<[f64]>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawRadialFunction {
    dimension: u32,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawRadialFunction> for DiscreteRadialFunction {
    type Error = Error;

    fn try_from(raw: RawRadialFunction) -> Result<Self> {
        Self::without_trace(raw.dimension, raw.nodes.into(), raw.values)
    }
}

impl DiscreteRadialFunction {
    /// Checks the mesh and the zero trace at `r = 1`.
    pub fn new(dimension: u32, nodes: Arc<[f64]>, values: Vec<f64>) -> Result<Self> {
        let f = Self::without_trace(dimension, nodes, values)?;
        if *f.values.last().unwrap() != 0.0 {
            return Err(Error::Domain(format!(
                "radial function must vanish at r = 1, got {}",
                f.values.last().unwrap()
            )));
        }
        Ok(f)
    }

    /// Same checks as [`new`](Self::new) except the boundary condition.
    pub fn without_trace(dimension: u32, nodes: Arc<[f64]>, values: Vec<f64>) -> Result<Self> {
        if dimension < 3 {
            return Err(Error::Domain(format!("dimension must be ≥ 3, got {dimension}")));
        }
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::Domain(format!(
                "mesh has {} nodes for {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("mesh must increase strictly from 0 to 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("nodal values must be finite".into()));
        }
        Ok(DiscreteRadialFunction {
            dimension,
            nodes,
            values,
        })
    }

    /// Samples `f` on the graded mesh with `cells` cells and pins `u(1) = 0`.
    pub fn from_fn(dimension: u32, cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = graded_mesh(cells);
        let mut values: Vec<f64> = nodes.iter().map(|&r| f(r)).collect();
        *values.last_mut().unwrap() = 0.0;
        Self::new(dimension, nodes, values)
    }

    /// Samples `f` on the graded mesh without touching the boundary value.
    pub fn from_fn_without_trace(dimension: u32, cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = graded_mesh(cells);
        let values = nodes.iter().map(|&r| f(r)).collect();
        Self::without_trace(dimension, nodes, values)
    }

    pub fn zeros(dimension: u32, nodes: Arc<[f64]>) -> Result<Self> {
        let values = vec![0.0; nodes.len()];
        Self::new(dimension, nodes, values)
    }

    /// Interpolates a Dirichlet profile onto the graded mesh.
    pub fn from_profile(profile: &RadialProfile, cells: usize) -> Result<Self> {
        if !profile.covers_unit_interval() {
            return Err(Error::Precondition("profile does not cover [0, 1]".into()));
        }
        Self::from_fn(profile.spec.dimension, cells, |r| profile.sample(r).0)
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn nodes(&self) -> &Arc<[f64]> {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Same mesh, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::without_trace(self.dimension, self.nodes.clone(), values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        DiscreteRadialFunction {
            dimension: self.dimension,
            nodes: self.nodes.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Linear interpolation at `r`.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.values[0];
        }
        if r >= 1.0 {
            return *self.values.last().unwrap();
        }
        let i = (self.nodes.partition_point(|&x| x <= r) - 1).min(self.cells() - 1);
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let t = (r - a) / (b - a);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Largest node value and where it sits.
    pub fn max_value(&self) -> (f64, f64) {
        let (i, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        (self.nodes[i], v)
    }

    /// `ω ∫₀¹ g(r, u(r)) r^{N−1} dr` with five Gauss points per cell.
    pub fn integrate_radial(&self, mut g: impl FnMut(f64, f64) -> f64) -> f64 {
        let n1 = self.dimension as f64 - 1.0;
        let mut total = 0.0;
        for i in 0..self.cells() {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            let (ua, ub) = (self.values[i], self.values[i + 1]);
            let h = b - a;
            total += gauss5(a, b, |r| {
                let u = ua + (ub - ua) * (r - a) / h;
                g(r, u) * r.powf(n1)
            });
        }
        total * sphere_area(self.dimension)
    }
}

fn check_same_mesh(u: &DiscreteRadialFunction, w: &DiscreteRadialFunction) -> Result<()> {
    if u.dimension != w.dimension || !Arc::ptr_eq(&u.nodes, &w.nodes) && u.nodes != w.nodes {
        return Err(Error::Precondition("functions live on different meshes".into()));
    }
    Ok(())
}

/// Per-cell stiffness `ω (r_{i+1}^N − r_i^N)/(N h_i²)`.
fn stiffness(u: &DiscreteRadialFunction) -> Vec<f64> {
    let n = u.dimension as f64;
    let omega = sphere_area(u.dimension);
    u.nodes
        .windows(2)
        .map(|w| {
            let h = w[1] - w[0];
            omega * (w[1].powf(n) - w[0].powf(n)) / (n * h * h)
        })
        .collect()
}

/// `∫_B |∇u|²`, exact for piecewise-linear `u`.
pub fn h1_seminorm_sq(u: &DiscreteRadialFunction) -> f64 {
    stiffness(u)
        .iter()
        .zip(u.values.windows(2))
        .map(|(k, v)| k * (v[1] - v[0]).powi(2))
        .sum()
}

/// `∫_B ∇u·∇w` on a shared mesh.
pub fn h1_inner(u: &DiscreteRadialFunction, w: &DiscreteRadialFunction) -> Result<f64> {
    check_same_mesh(u, w)?;
    Ok(stiffness(u)
        .iter()
        .zip(u.values.windows(2).zip(w.values.windows(2)))
        .map(|(k, (a, b))| k * (a[1] - a[0]) * (b[1] - b[0]))
        .sum())
}

/// `∫_B |x|^{m s} |u|^s dx`.
pub fn weighted_lp(u: &DiscreteRadialFunction, s: f64, m: f64) -> f64 {
    let e = m * s;
    u.integrate_radial(|r, v| {
        let w = if e == 0.0 { 1.0 } else { r.powf(e) };
        w * v.abs().powf(s)
    })
}

/// `‖u‖_{L^{2*}}`.
pub fn critical_norm(u: &DiscreteRadialFunction) -> f64 {
    let s = sobolev_exponent(u.dimension);
    weighted_lp(u, s, 0.0).powf(1.0 / s)
}

/// `∫|∇u|² / ‖u‖²_{L^{2*}}`; infinite for `u ≡ 0`.
pub fn rayleigh_quotient(u: &DiscreteRadialFunction) -> f64 {
    let den = critical_norm(u);
    if den == 0.0 {
        return f64::INFINITY;
    }
    h1_seminorm_sq(u) / (den * den)
}

fn check_dimension(spec: &ProblemSpec, u: &DiscreteRadialFunction) -> Result<()> {
    if spec.dimension != u.dimension {
        return Err(Error::Precondition(format!(
            "problem is posed in dimension {}, function in {}",
            spec.dimension, u.dimension
        )));
    }
    Ok(())
}

/// `I(u) = ½‖u‖² − ∫ c u₊^{p+1}/(p+1) − λ ∫ k F(u)`.
pub fn energy(spec: &ProblemSpec, u: &DiscreteRadialFunction) -> Result<f64> {
    check_dimension(spec, u)?;
    Ok(0.5 * h1_seminorm_sq(u) - u.integrate_radial(|r, v| spec.potential(r, v)))
}

/// Nodal derivative `∂I/∂u_i` of the discrete energy. The boundary entry is
/// zero.
pub fn energy_gradient(spec: &ProblemSpec, u: &DiscreteRadialFunction) -> Result<Vec<f64>> {
    check_dimension(spec, u)?;
    let k = stiffness(u);
    let n1 = u.dimension as f64 - 1.0;
    let omega = sphere_area(u.dimension);
    let m = u.cells();
    let mut g = vec![0.0; m + 1];
    for i in 0..m {
        let du = u.values[i + 1] - u.values[i];
        g[i] -= k[i] * du;
        g[i + 1] += k[i] * du;
        let (a, b) = (u.nodes[i], u.nodes[i + 1]);
        let (ua, ub) = (u.values[i], u.values[i + 1]);
        let h = b - a;
        let (mut left, mut right) = (0.0, 0.0);
        let half = 0.5 * h;
        for (x, w) in crate::quadrature::GL5_NODES.iter().zip(crate::quadrature::GL5_WEIGHTS.iter()) {
            let t = 0.5 * (1.0 + x);
            let r = a + t * h;
            let src = spec.rhs(r, ua + (ub - ua) * t) * r.powf(n1) * w * half * omega;
            left += src * (1.0 - t);
            right += src * t;
        }
        g[i] -= left;
        g[i + 1] -= right;
    }
    g[m] = 0.0;
    Ok(g)
}

/// Riesz representative in `H¹₀` of a nodal functional: solves `K w = g`
/// with the P1 stiffness matrix and `w(1) = 0`.
pub fn sobolev_gradient(u: &DiscreteRadialFunction, g: &[f64]) -> Result<DiscreteRadialFunction> {
    let m = u.cells();
    if g.len() != m + 1 {
        return Err(Error::Precondition(format!("gradient has {} entries, mesh {}", g.len(), m + 1)));
    }
    let k = stiffness(u);
    // Thomas algorithm on nodes 0..m-1
    let mut diag: Vec<f64> = (0..m).map(|i| k[i] + if i > 0 { k[i - 1] } else { 0.0 }).collect();
    let mut rhs: Vec<f64> = g[..m].to_vec();
    for i in 1..m {
        let factor = -k[i - 1] / diag[i - 1];
        diag[i] += factor * k[i - 1];
        rhs[i] -= factor * rhs[i - 1];
    }
    let mut w = vec![0.0; m + 1];
    w[m - 1] = rhs[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        w[i] = (rhs[i] + k[i] * w[i + 1]) / diag[i];
    }
    DiscreteRadialFunction::new(u.dimension, u.nodes.clone(), w)
}

/// Homogeneous pieces of the energy along a ray:
/// `I(t u) = a t²/2 − b_main t^{p+1} − λ b_pert t^{q+1}` for `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayMoments {
    pub a: f64,
    pub b_main: f64,
    pub main_degree: f64,
    pub b_pert: f64,
    pub pert_degree: f64,
    pub lambda: f64,
}

impl RayMoments {
    pub fn new(spec: &ProblemSpec, u: &DiscreteRadialFunction) -> Result<Self> {
        check_dimension(spec, u)?;
        let p1 = spec.main_exponent + 1.0;
        let b_main = u.integrate_radial(|r, v| {
            if v > 0.0 {
                spec.main_coefficient.value(r) * v.powf(p1) / p1
            } else {
                0.0
            }
        });
        let (b_pert, pert_degree) = match spec.f.exponent() {
            Some(q) if spec.lambda != 0.0 => (
                u.integrate_radial(|r, v| spec.k.value(r) * spec.f.primitive(v)),
                q + 1.0,
            ),
            _ => (0.0, 2.0),
        };
        Ok(RayMoments {
            a: h1_seminorm_sq(u),
            b_main,
            main_degree: p1,
            b_pert,
            pert_degree,
            lambda: spec.lambda,
        })
    }

    pub fn energy(&self, t: f64) -> f64 {
        0.5 * self.a * t * t - self.b_main * t.powf(self.main_degree) - self.lambda * self.b_pert * t.powf(self.pert_degree)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.a * t
            - self.main_degree * self.b_main * t.powf(self.main_degree - 1.0)
            - self.lambda * self.pert_degree * self.b_pert * t.powf(self.pert_degree - 1.0)
    }
}

/// Cutoff radii and concentration of a Talenti bubble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleParams {
    pub epsilon: f64,
    pub eta: f64,
    pub delta_c: f64,
}

impl BubbleParams {
    pub fn new(epsilon: f64, eta: f64, delta_c: f64) -> Result<Self> {
        let p = BubbleParams { epsilon, eta, delta_c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let BubbleParams { epsilon, eta, delta_c } = *self;
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(0.0 < eta && eta < delta_c && delta_c <= 1.0) {
            return Err(Error::Domain(format!(
                "need 0 < eta < delta_c ≤ 1, got eta = {eta}, delta_c = {delta_c}"
            )));
        }
        if epsilon > eta {
            return Err(Error::Domain(format!(
                "epsilon = {epsilon} exceeds the plateau radius eta = {eta}"
            )));
        }
        Ok(())
    }

    /// Whether the concentration scale is well inside the plateau.
    pub fn is_separated(&self) -> bool {
        self.epsilon <= self.eta / 10.0
    }

    /// `ψ(r)` and `ψ'(r)`: quintic smoothstep from 1 at `η` to 0 at `δ_c`.
    pub fn cutoff(&self, r: f64) -> (f64, f64) {
        if r <= self.eta {
            return (1.0, 0.0);
        }
        if r >= self.delta_c {
            return (0.0, 0.0);
        }
        let w = self.delta_c - self.eta;
        let s = (r - self.eta) / w;
        let step = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
        let dstep = 30.0 * s * s * (1.0 - s) * (1.0 - s);
        (1.0 - step, -dstep / w)
    }

    /// `ψU_ε` and its derivative, unnormalized.
    pub fn truncated(&self, n: u32, r: f64) -> (f64, f64) {
        let (psi, dpsi) = self.cutoff(r);
        if psi == 0.0 && dpsi == 0.0 {
            return (0.0, 0.0);
        }
        let half = 0.5 * (n as f64 - 2.0);
        let e2 = self.epsilon * self.epsilon;
        let s = e2 + r * r;
        let u = self.epsilon.powf(half) * s.powf(-half);
        let du = -2.0 * half * r * u / s;
        (psi * u, dpsi * u + psi * du)
    }
}

/// `v_ε = ψU_ε/‖ψU_ε‖_{L^{2*}}` on the default graded mesh.
pub fn bubble(params: &BubbleParams, n: u32) -> Result<DiscreteRadialFunction> {
    bubble_on(params, n, DEFAULT_CELLS)
}

pub fn bubble_on(params: &BubbleParams, n: u32, cells: usize) -> Result<DiscreteRadialFunction> {
    params.validate()?;
    let raw = DiscreteRadialFunction::from_fn(n, cells, |r| params.truncated(n, r).0)?;
    let norm = critical_norm(&raw);
    Ok(raw.scaled(norm.recip()))
}

/// Sobolev constant with the spread between the two evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevEstimate {
    pub value: f64,
    /// Relative disagreement of the two quadratures.
    pub spread: f64,
}

/// Whole-space Talenti quotient with `r = tan θ` and composite
/// Gauss–Legendre in `θ`.
fn talenti_quotient_angular(n: u32, panels: usize) -> f64 {
    let nf = n as f64;
    let (mut grad, mut mass) = (0.0, 0.0);
    let h = 0.5 * PI / panels as f64;
    for j in 0..panels {
        let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
        grad += gauss5(a, b, |t| t.sin().powf(nf + 1.0) * t.cos().powf(nf - 3.0));
        mass += gauss5(a, b, |t| t.sin().powf(nf - 1.0) * t.cos().powf(nf - 1.0));
    }
    quotient_from_integrals(n, (nf - 2.0).powi(2) * grad, mass)
}

/// Same quotient with `r = t/(1 − t)` and adaptive Gauss–Kronrod.
fn talenti_quotient_adaptive(n: u32, tol: f64) -> Result<f64> {
    let nf = n as f64;
    let breaks = [0.0, 0.25, 0.5, 0.75, 1.0];
    let radial = |t: f64| (t / (1.0 - t), (1.0 - t).powi(-2));
    let grad = integrate(
        |t| {
            let (r, jac) = radial(t);
            r.powf(nf + 1.0) * (1.0 + r * r).powf(-nf) * jac
        },
        &breaks,
        tol,
        0.0,
        4000,
    )?;
    let mass = integrate(
        |t| {
            let (r, jac) = radial(t);
            r.powf(nf - 1.0) * (1.0 + r * r).powf(-nf) * jac
        },
        &breaks,
        tol,
        0.0,
        4000,
    )?;
    Ok(quotient_from_integrals(n, (nf - 2.0).powi(2) * grad, mass))
}

/// `ω A / (ω B)^{2/2*}`.
fn quotient_from_integrals(n: u32, grad: f64, mass: f64) -> f64 {
    let omega = sphere_area(n);
    omega * grad / (omega * mass).powf(2.0 / sobolev_exponent(n))
}

/// Best constant of `S ‖u‖²_{L^{2*}} ≤ ‖∇u‖²_{L²}`, from the Talenti
/// quotient evaluated by two unrelated quadratures.
pub fn sobolev_estimate(n: u32, tol: f64) -> Result<SobolevEstimate> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension must be ≥ 3, got {n}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let a = talenti_quotient_angular(n, 256);
    let b = talenti_quotient_adaptive(n, (0.01 * tol).max(1e-14))?;
    let spread = (a - b).abs() / a.abs();
    if spread > tol {
        return Err(Error::Accuracy {
            message: format!("Sobolev constant estimates disagree by {spread:e}"),
            partial: a,
        });
    }
    Ok(SobolevEstimate { value: a, spread })
}

pub fn sobolev_constant(n: u32, tol: f64) -> Result<f64> {
    Ok(sobolev_estimate(n, tol)?.value)
}

/// One rung of the concentration ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRow {
    pub epsilon: f64,
    pub norm_sq_minus_s: f64,
    pub weighted_integral: f64,
    pub j_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub dimension: u32,
    pub gamma: f64,
    pub q: f64,
    pub sobolev: f64,
    pub rows: Vec<ExpansionRow>,
    /// Fitted exponent of `‖v_ε‖² − S`.
    pub slope_norm: f64,
    /// Fitted exponent of `∫|x|^γ v_ε^{q+1}`.
    pub slope_weighted: f64,
    pub predicted_a: f64,
    /// Whether `q` exceeds the growth threshold, so that `ε^a` also beats
    /// the `O(ε^{N−2})` remainder of the energy expansion.
    pub above_threshold: bool,
}

impl ExpansionReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "epsilon,norm_sq_minus_S,weighted_integral,J_eps")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{}",
                row.epsilon, row.norm_sq_minus_s, row.weighted_integral, row.j_eps
            )?;
        }
        Ok(())
    }
}

/// `γ + N − (N−2)(q+1)/2`.
pub fn predicted_exponent(n: u32, gamma: f64, q: f64) -> f64 {
    let nf = n as f64;
    gamma + nf - (nf - 2.0) * (q + 1.0) / 2.0
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Integrals of the truncated bubble evaluated on the smooth function
/// rather than a mesh: `(∫|∇w|², ∫|w|^{2*}, ∫|x|^γ |w|^{q+1})`.
fn bubble_integrals(params: &BubbleParams, n: u32, gamma: f64, q: f64) -> Result<(f64, f64, f64)> {
    let nf = n as f64;
    let omega = sphere_area(n);
    let crit = sobolev_exponent(n);
    let eps = params.epsilon;
    let mut breaks = vec![0.0];
    for k in [1.0, 10.0, 100.0] {
        if k * eps < params.eta {
            breaks.push(k * eps);
        }
    }
    breaks.extend([params.eta, params.delta_c]);
    let tol = 1e-13;
    let grad = integrate(
        |r| params.truncated(n, r).1.powi(2) * r.powf(nf - 1.0),
        &breaks,
        tol,
        0.0,
        20_000,
    )?;
    let mass = integrate(
        |r| params.truncated(n, r).0.abs().powf(crit) * r.powf(nf - 1.0),
        &breaks,
        tol,
        0.0,
        20_000,
    )?;
    let weighted = integrate(
        |r| params.truncated(n, r).0.abs().powf(q + 1.0) * r.powf(gamma + nf - 1.0),
        &breaks,
        tol,
        0.0,
        20_000,
    )?;
    Ok((omega * grad, omega * mass, omega * weighted))
}

/// Concentration ladder for the bubble energy expansions with the default
/// cutoff `η = 1/2`, `δ_c = 1`.
pub fn expansion_check(n: u32, gamma: f64, q: f64, ladder: &[f64]) -> Result<ExpansionReport> {
    expansion_check_with(n, gamma, q, ladder, (0.5, 1.0))
}

pub fn expansion_check_with(
    n: u32,
    gamma: f64,
    q: f64,
    ladder: &[f64],
    cutoff: (f64, f64),
) -> Result<ExpansionReport> {
    if ladder.len() < 4 {
        return Err(Error::Precondition(format!(
            "need at least 4 concentrations, got {}",
            ladder.len()
        )));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("concentration ladder must decrease".into()));
    }
    let threshold = f4_threshold(n, gamma)?;
    // the weighted integral scales like ε^a only when its blow-up profile is
    // integrable over the whole space
    let nf = n as f64;
    if !(q >= 1.0 && (nf - 2.0) * (q + 1.0) > gamma + nf) {
        return Err(Error::Domain(format!(
            "q = {q} is too small for the weighted integral to concentrate (need (N-2)(q+1) > γ + N)"
        )));
    }
    let params: Vec<BubbleParams> = ladder
        .iter()
        .map(|&eps| {
            let p = BubbleParams::new(eps, cutoff.0, cutoff.1)?;
            if !p.is_separated() {
                return Err(Error::Domain(format!(
                    "epsilon = {eps} is not well inside the plateau eta = {}",
                    cutoff.0
                )));
            }
            Ok(p)
        })
        .collect::<Result<_>>()?;
    let sobolev = sobolev_constant(n, 1e-10)?;
    let crit = sobolev_exponent(n);
    let f = Nonlinearity::pure_power(q);
    let rows: Vec<ExpansionRow> = params
        .par_iter()
        .map(|p| {
            let (grad, mass, weighted) = bubble_integrals(p, n, gamma, q)?;
            let norm = mass.powf(1.0 / crit);
            Ok(ExpansionRow {
                epsilon: p.epsilon,
                norm_sq_minus_s: grad / (norm * norm) - sobolev,
                weighted_integral: weighted / norm.powf(q + 1.0),
                j_eps: c30_integral(&f, gamma, n, p.epsilon)?,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(bad) = rows.iter().find(|r| !(r.norm_sq_minus_s > 0.0)) {
        return Err(Error::Calibration(format!(
            "‖v_ε‖² − S = {:e} at epsilon = {}; the Sobolev estimate is too low",
            bad.norm_sq_minus_s, bad.epsilon
        )));
    }
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let diffs: Vec<f64> = rows.iter().map(|r| r.norm_sq_minus_s).collect();
    let weights: Vec<f64> = rows.iter().map(|r| r.weighted_integral).collect();
    Ok(ExpansionReport {
        dimension: n,
        gamma,
        q,
        sobolev,
        slope_norm: loglog_slope(&eps, &diffs),
        slope_weighted: loglog_slope(&eps, &weights),
        predicted_a: predicted_exponent(n, gamma, q),
        above_threshold: q > threshold,
        rows,
    })
}

/// `J(ε) = ε^{γ+2} ∫₀^{1/ε} F[(ε⁻¹/(1+r²))^{(N−2)/2}] r^{γ+N−1} dr`.
pub fn c30_integral(f: &Nonlinearity, gamma: f64, n: u32, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if n < 3 {
        return Err(Error::Domain(format!("dimension must be ≥ 3, got {n}")));
    }
    if matches!(f, Nonlinearity::Zero) {
        return Ok(0.0);
    }
    let nf = n as f64;
    let half = 0.5 * (nf - 2.0);
    let end = eps.recip();
    let mut breaks = vec![0.0, 1.0];
    let mut b = 10.0;
    while b < end {
        breaks.push(b);
        b *= 10.0;
    }
    breaks.push(end);
    let inner = integrate(
        |r| f.primitive((end / (1.0 + r * r)).powf(half)) * r.powf(gamma + nf - 1.0),
        &breaks,
        1e-12,
        0.0,
        20_000,
    )?;
    Ok(eps.powf(gamma + 2.0) * inner)
}
