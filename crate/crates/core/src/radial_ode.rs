//! Radial initial value problem and Dirichlet solutions by shooting.
//!
//! The profile `u(r)` solves
//!
//! ```text
//! u'' + (N−1)/r · u' + rhs(r, u) = 0,   u(0) = d,   u'(0) = 0.
//! ```
//!
//! The `1/r` singularity is removed by starting at a small radius `h₀` from
//! the center expansion with the nonlinearity frozen at `u = d`; this keeps
//! the `r^{2+β}` terms of power-law coefficients, not only the `r²` term.
//! After that an adaptive Dormand–Prince 5(4) pair takes over.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// |u| beyond this is treated as blow-up.
pub const OVERFLOW_GUARD: f64 = 1e12;
/// Shots that stay positive up to this radius are classified positive.
pub const R_MAX_GUARD: f64 = 10.0;
/// Default density of the log-spaced initial-height grid.
pub const POINTS_PER_DECADE: usize = 64;
/// Default range of initial heights scanned for Dirichlet brackets.
pub const DEFAULT_D_RANGE: (f64, f64) = (1e-3, 1e6);

/// Step-size cap, keeps the recorded mesh fine enough for reconstruction.
const DEFAULT_H_MAX: f64 = 1.0 / 64.0;
const MAX_STEPS: usize = 2_000_000;

/// A computed radial function with derivative data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub mesh: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    pub spec: ProblemSpec,
    pub shooting_height: f64,
    /// `u'` at the last mesh point (`u'(1)` for Dirichlet solutions).
    pub boundary_slope: f64,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.mesh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    pub fn end_radius(&self) -> f64 {
        *self.mesh.last().unwrap_or(&0.0)
    }

    /// Whether the mesh reaches `r = 1`.
    pub fn covers_unit_interval(&self) -> bool {
        self.mesh.first() == Some(&0.0) && (self.end_radius() - 1.0).abs() <= 1e-12
    }

    /// Cubic Hermite reconstruction `(u, u')` at `r` inside the mesh.
    pub fn sample(&self, r: f64) -> (f64, f64) {
        let n = self.mesh.len();
        if r <= self.mesh[0] {
            return (self.values[0], self.derivatives[0]);
        }
        if r >= self.mesh[n - 1] {
            return (self.values[n - 1], self.derivatives[n - 1]);
        }
        let i = self.mesh.partition_point(|&x| x <= r) - 1;
        self.hermite(i, r)
    }

    /// Hermite interpolation on segment `[mesh[i], mesh[i+1]]`.
    pub fn hermite(&self, i: usize, r: f64) -> (f64, f64) {
        let (a, b) = (self.mesh[i], self.mesh[i + 1]);
        let h = b - a;
        let t = (r - a) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.derivatives[i] * h, self.derivatives[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let u = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let du = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (u, du)
    }

    /// Columns `r,u,u_prime`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,u,u_prime")?;
        for i in 0..self.mesh.len() {
            writeln!(w, "{},{},{}", self.mesh[i], self.values[i], self.derivatives[i])?;
        }
        Ok(())
    }
}

/// Classification of one shot.
#[derive(Debug, Clone, PartialEq)]
pub enum ShootingOutcome {
    /// `u` vanishes first at `radius`.
    FirstZero { radius: f64, profile: RadialProfile },
    /// `u` stays positive up to `r_end`.
    PositiveAtEnd {
        u_end: f64,
        r_end: f64,
        profile: RadialProfile,
    },
}

impl ShootingOutcome {
    pub fn first_zero(&self) -> Option<f64> {
        match self {
            ShootingOutcome::FirstZero { radius, .. } => Some(*radius),
            ShootingOutcome::PositiveAtEnd { .. } => None,
        }
    }

    pub fn profile(&self) -> &RadialProfile {
        match self {
            ShootingOutcome::FirstZero { profile, .. }
            | ShootingOutcome::PositiveAtEnd { profile, .. } => profile,
        }
    }
}

/// Integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct IvpOptions {
    /// Relative local error allowed per step.
    pub tol: f64,
    pub h_max: f64,
    pub overflow_guard: f64,
    /// Stop at the first sign change of `u`.
    pub stop_at_zero: bool,
    /// Record the accepted mesh.
    pub record: bool,
}

impl IvpOptions {
    pub fn new(tol: f64) -> Self {
        IvpOptions {
            tol,
            h_max: DEFAULT_H_MAX,
            overflow_guard: OVERFLOW_GUARD,
            stop_at_zero: true,
            record: true,
        }
    }
}

/// Raw integration result.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub mesh: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    /// Last state reached.
    pub r: f64,
    pub u: f64,
    pub du: f64,
    pub first_zero: Option<f64>,
    pub steps: usize,
}

type State = [f64; 2];

struct RadialSystem<'a> {
    spec: &'a ProblemSpec,
    curvature: f64,
}

impl RadialSystem<'_> {
    #[inline]
    fn eval(&self, r: f64, y: &State) -> State {
        [y[1], -self.curvature * y[1] / r - self.spec.rhs(r, y[0])]
    }

    /// One Dormand–Prince step; returns the fifth-order solution and the
    /// embedded error vector.
    fn dp_step(&self, r: f64, y: &State, k1: &State, h: f64) -> (State, State, State) {
        const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
        const A21: f64 = 0.2;
        const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
        const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
        const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
        const A6: [f64; 5] = [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
        ];
        const B: [f64; 6] = [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ];
        const E: [f64; 7] = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let comb = |ks: &[&State], coeffs: &[f64]| -> State {
            let mut out = *y;
            for (k, c) in ks.iter().zip(coeffs) {
                out[0] += h * c * k[0];
                out[1] += h * c * k[1];
            }
            out
        };
        let k2 = self.eval(r + C[1] * h, &comb(&[k1], &[A21]));
        let k3 = self.eval(r + C[2] * h, &comb(&[k1, &k2], &A3));
        let k4 = self.eval(r + C[3] * h, &comb(&[k1, &k2, &k3], &A4));
        let k5 = self.eval(r + C[4] * h, &comb(&[k1, &k2, &k3, &k4], &A5));
        let k6 = self.eval(r + C[5] * h, &comb(&[k1, &k2, &k3, &k4, &k5], &A6));
        let y_new = comb(&[k1, &k2, &k3, &k4, &k5, &k6], &B);
        let k7 = self.eval(r + h, &y_new);
        let ks = [k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let mut err = [0.0; 2];
        for (k, e) in ks.iter().zip(E.iter()) {
            err[0] += h * e * k[0];
            err[1] += h * e * k[1];
        }
        (y_new, err, k7)
    }
}

/// Center expansion at radius `h` with the nonlinearity frozen at `u = d`:
///
/// ```text
/// u'(h) = −h^{1−N} ∫₀ʰ tᴺ⁻¹ G(t, d) dt
/// u(h)  = d − (∫₀ʰ t G dt − h^{2−N} ∫₀ʰ tᴺ⁻¹ G dt)/(N − 2)
/// ```
///
/// with the moments of each coefficient model in closed form.
pub fn center_series(spec: &ProblemSpec, d: f64, h: f64) -> (f64, f64) {
    let n = spec.n();
    let main = if d > 0.0 { d.powf(spec.main_exponent) } else { 0.0 };
    let pert = spec.lambda * spec.f.eval(d);
    let moment = |m: f64| {
        main * spec.main_coefficient.moment(m, h)
            + if pert != 0.0 { pert * spec.k.moment(m, h) } else { 0.0 }
    };
    let inner = moment(n - 1.0);
    let first = moment(1.0);
    let du = -inner * h.powf(1.0 - n);
    let u = d - (first - h.powf(2.0 - n) * inner) / (n - 2.0);
    (u, du)
}

/// Series start radius: `min(1e-3, tol^{1/4})` measured in the intrinsic
/// length `rate^{-1/2}` of the shot when that is shorter than one.
fn start_radius(spec: &ProblemSpec, d: f64, tol: f64) -> f64 {
    let base = 1e-3_f64.min(tol.powf(0.25));
    let rate = spec.rate_bound(d);
    let length = if rate > 1.0 { rate.sqrt().recip() } else { 1.0 };
    base * length
}

/// Integrates the radial IVP from the center up to `r_end`.
pub fn integrate_with(spec: &ProblemSpec, d: f64, r_end: f64, opts: &IvpOptions) -> Result<Trajectory> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("initial height must be finite and ≥ 0, got {d}")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if !(r_end > 0.0) || !r_end.is_finite() {
        return Err(Error::Domain(format!("end radius must be positive, got {r_end}")));
    }
    let mut traj = Trajectory {
        mesh: vec![0.0],
        values: vec![d],
        derivatives: vec![0.0],
        r: 0.0,
        u: d,
        du: 0.0,
        first_zero: None,
        steps: 0,
    };
    if d == 0.0 {
        traj.push(r_end, 0.0, 0.0, opts.record);
        return Ok(traj);
    }

    let sys = RadialSystem {
        spec,
        curvature: spec.n() - 1.0,
    };
    let h0 = start_radius(spec, d, opts.tol).min(0.5 * r_end);
    let (u0, du0) = center_series(spec, d, h0);
    traj.push(h0, u0, du0, opts.record);

    let mut r = h0;
    let mut y: State = [u0, du0];
    let mut k1 = sys.eval(r, &y);
    let mut h = h0.min(opts.h_max);
    let mut growth_cap = 3.0;

    while r < r_end {
        if traj.steps >= MAX_STEPS {
            return Err(Error::Accuracy {
                message: format!("step budget exhausted at r = {r}"),
                partial: y[0],
            });
        }
        let last = r + h >= r_end;
        if last {
            h = r_end - r;
        }
        let (y_new, err, k7) = sys.dp_step(r, &y, &k1, h);
        let scale = |i: usize| opts.tol * y[i].abs().max(y_new[i].abs()) + 1e-300;
        let norm = (err[0].abs() / scale(0)).max(err[1].abs() / scale(1));
        if !norm.is_finite() || norm > 1.0 {
            let factor = if norm.is_finite() { (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= factor;
            growth_cap = 1.0;
            if h < 1e-14 * r.max(f64::MIN_POSITIVE) {
                return Err(Error::Accuracy {
                    message: format!("step size underflow at r = {r}"),
                    partial: y[0],
                });
            }
            continue;
        }
        traj.steps += 1;
        let r_new = if last { r_end } else { r + h };

        if y_new[0].abs() > opts.overflow_guard || !y_new[0].is_finite() {
            return Err(Error::Divergence {
                radius: r,
                guard: opts.overflow_guard,
            });
        }

        if opts.stop_at_zero && y_new[0] <= 0.0 {
            let (s, yz) = sys.locate_zero(r, &y, &k1, h);
            let rz = r + s;
            traj.first_zero = Some(rz);
            traj.push(rz, 0.0, yz[1], opts.record);
            return Ok(traj);
        }

        r = r_new;
        y = y_new;
        k1 = k7;
        traj.push(r, y[0], y[1], opts.record);

        let factor = if norm == 0.0 { growth_cap } else { (0.9 * norm.powf(-0.2)).clamp(0.2, growth_cap) };
        h = (h * factor).min(opts.h_max);
        growth_cap = 3.0;
    }
    Ok(traj)
}

impl RadialSystem<'_> {
    /// Finds `s ∈ (0, h]` with `u(r + s) = 0` by Illinois iteration on single
    /// Dormand–Prince steps from the last accepted state.
    fn locate_zero(&self, r: f64, y: &State, k1: &State, h: f64) -> (f64, State) {
        let mut a = 0.0;
        let mut fa = y[0];
        let mut b = h;
        let (mut yb, _, _) = self.dp_step(r, y, k1, h);
        let mut fb = yb[0];
        let mut side = 0;
        for _ in 0..100 {
            if fb == 0.0 || (b - a) <= 1e-15 * (r + b) {
                break;
            }
            let s = (a * fb - b * fa) / (fb - fa);
            let s = if s > a && s < b { s } else { 0.5 * (a + b) };
            let (ys, _, _) = self.dp_step(r, y, k1, s);
            let fs = ys[0];
            if fs > 0.0 {
                a = s;
                fa = fs;
                if side == 1 {
                    fb *= 0.5;
                }
                side = 1;
            } else {
                b = s;
                fb = fs;
                yb = ys;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            }
            if fs.abs() <= 1e-15 * y[0].abs() {
                break;
            }
        }
        (b, yb)
    }
}

impl Trajectory {
    fn push(&mut self, r: f64, u: f64, du: f64, record: bool) {
        if record {
            self.mesh.push(r);
            self.values.push(u);
            self.derivatives.push(du);
        }
        self.r = r;
        self.u = u;
        self.du = du;
    }

    fn into_profile(self, spec: &ProblemSpec, d: f64) -> RadialProfile {
        RadialProfile {
            boundary_slope: self.du,
            mesh: self.mesh,
            values: self.values,
            derivatives: self.derivatives,
            spec: spec.clone(),
            shooting_height: d,
        }
    }
}

/// Integrates `u(0) = d, u'(0) = 0` up to `r_end` or the first zero of `u`.
pub fn integrate_ivp(spec: &ProblemSpec, d: f64, r_end: f64, tol: f64) -> Result<RadialProfile> {
    spec.validate()?;
    let traj = integrate_with(spec, d, r_end, &IvpOptions::new(tol))?;
    Ok(traj.into_profile(spec, d))
}

/// Shoots up to [`R_MAX_GUARD`] and classifies the result.
pub fn shoot(spec: &ProblemSpec, d: f64, tol: f64) -> Result<ShootingOutcome> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("initial height must be positive, got {d}")));
    }
    spec.validate()?;
    let traj = integrate_with(spec, d, R_MAX_GUARD, &IvpOptions::new(tol))?;
    let (first_zero, r, u) = (traj.first_zero, traj.r, traj.u);
    let profile = traj.into_profile(spec, d);
    Ok(match first_zero {
        Some(radius) => ShootingOutcome::FirstZero { radius, profile },
        None => ShootingOutcome::PositiveAtEnd {
            u_end: u,
            r_end: r,
            profile,
        },
    })
}

/// First zero of `u(·; d)` inside `(0, 1]`, or `None` when `u > 0` on `[0, 1]`.
/// Also returns `u(1)` (positive case) or `u'(R)` (zero case).
fn unit_shot(spec: &ProblemSpec, d: f64, tol: f64) -> Result<(Option<f64>, f64)> {
    let mut opts = IvpOptions::new(tol);
    opts.record = false;
    let traj = integrate_with(spec, d, 1.0, &opts)?;
    Ok(match traj.first_zero {
        Some(rz) => (Some(rz), traj.du),
        None => (None, traj.u),
    })
}

/// One sample of the initial-height scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotSample {
    pub d: f64,
    /// First zero inside `(0, 1]`; `None` when the shot is positive at `r = 1`.
    pub first_zero: Option<f64>,
}

/// Record of a Dirichlet search.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanTrace {
    pub shots: Vec<ShotSample>,
    /// Adjacent grid heights between which `R(d) − 1` changes sign.
    pub brackets: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum DirichletOutcome {
    Found { profile: RadialProfile, trace: ScanTrace },
    NotFound { trace: ScanTrace },
}

impl DirichletOutcome {
    pub fn trace(&self) -> &ScanTrace {
        match self {
            DirichletOutcome::Found { trace, .. } | DirichletOutcome::NotFound { trace } => trace,
        }
    }

    pub fn profile(&self) -> Option<&RadialProfile> {
        match self {
            DirichletOutcome::Found { profile, .. } => Some(profile),
            DirichletOutcome::NotFound { .. } => None,
        }
    }
}

/// Log-spaced heights with `per_decade` points per decade, both ends included.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

/// Dirichlet solution `u > 0` on `[0, 1)`, `u(1) = 0` by shooting on `d`.
pub fn find_dirichlet_solution(
    spec: &ProblemSpec,
    d_range: (f64, f64),
    tol: f64,
) -> Result<DirichletOutcome> {
    find_dirichlet_solution_with(spec, d_range, tol, POINTS_PER_DECADE)
}

pub fn find_dirichlet_solution_with(
    spec: &ProblemSpec,
    d_range: (f64, f64),
    tol: f64,
    per_decade: usize,
) -> Result<DirichletOutcome> {
    let (lo, hi) = d_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Precondition(format!("need 0 < d_min < d_max, got [{lo}, {hi}]")));
    }
    spec.validate()?;
    let grid = log_grid(lo, hi, per_decade);
    let shots: Vec<ShotSample> = grid
        .par_iter()
        .map(|&d| unit_shot(spec, d, tol).map(|(first_zero, _)| ShotSample { d, first_zero }))
        .collect::<Result<_>>()?;

    let inside = |s: &ShotSample| s.first_zero.is_some_and(|rz| rz < 1.0);
    let brackets: Vec<(f64, f64)> = shots
        .windows(2)
        .filter(|w| inside(&w[0]) != inside(&w[1]))
        .map(|w| (w[0].d, w[1].d))
        .collect();
    let mut trace = ScanTrace { shots, brackets };
    let Some(&(a, b)) = trace.brackets.first() else {
        return Ok(DirichletOutcome::NotFound { trace });
    };
    let d_star = refine_bracket(spec, a, b, tol)?;
    let mut opts = IvpOptions::new(tol);
    opts.stop_at_zero = false;
    let traj = integrate_with(spec, d_star, 1.0, &opts)?;
    if traj.values.iter().any(|&u| u < 0.0) {
        return Err(Error::Accuracy {
            message: format!("refined shot at d = {d_star} changes sign inside the ball"),
            partial: d_star,
        });
    }
    let profile = traj.into_profile(spec, d_star);
    trace.shots.sort_by(|x, y| x.d.total_cmp(&y.d));
    Ok(DirichletOutcome::Found { profile, trace })
}

/// Signed boundary defect: `u(1)` when positive on `[0, 1]`, otherwise the
/// linearized value `u'(R)(1 − R)` at the first zero `R < 1`.
fn boundary_defect(spec: &ProblemSpec, d: f64, tol: f64) -> Result<f64> {
    let (zero, val) = unit_shot(spec, d, tol)?;
    Ok(match zero {
        Some(rz) if rz < 1.0 => val * (1.0 - rz),
        Some(_) => 0.0,
        None => val,
    })
}

/// Illinois iteration on the boundary defect; returns a height on the
/// positive side with `0 ≤ u(1) ≤ tol`.
fn refine_bracket(spec: &ProblemSpec, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut pa, mut fa) = (a, boundary_defect(spec, a, tol)?);
    let (mut pb, mut fb) = (b, boundary_defect(spec, b, tol)?);
    if fa.signum() == fb.signum() {
        return Err(Error::Accuracy {
            message: format!("bracket [{a}, {b}] lost its sign change"),
            partial: a,
        });
    }
    let mut side = 0;
    for _ in 0..300 {
        let (pos, fpos) = if fa > 0.0 { (pa, fa) } else { (pb, fb) };
        if fpos <= tol {
            return Ok(pos);
        }
        if (pb - pa).abs() <= 4.0 * f64::EPSILON * pa.abs().max(pb.abs()) {
            break;
        }
        let mut c = (pa * fb - pb * fa) / (fb - fa);
        if !(c > pa.min(pb) && c < pa.max(pb)) {
            c = 0.5 * (pa + pb);
        }
        let fc = boundary_defect(spec, c, tol)?;
        if fc.signum() == fa.signum() {
            pa = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            pb = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    let (pos, fpos) = if fa > 0.0 { (pa, fa) } else { (pb, fb) };
    if fpos <= 10.0 * tol {
        return Ok(pos);
    }
    Err(Error::Accuracy {
        message: format!("bisection stalled with u(1) = {fpos:e}"),
        partial: pos,
    })
}

/// Finite-difference weights (Fornberg) for the first derivative at `x0`.
fn first_derivative_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let m = 1;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[1]).collect()
}

/// Stencil width for reconstructing `u''` from nodal `u'`.
const STENCIL: usize = 7;

/// Normalized ODE residual `max |u'' + (N−1)/r u' + rhs| / max |rhs|` over
/// the interior mesh points, with `u''` from a local degree-6 polynomial fit
/// of `u'`.
pub fn residual_check(profile: &RadialProfile) -> Result<f64> {
    let n = profile.len();
    if n < STENCIL {
        return Err(Error::Diagnostics(format!(
            "mesh has {n} points, reconstruction needs at least {STENCIL}"
        )));
    }
    let spec = &profile.spec;
    let curvature = spec.n() - 1.0;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        scale = scale.max(spec.rhs(profile.mesh[i], profile.values[i]).abs());
    }
    for i in 1..n - 1 {
        let start = i.saturating_sub(STENCIL / 2).min(n - STENCIL);
        let xs = &profile.mesh[start..start + STENCIL];
        let w = first_derivative_weights(profile.mesh[i], xs);
        let second: f64 = w
            .iter()
            .zip(&profile.derivatives[start..start + STENCIL])
            .map(|(w, d)| w * d)
            .sum();
        let r = profile.mesh[i];
        let res = second + curvature * profile.derivatives[i] / r + spec.rhs(r, profile.values[i]);
        worst = worst.max(res.abs());
    }
    if scale == 0.0 {
        return Ok(worst);
    }
    Ok(worst / scale)
}
