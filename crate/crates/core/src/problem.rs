//! Equation family, coefficient models and the closed-form thresholds.
//!
//! A [`ProblemSpec`] describes the right-hand side
//! `c(r)·u₊^p + λ·k(r)·f(u)` on the unit ball in dimension `N`. The main
//! coefficient `c` is either a factor given directly (for instance `|x|^α`
//! for the Hénon problem) or `1 + g(r)` through [`CoefficientModel::OnePlus`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of uniform sample points used by the assumption checks.
const SAMPLE_POINTS: usize = 1025;

/// A radial coefficient `r ↦ c(r)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientModel {
    #[default]
    Zero,
    Constant { amplitude: f64 },
    /// `amplitude · r^exponent`, with `exponent ≥ 0`.
    PowerLaw { amplitude: f64, exponent: f64 },
    /// Piecewise-linear interpolation of `(radii, values)`, constant outside
    /// the tabulated range.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
    /// `1 + g(r)`.
    OnePlus { g: Box<CoefficientModel> },
}

impl CoefficientModel {
    pub fn constant(amplitude: f64) -> Self {
        CoefficientModel::Constant { amplitude }
    }

    pub fn power_law(amplitude: f64, exponent: f64) -> Self {
        CoefficientModel::PowerLaw {
            amplitude,
            exponent,
        }
    }

    pub fn one_plus(g: CoefficientModel) -> Self {
        CoefficientModel::OnePlus { g: Box::new(g) }
    }

    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let model = CoefficientModel::Tabulated { radii, values };
        model.validate()?;
        Ok(model)
    }

    /// Structural validation: finite parameters, nonnegative exponents and
    /// strictly increasing tabulated radii.
    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientModel::Zero => Ok(()),
            CoefficientModel::Constant { amplitude } => finite("amplitude", *amplitude),
            CoefficientModel::PowerLaw {
                amplitude,
                exponent,
            } => {
                finite("amplitude", *amplitude)?;
                finite("exponent", *exponent)?;
                if *exponent < 0.0 {
                    return Err(Error::Domain(format!(
                        "power-law exponent must be nonnegative, got {exponent}"
                    )));
                }
                Ok(())
            }
            CoefficientModel::Tabulated { radii, values } => {
                if radii.len() != values.len() {
                    return Err(Error::Format(format!(
                        "tabulated coefficient has {} radii but {} values",
                        radii.len(),
                        values.len()
                    )));
                }
                if radii.len() < 2 {
                    return Err(Error::Format(
                        "tabulated coefficient needs at least two samples".into(),
                    ));
                }
                if radii.iter().chain(values.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::Format("tabulated coefficient has non-finite data".into()));
                }
                if radii.iter().any(|r| !(0.0..=1.0).contains(r)) {
                    return Err(Error::Format("tabulated radii must lie in [0, 1]".into()));
                }
                if radii.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Format(
                        "tabulated radii must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            CoefficientModel::OnePlus { g } => g.validate(),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            CoefficientModel::Zero => 0.0,
            CoefficientModel::Constant { amplitude } => *amplitude,
            CoefficientModel::PowerLaw {
                amplitude,
                exponent,
            } => {
                if *exponent == 0.0 {
                    *amplitude
                } else {
                    amplitude * r.powf(*exponent)
                }
            }
            CoefficientModel::Tabulated { radii, values } => {
                let (i, t) = locate(radii, r);
                match t {
                    None => values[i],
                    Some(t) => values[i] + t * (values[i + 1] - values[i]),
                }
            }
            CoefficientModel::OnePlus { g } => 1.0 + g.value(r),
        }
    }

    /// `c'(r)`. Power laws with exponent below one are singular at the
    /// origin; callers integrate against weights vanishing there.
    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            CoefficientModel::Zero | CoefficientModel::Constant { .. } => 0.0,
            CoefficientModel::PowerLaw {
                amplitude,
                exponent,
            } => {
                if *exponent == 0.0 {
                    0.0
                } else {
                    amplitude * exponent * r.powf(exponent - 1.0)
                }
            }
            CoefficientModel::Tabulated { radii, values } => {
                let (i, t) = locate(radii, r);
                match t {
                    None => 0.0,
                    Some(_) => (values[i + 1] - values[i]) / (radii[i + 1] - radii[i]),
                }
            }
            CoefficientModel::OnePlus { g } => g.derivative(r),
        }
    }

    /// `∫₀ʰ c(t) tᵐ dt` in closed form.
    pub fn moment(&self, m: f64, h: f64) -> f64 {
        match self {
            CoefficientModel::Zero => 0.0,
            CoefficientModel::Constant { amplitude } => amplitude * h.powf(m + 1.0) / (m + 1.0),
            CoefficientModel::PowerLaw {
                amplitude,
                exponent,
            } => amplitude * h.powf(m + 1.0 + exponent) / (m + 1.0 + exponent),
            CoefficientModel::Tabulated { radii, values } => {
                // constant below the first radius, linear pieces after
                let mut total = 0.0;
                let lo_end = radii[0].min(h);
                if lo_end > 0.0 {
                    total += values[0] * lo_end.powf(m + 1.0) / (m + 1.0);
                }
                for i in 0..radii.len() - 1 {
                    let (a, b) = (radii[i], radii[i + 1]);
                    if a >= h {
                        break;
                    }
                    let b_eff = b.min(h);
                    let slope = (values[i + 1] - values[i]) / (b - a);
                    let c0 = values[i] - slope * a;
                    total += c0 * (b_eff.powf(m + 1.0) - a.powf(m + 1.0)) / (m + 1.0)
                        + slope * (b_eff.powf(m + 2.0) - a.powf(m + 2.0)) / (m + 2.0);
                }
                let last = *radii.last().unwrap();
                if h > last {
                    total += values[values.len() - 1] * (h.powf(m + 1.0) - last.powf(m + 1.0))
                        / (m + 1.0);
                }
                total
            }
            CoefficientModel::OnePlus { g } => h.powf(m + 1.0) / (m + 1.0) + g.moment(m, h),
        }
    }

    /// Upper bound of `|c|` on `[0, 1]`, sampled (exact for the closed forms).
    pub fn sup_abs(&self) -> f64 {
        match self {
            CoefficientModel::Zero => 0.0,
            CoefficientModel::Constant { amplitude } => amplitude.abs(),
            CoefficientModel::PowerLaw { amplitude, .. } => amplitude.abs(),
            CoefficientModel::Tabulated { values, .. } => {
                values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
            }
            CoefficientModel::OnePlus { g } => 1.0 + g.sup_abs(),
        }
    }

    /// Minimum over the deterministic sample grid, with its location.
    fn sampled_min(&self) -> (f64, f64) {
        sample_grid()
            .map(|r| (r, self.value(r)))
            .fold((0.0, f64::INFINITY), |best, (r, v)| if v < best.1 { (r, v) } else { best })
    }

    fn sampled_max(&self) -> (f64, f64) {
        sample_grid()
            .map(|r| (r, self.value(r)))
            .fold((0.0, f64::NEG_INFINITY), |best, (r, v)| if v > best.1 { (r, v) } else { best })
    }

    fn is_identically_zero(&self) -> bool {
        match self {
            CoefficientModel::Zero => true,
            CoefficientModel::Constant { amplitude } => *amplitude == 0.0,
            CoefficientModel::PowerLaw { amplitude, .. } => *amplitude == 0.0,
            CoefficientModel::Tabulated { values, .. } => values.iter().all(|v| *v == 0.0),
            CoefficientModel::OnePlus { .. } => sample_grid().all(|r| self.value(r) == 0.0),
        }
    }

    /// Local power at the origin: `Some(β)` when `c(r) ~ C r^β` with `C > 0`
    /// as `r → 0`, `None` when the model vanishes near the origin or the
    /// behaviour cannot be decided in closed form.
    fn origin_power(&self) -> Option<(f64, f64)> {
        match self {
            CoefficientModel::Zero => None,
            CoefficientModel::Constant { amplitude } => {
                (*amplitude > 0.0).then_some((0.0, *amplitude))
            }
            CoefficientModel::PowerLaw {
                amplitude,
                exponent,
            } => (*amplitude > 0.0).then_some((*exponent, *amplitude)),
            CoefficientModel::Tabulated { radii, values } => {
                if radii[0] > 0.0 || values[0] > 0.0 {
                    return (self.value(0.0) > 0.0).then_some((0.0, self.value(0.0)));
                }
                if values[0] < 0.0 {
                    return None;
                }
                let slope = (values[1] - values[0]) / (radii[1] - radii[0]);
                (slope > 0.0).then_some((1.0, slope))
            }
            CoefficientModel::OnePlus { g } => {
                let c0 = 1.0 + g.value(0.0);
                (c0 > 0.0).then_some((0.0, c0))
            }
        }
    }
}

/// Index of the tabulated segment containing `r` and the local coordinate in
/// it, or `None` when `r` is clamped to an end value.
fn locate(radii: &[f64], r: f64) -> (usize, Option<f64>) {
    let n = radii.len();
    if r <= radii[0] {
        return (0, None);
    }
    if r >= radii[n - 1] {
        return (n - 1, None);
    }
    let i = radii.partition_point(|&x| x <= r) - 1;
    let t = (r - radii[i]) / (radii[i + 1] - radii[i]);
    (i, Some(t))
}

fn sample_grid() -> impl Iterator<Item = f64> {
    (0..SAMPLE_POINTS).map(|i| i as f64 / (SAMPLE_POINTS - 1) as f64)
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}

/// Perturbation nonlinearity `f`. All variants vanish for `t ≤ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    #[default]
    Zero,
    /// `f(t) = t₊^q`. `theta` is the declared Ambrosetti–Rabinowitz constant;
    /// when omitted the sharp value `q + 1` is used.
    PurePower {
        q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
    },
}

impl Nonlinearity {
    pub fn pure_power(q: f64) -> Self {
        Nonlinearity::PurePower { q, theta: None }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::PurePower { q, .. } => positive_power(t, *q),
        }
    }

    /// Primitive `F(t) = ∫₀ᵗ f`.
    pub fn primitive(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::PurePower { q, .. } => positive_power(t, q + 1.0) / (q + 1.0),
        }
    }

    /// Homogeneity degree of `f` (so `f(st) = s^q f(t)` for `s > 0`).
    pub fn exponent(&self) -> Option<f64> {
        match self {
            Nonlinearity::Zero => None,
            Nonlinearity::PurePower { q, .. } => Some(*q),
        }
    }

    /// Declared Ambrosetti–Rabinowitz constant θ.
    pub fn theta(&self) -> Option<f64> {
        match self {
            Nonlinearity::Zero => None,
            Nonlinearity::PurePower { q, theta } => Some(theta.unwrap_or(q + 1.0)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Nonlinearity::PurePower { q, theta } = self {
            finite("q", *q)?;
            if *q < 1.0 {
                return Err(Error::Domain(format!("pure-power exponent q must be ≥ 1, got {q}")));
            }
            if let Some(th) = theta {
                finite("theta", *th)?;
            }
        }
        Ok(())
    }
}

/// `t₊^e`.
#[inline]
pub fn positive_power(t: f64, e: f64) -> f64 {
    if t > 0.0 {
        t.powf(e)
    } else {
        0.0
    }
}

/// Full right-hand side of the radial problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblemSpec")]
pub struct ProblemSpec {
    pub dimension: u32,
    pub main_exponent: f64,
    pub main_coefficient: CoefficientModel,
    pub lambda: f64,
    pub k: CoefficientModel,
    pub f: Nonlinearity,
}

#[derive(Deserialize)]
struct RawProblemSpec {
    dimension: u32,
    #[serde(default)]
    main_exponent: Option<f64>,
    #[serde(default = "unit_coefficient")]
    main_coefficient: CoefficientModel,
    #[serde(default)]
    lambda: f64,
    #[serde(default)]
    k: CoefficientModel,
    #[serde(default)]
    f: Nonlinearity,
}

fn unit_coefficient() -> CoefficientModel {
    CoefficientModel::constant(1.0)
}

impl TryFrom<RawProblemSpec> for ProblemSpec {
    type Error = Error;

    fn try_from(raw: RawProblemSpec) -> Result<Self> {
        if raw.dimension < 3 {
            return Err(Error::Domain(format!("dimension must be ≥ 3, got {}", raw.dimension)));
        }
        let spec = ProblemSpec {
            dimension: raw.dimension,
            main_exponent: raw
                .main_exponent
                .unwrap_or_else(|| critical_power(raw.dimension)),
            main_coefficient: raw.main_coefficient,
            lambda: raw.lambda,
            k: raw.k,
            f: raw.f,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `(N+2)/(N−2)`.
pub fn critical_power(n: u32) -> f64 {
    (n as f64 + 2.0) / (n as f64 - 2.0)
}

/// `2* = 2N/(N−2)`.
pub fn sobolev_exponent(n: u32) -> f64 {
    2.0 * n as f64 / (n as f64 - 2.0)
}

impl ProblemSpec {
    /// Parses a TOML problem description; any rejection is a format error.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// `-Δu = u^{(N+2)/(N-2)}`.
    pub fn pure_critical(n: u32) -> Self {
        ProblemSpec {
            dimension: n,
            main_exponent: critical_power(n),
            main_coefficient: CoefficientModel::constant(1.0),
            lambda: 0.0,
            k: CoefficientModel::Zero,
            f: Nonlinearity::Zero,
        }
    }

    /// `-Δu = c(r) u^p`.
    pub fn power(n: u32, p: f64, coefficient: CoefficientModel) -> Self {
        ProblemSpec {
            dimension: n,
            main_exponent: p,
            main_coefficient: coefficient,
            lambda: 0.0,
            k: CoefficientModel::Zero,
            f: Nonlinearity::Zero,
        }
    }

    /// `-Δu = (1 + g(r)) u^{(N+2)/(N-2)}`.
    pub fn critical_with_g(n: u32, g: CoefficientModel) -> Self {
        Self::power(n, critical_power(n), CoefficientModel::one_plus(g))
    }

    /// `-Δu = |x|^α u^p`.
    pub fn henon(n: u32, alpha: f64, p: f64) -> Self {
        Self::power(n, p, CoefficientModel::power_law(1.0, alpha))
    }

    /// Adds the perturbation `λ k(r) f(u)`.
    pub fn with_perturbation(mut self, lambda: f64, k: CoefficientModel, f: Nonlinearity) -> Self {
        self.lambda = lambda;
        self.k = k;
        self.f = f;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn n(&self) -> f64 {
        self.dimension as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 3 {
            return Err(Error::Domain(format!("dimension must be ≥ 3, got {}", self.dimension)));
        }
        finite("main_exponent", self.main_exponent)?;
        if self.main_exponent <= 1.0 {
            return Err(Error::Domain(format!(
                "main exponent must exceed 1, got {}",
                self.main_exponent
            )));
        }
        finite("lambda", self.lambda)?;
        self.main_coefficient.validate()?;
        self.k.validate()?;
        self.f.validate()?;
        let (r, min) = self.main_coefficient.sampled_min();
        if !min.is_finite() || min < 0.0 {
            return Err(Error::Domain(format!(
                "main coefficient must be finite and nonnegative on [0,1]; value {min} at r = {r}"
            )));
        }
        Ok(())
    }

    pub fn is_critical(&self) -> bool {
        (self.main_exponent - critical_power(self.dimension)).abs() <= 1e-12
    }

    /// Right-hand side without argument checks, for use by the integrators
    /// (which may step past `r = 1`).
    #[inline]
    pub fn rhs(&self, r: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let main = self.main_coefficient.value(r) * u.powf(self.main_exponent);
        if self.lambda == 0.0 {
            main
        } else {
            main + self.lambda * self.k.value(r) * self.f.eval(u)
        }
    }

    /// Energy density of the nonlinear terms, `c u₊^{p+1}/(p+1) + λ k F(u)`.
    #[inline]
    pub fn potential(&self, r: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let p = self.main_exponent;
        let main = self.main_coefficient.value(r) * u.powf(p + 1.0) / (p + 1.0);
        if self.lambda == 0.0 {
            main
        } else {
            main + self.lambda * self.k.value(r) * self.f.primitive(u)
        }
    }

    /// Upper bound of `|∂rhs/∂u| / 1` at height `u`, used to pick the
    /// intrinsic length scale of a shot.
    pub(crate) fn rate_bound(&self, u: f64) -> f64 {
        let u = u.abs();
        let p = self.main_exponent;
        let mut rate = p * self.main_coefficient.sup_abs() * u.powf(p - 1.0);
        if let Some(q) = self.f.exponent() {
            rate += q * (self.lambda * self.k.sup_abs()).abs() * u.powf(q - 1.0);
        }
        rate
    }
}

/// `c(r)·u₊^p + λ·k(r)·f(u)` at a radius in `[0, 1]`.
pub fn eval_rhs(spec: &ProblemSpec, r: f64, u: f64) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("u must be finite, got {u}")));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("radius must lie in [0, 1], got {r}")));
    }
    Ok(spec.rhs(r, u))
}

/// `(N + 2 + 2β)/(N − 2)`.
pub fn critical_exponent(n: u32, beta: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension must be ≥ 3, got {n}")));
    }
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!("β must be nonnegative, got {beta}")));
    }
    let n = n as f64;
    Ok((n + 2.0 + 2.0 * beta) / (n - 2.0))
}

/// Upper end of the interval `[0, λ*]` on which the radial test-function
/// argument rules out solutions of `-Δu = (1 + λ r^β) u^{(N+2)/(N-2)}`.
pub fn lambda_star(n: u32, beta: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension must be ≥ 3, got {n}")));
    }
    let nf = n as f64;
    if !beta.is_finite() || beta < nf - 2.0 {
        return Err(Error::Domain(format!(
            "λ* is only available for β ≥ N − 2 = {}, got {beta}",
            nf - 2.0
        )));
    }
    let base = 2.0 * (nf - 1.0) / (nf - 2.0);
    if beta == nf - 2.0 {
        return Ok(base);
    }
    let excess = beta - nf + 2.0;
    Ok(base * ((2.0 * nf - 2.0 + beta) / excess).powf(excess / (nf - 2.0)))
}

/// `max{1, (2γ + 6 − N)/(N − 2)}`.
pub fn f4_threshold(n: u32, gamma: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension must be ≥ 3, got {n}")));
    }
    let n = n as f64;
    Ok(f64::max(1.0, (2.0 * gamma + 6.0 - n) / (n - 2.0)))
}

/// Outcome of one assumption check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub holds: bool,
    /// Radius (or argument `t` for conditions on `f`) that witnesses the
    /// verdict, when one exists.
    pub sample_point: Option<f64>,
    pub detail: String,
}

impl AssumptionCheck {
    fn pass(sample_point: Option<f64>, detail: impl Into<String>) -> Self {
        AssumptionCheck {
            holds: true,
            sample_point,
            detail: detail.into(),
        }
    }

    fn fail(sample_point: Option<f64>, detail: impl Into<String>) -> Self {
        AssumptionCheck {
            holds: false,
            sample_point,
            detail: detail.into(),
        }
    }

    fn from_bool(holds: bool, sample_point: Option<f64>, detail: impl Into<String>) -> Self {
        AssumptionCheck {
            holds,
            sample_point,
            detail: detail.into(),
        }
    }
}

/// Machine-checked hypotheses on `k`, `f` and `g`.
///
/// The `g` checks apply when the main coefficient is `1 + g`; otherwise they
/// report `holds = false` with an explanatory detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub k1: AssumptionCheck,
    pub k2: AssumptionCheck,
    pub k3: AssumptionCheck,
    pub k4: AssumptionCheck,
    pub f1: AssumptionCheck,
    pub f2: AssumptionCheck,
    pub f3: AssumptionCheck,
    pub f4: AssumptionCheck,
    pub f5: AssumptionCheck,
    pub g1: AssumptionCheck,
    pub g2: AssumptionCheck,
    pub g3: AssumptionCheck,
    /// Origin power of `k` used for (k2), when decided.
    pub beta: Option<f64>,
    /// Lower-bound power of `k` used for (k3), when decided.
    pub gamma: Option<f64>,
}

pub fn validate_assumptions(spec: &ProblemSpec) -> Result<AssumptionReport> {
    spec.main_coefficient.validate()?;
    spec.k.validate()?;
    spec.f.validate()?;
    let n = spec.dimension;
    let nf = spec.n();

    // (k1)
    let (kmin_r, kmin) = spec.k.sampled_min();
    let k_zero = spec.k.is_identically_zero();
    let k1 = if k_zero {
        AssumptionCheck::fail(None, "k vanishes identically")
    } else if kmin < 0.0 {
        AssumptionCheck::fail(Some(kmin_r), format!("k = {kmin} < 0"))
    } else {
        AssumptionCheck::pass(Some(kmin_r), "k ≥ 0, k ≢ 0 and radial")
    };

    // (k2), (k3)
    let k_power = spec.k.origin_power();
    let (k2, beta) = match (&spec.k, k_power) {
        (_, _) if k_zero => (AssumptionCheck::pass(Some(0.0), "k ≡ 0 is O(r^β) for every β"), None),
        (CoefficientModel::PowerLaw { exponent, .. }, _) => (
            AssumptionCheck::from_bool(
                *exponent > 0.0,
                Some(0.0),
                format!("k = O(r^{exponent}) at the origin"),
            ),
            (*exponent > 0.0).then_some(*exponent),
        ),
        (CoefficientModel::Tabulated { .. }, _) if spec.k.value(0.0) == 0.0 => (
            AssumptionCheck::pass(Some(0.0), "piecewise-linear k with k(0) = 0 is O(r)"),
            Some(1.0),
        ),
        _ => (
            AssumptionCheck::fail(Some(0.0), format!("k(0) = {} ≠ 0", spec.k.value(0.0))),
            None,
        ),
    };
    let (k3, gamma) = match (k_power, beta) {
        (Some((power, amp)), Some(b)) if power >= b && power > 0.0 => (
            AssumptionCheck::pass(
                Some(0.0),
                format!("k ≥ {amp}·r^{power} near the origin, γ = {power} ≥ β = {b}"),
            ),
            Some(power),
        ),
        (Some((power, _)), Some(b)) => (
            AssumptionCheck::fail(Some(0.0), format!("origin power {power} below β = {b}")),
            None,
        ),
        (Some((power, amp)), None) if power <= 0.0 => (
            AssumptionCheck::pass(Some(0.0), format!("k ≥ {amp} near the origin; any γ > 0 works")),
            Some(1.0),
        ),
        _ => (AssumptionCheck::fail(Some(0.0), "no power lower bound near the origin"), None),
    };

    // (k4)
    let (kmax_r, kmax) = spec.k.sampled_max();
    let k4 = AssumptionCheck::from_bool(kmax > 0.0, Some(kmax_r), format!("max sampled k = {kmax}"));

    // nonlinearity
    let f1 = AssumptionCheck::pass(None, "f vanishes for t ≤ 0 and is nonnegative");
    let f2 = match spec.f.exponent() {
        None => AssumptionCheck::pass(None, "f ≡ 0"),
        Some(q) => {
            let upper = critical_exponent(n, beta.unwrap_or(0.0))?;
            if q <= 1.0 {
                AssumptionCheck::fail(Some(0.0), format!("f(t)/t does not vanish at 0 for q = {q}"))
            } else if q >= upper {
                AssumptionCheck::fail(None, format!("q = {q} not below (N+2+2β)/(N−2) = {upper}"))
            } else {
                AssumptionCheck::pass(None, format!("1 < q = {q} < {upper}"))
            }
        }
    };
    let f3 = match (&spec.f, spec.f.theta()) {
        (Nonlinearity::Zero, _) => AssumptionCheck::pass(None, "F ≡ 0"),
        (Nonlinearity::PurePower { q, .. }, Some(theta)) => AssumptionCheck::from_bool(
            theta > 2.0 && theta <= q + 1.0 + 1e-12,
            None,
            format!("f(t)t = (q+1)F(t) with q + 1 = {}, declared θ = {theta}", q + 1.0),
        ),
        _ => unreachable!(),
    };
    let f4 = match (spec.f.exponent(), gamma) {
        (Some(q), Some(g)) => {
            let p = f4_threshold(n, g)?;
            AssumptionCheck::from_bool(q > p, None, format!("q = {q} vs threshold {p} (γ = {g})"))
        }
        (Some(_), None) => AssumptionCheck::fail(None, "γ undetermined; (k3) fails"),
        (None, _) => AssumptionCheck::fail(None, "f ≡ 0 does not grow"),
    };
    let f5 = match spec.f.exponent() {
        Some(_) => AssumptionCheck::pass(Some(1.0), "f > 0 on (0, ∞)"),
        None => AssumptionCheck::fail(None, "f ≡ 0"),
    };

    // g, for main coefficient 1 + g
    let (g1, g2, g3) = match &spec.main_coefficient {
        CoefficientModel::OnePlus { g } => {
            let (r, gmin) = g.sampled_min();
            let g1 = AssumptionCheck::from_bool(
                gmin.is_finite() && gmin >= -1.0,
                Some(r),
                format!("min sampled g = {gmin}"),
            );
            let g0 = g.value(0.0);
            let g2 = AssumptionCheck::from_bool(g0 == 0.0, Some(0.0), format!("g(0) = {g0}"));
            let g3 = match g.origin_power() {
                Some((power, amp)) if power > 0.0 && power < nf - 2.0 => AssumptionCheck::pass(
                    Some(0.0),
                    format!("g ≥ {amp}·r^{power} near the origin, γ ∈ (0, N−2)"),
                ),
                Some((power, _)) => AssumptionCheck::fail(
                    Some(0.0),
                    format!("origin power {power} outside (0, N−2)"),
                ),
                None => AssumptionCheck::fail(Some(0.0), "no positive power lower bound"),
            };
            (g1, g2, g3)
        }
        _ => {
            let na = || AssumptionCheck::fail(None, "main coefficient is not of the form 1 + g");
            (na(), na(), na())
        }
    };

    Ok(AssumptionReport {
        k1,
        k2,
        k3,
        k4,
        f1,
        f2,
        f3,
        f4,
        f5,
        g1,
        g2,
        g3,
        beta,
        gamma,
    })
}
