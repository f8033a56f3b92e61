//! Pohozaev identities on computed profiles and nonexistence certificates.
//!
//! Identities are evaluated for equations of the form
//!
//! ```text
//! −u'' − (N−1)/r u' = c(r) u₊^p + g(r) u₊^q
//! ```
//!
//! where the first term is the main term of the profile's problem (with a
//! `1 + g` factor reduced to `1`) and `g`, `q` are supplied by the caller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::sphere_area;
use crate::problem::{critical_exponent, critical_power, lambda_star, CoefficientModel, Nonlinearity, ProblemSpec};
use crate::quadrature::gauss5;
use crate::radial_ode::RadialProfile;

/// Polynomial multiplier `ψ(r) = Σ c_k r^k` with `ψ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionPsi {
    /// `coefficients[k]` multiplies `r^k`.
    pub coefficients: Vec<f64>,
}

impl TestFunctionPsi {
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("ψ coefficients must be finite".into()));
        }
        if coefficients.first().is_some_and(|&c| c != 0.0) {
            return Err(Error::Precondition(format!(
                "ψ(0) must vanish, got {}",
                coefficients[0]
            )));
        }
        Ok(TestFunctionPsi { coefficients })
    }

    /// `a r^{N−1} + b r`, the kernel of the `u²` term.
    pub fn family(n: u32, a: f64, b: f64) -> Self {
        let mut coefficients = vec![0.0; n as usize];
        coefficients[1] += b;
        coefficients[n as usize - 1] += a;
        TestFunctionPsi { coefficients }
    }

    /// `ψ(r) = r`.
    pub fn identity() -> Self {
        TestFunctionPsi {
            coefficients: vec![0.0, 1.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        Self::polynomial(self.coefficients.clone()).map(|_| ())
    }

    /// `ψ^{(j)}(r)`.
    pub fn derivative(&self, j: usize, r: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(j)
            .map(|(k, &c)| {
                let falling: f64 = (k - j + 1..=k).map(|i| i as f64).product();
                c * falling * r.powi((k - j) as i32)
            })
            .sum()
    }

    pub fn value(&self, r: f64) -> f64 {
        self.derivative(0, r)
    }

    /// `r^{N−4}{r³ψ''' − (N−1)(N−3)rψ' + (N−1)(N−3)ψ}` expanded term by term
    /// so the powers of `r` never go negative for admissible `ψ`.
    fn quadratic_weight(&self, n: f64, r: f64) -> f64 {
        let m = (n - 1.0) * (n - 3.0);
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(k, &c)| {
                let kf = k as f64;
                let factor = kf * (kf - 1.0) * (kf - 2.0) - m * (kf - 1.0);
                if factor == 0.0 {
                    0.0
                } else {
                    c * factor * r.powf(kf + n - 4.0)
                }
            })
            .sum()
    }
}

/// One power term `c(r) u₊^p` of the right-hand side.
#[derive(Debug, Clone, PartialEq)]
struct PowerTerm {
    coefficient: CoefficientModel,
    exponent: f64,
}

/// Main term of the profile's problem, with a `1 + g` factor reduced to 1.
fn base_term(spec: &ProblemSpec) -> PowerTerm {
    let coefficient = match &spec.main_coefficient {
        CoefficientModel::OnePlus { .. } => CoefficientModel::constant(1.0),
        other => other.clone(),
    };
    PowerTerm {
        coefficient,
        exponent: spec.main_exponent,
    }
}

/// `∫₀¹ F(r, u, u') dr` over the profile with Hermite reconstruction and
/// five Gauss points per mesh interval.
fn integrate_profile(profile: &RadialProfile, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for i in 0..profile.len() - 1 {
        let (a, b) = (profile.mesh[i], profile.mesh[i + 1]);
        total += gauss5(a, b, |r| {
            let (u, du) = profile.hermite(i, r);
            f(r, u, du)
        });
    }
    total
}

fn require_unit_interval(profile: &RadialProfile) -> Result<()> {
    if profile.is_empty() || !profile.covers_unit_interval() {
        return Err(Error::Domain(format!(
            "profile must cover [0, 1], it ends at r = {}",
            profile.end_radius()
        )));
    }
    Ok(())
}

/// Both sides of the volume Pohozaev identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevBalance {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Volume identity for `g = λ r^β`:
/// `∫_B {x·∇g/(q+1) + (N/(q+1) − (N−2)/2) g} u^{q+1} = ½ ∫_∂B |∇u|²`,
/// plus the analogous term of the profile's main power.
pub fn pov_balance(profile: &RadialProfile, beta: f64, lambda: f64, q: f64) -> Result<PohozaevBalance> {
    require_unit_interval(profile)?;
    let g = CoefficientModel::power_law(lambda, beta);
    g.validate()?;
    let n = profile.spec.n();
    let omega = sphere_area(profile.spec.dimension);
    let terms = [
        base_term(&profile.spec),
        PowerTerm {
            coefficient: g,
            exponent: q,
        },
    ];
    let mut lhs = 0.0;
    for term in &terms {
        let p1 = term.exponent + 1.0;
        // N/(p+1) − (N−2)/2 with one rounding, exact zero at the critical power
        let weight = (2.0 * n - (n - 2.0) * p1) / (2.0 * p1);
        let c = &term.coefficient;
        lhs += integrate_profile(profile, |r, u, _| {
            let uu = u.abs().powf(p1);
            (r * c.derivative(r) / p1 + weight * c.value(r)) * uu * r.powf(n - 1.0)
        });
    }
    lhs *= omega;
    let rhs = 0.5 * omega * profile.boundary_slope.powi(2);
    let residual = (lhs - rhs).abs() / (lhs.abs() + rhs.abs() + f64::MIN_POSITIVE);
    Ok(PohozaevBalance { lhs, rhs, residual })
}

/// Normalized mismatch `|LHS − RHS|/(|LHS| + |RHS| + floor)` of the volume
/// identity.
pub fn pov_residual(profile: &RadialProfile, beta: f64, lambda: f64, q: f64) -> Result<f64> {
    Ok(pov_balance(profile, beta, lambda, q)?.residual)
}

/// Terms of the radial identity with multiplier `ψ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityTerms {
    /// `ψ(1) u'(1)²`.
    pub boundary: f64,
    /// `½ ∫ u² r^{N−4}{…}`.
    pub quadratic: f64,
    /// One entry per power term, main term first.
    pub power_terms: Vec<f64>,
    pub residual: f64,
}

/// Radial identity with multiplier `ψ`:
///
/// ```text
/// ψ(1)u'(1)² = ½∫u² r^{N−4}{r³ψ''' − (N−1)(N−3)(rψ' − ψ)}
///            + Σ 1/(p+1) ∫|u|^{p+1}{(p+3)c r^{N−1}ψ' − (p−1)(N−1)c r^{N−2}ψ + 2c' r^{N−1}ψ}
/// ```
///
/// summed over the profile's main term and `g u^q`.
pub fn general_identity(
    profile: &RadialProfile,
    psi: &TestFunctionPsi,
    g_model: &CoefficientModel,
    q: f64,
) -> Result<IdentityTerms> {
    psi.validate()?;
    require_unit_interval(profile)?;
    g_model.validate()?;
    let n = profile.spec.n();
    let boundary = psi.value(1.0) * profile.boundary_slope.powi(2);
    let quadratic = 0.5 * integrate_profile(profile, |r, u, _| u * u * psi.quadratic_weight(n, r));
    let terms = [
        base_term(&profile.spec),
        PowerTerm {
            coefficient: g_model.clone(),
            exponent: q,
        },
    ];
    let power_terms: Vec<f64> = terms
        .iter()
        .map(|t| {
            let p = t.exponent;
            let c = &t.coefficient;
            integrate_profile(profile, |r, u, _| {
                let uu = u.abs().powf(p + 1.0);
                let (psi0, psi1) = (psi.value(r), psi.derivative(1, r));
                let cv = c.value(r);
                let bracket = (p + 3.0) * cv * r.powf(n - 1.0) * psi1
                    - (p - 1.0) * (n - 1.0) * cv * r.powf(n - 2.0) * psi0
                    + 2.0 * c.derivative(r) * r.powf(n - 1.0) * psi0;
                uu * bracket
            }) / (p + 1.0)
        })
        .collect();
    let rhs = quadratic + power_terms.iter().sum::<f64>();
    let scale = boundary.abs() + quadratic.abs() + power_terms.iter().map(|t| t.abs()).sum::<f64>();
    let residual = (boundary - rhs).abs() / (scale + f64::MIN_POSITIVE);
    Ok(IdentityTerms {
        boundary,
        quadratic,
        power_terms,
        residual,
    })
}

pub fn general_identity_residual(
    profile: &RadialProfile,
    psi: &TestFunctionPsi,
    g_model: &CoefficientModel,
    q: f64,
) -> Result<f64> {
    Ok(general_identity(profile, psi, g_model, q)?.residual)
}

/// `h(r)` for `g = λ r^β` and `ψ = a r^{N−1} + b r`, written with combined
/// powers so `r = 0` is harmless.
pub fn h_function(n: u32, beta: f64, lambda: f64, a: f64, b: f64, r: f64) -> Result<f64> {
    check_h_args(n, beta, r)?;
    let nf = n as f64;
    let (n1, n2) = (nf - 1.0, nf - 2.0);
    Ok(-lambda * a * n2 * (2.0 * n1 + beta) * r.powf(2.0 * nf - 3.0 + beta)
        - lambda * b * beta * n2 * r.powf(nf - 1.0 + beta)
        - 2.0 * a * n1 * n2 * r.powf(2.0 * nf - 3.0))
}

/// `h(r)/r^{2N−3}`.
pub fn h_bracket(n: u32, beta: f64, lambda: f64, a: f64, b: f64, r: f64) -> Result<f64> {
    check_h_args(n, beta, r)?;
    let nf = n as f64;
    let (n1, n2) = (nf - 1.0, nf - 2.0);
    Ok(-lambda * a * n2 * (2.0 * n1 + beta) * r.powf(beta)
        - lambda * b * beta * n2 * r.powf(beta - nf + 2.0)
        - 2.0 * a * n1 * n2)
}

fn check_h_args(n: u32, beta: f64, r: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension must be ≥ 3, got {n}")));
    }
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!("β must be nonnegative, got {beta}")));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("r must lie in [0, 1], got {r}")));
    }
    Ok(())
}

/// Minimum of the bracket `h(r)/r^{2N−3}` over `[0, 1]` for `a = −1, b = 1`.
/// Returns `(r_min, minimum)`; `h ≥ 0` on `[0, 1]` iff the minimum is ≥ 0.
pub fn min_h(n: u32, beta: f64, lambda: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    if n < 3 {
        return Err(Error::Domain(format!("dimension must be ≥ 3, got {n}")));
    }
    if !beta.is_finite() || beta < nf - 2.0 {
        return Err(Error::Domain(format!("need β ≥ N − 2 = {}, got {beta}", nf - 2.0)));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("need λ ≥ 0, got {lambda}")));
    }
    let bracket = |r: f64| h_bracket(n, beta, lambda, -1.0, 1.0, r);
    let mut candidates = vec![0.0, 1.0];
    if beta > nf - 2.0 && lambda > 0.0 {
        let ratio = (beta - nf + 2.0) / (2.0 * nf - 2.0 + beta);
        candidates.push(ratio.powf(1.0 / (nf - 2.0)));
    }
    let mut best = (f64::NAN, f64::INFINITY);
    for r in candidates {
        let v = bracket(r)?;
        if v < best.1 {
            best = (r, v);
        }
    }
    Ok(best)
}

/// Which sign condition closed the Pohozaev argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCase {
    /// `λ ≤ 0` and `q ≤ (N+2+2β)/(N−2)`.
    NonpositiveSubcritical,
    /// `λ ≥ 0` and `q ≥ (N+2+2β)/(N−2)`.
    NonnegativeSupercritical,
    /// `β = 0` and `q = (N+2)/(N−2)`.
    FlatCritical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateKind {
    PohozaevSign {
        case: SignCase,
        /// `((β+N)/(q+1) − (N−2)/2)·λ`, nonpositive when certified.
        sign_value: f64,
        q_threshold: f64,
    },
    RadialTestFunction {
        a: f64,
        b: f64,
        lambda_star: f64,
        r_min: f64,
        h_min: f64,
    },
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: u32,
    /// Absent when the problem is outside the closed-form families.
    pub beta: Option<f64>,
    pub lambda: f64,
    pub q: Option<f64>,
    #[serde(flatten)]
    pub kind: CertificateKind,
    pub verdict: String,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        !matches!(self.kind, CertificateKind::None)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            CertificateKind::PohozaevSign { .. } => "pohozaev_sign",
            CertificateKind::RadialTestFunction { .. } => "radial_test_function",
            CertificateKind::None => "none",
        }
    }
}

/// Slack allowed on `min h ≥ 0` for rounding at `λ = λ*`.
const H_SLACK: f64 = 1e-12;

/// Nonexistence certificate for `−Δu = u^{(N+2)/(N−2)} + λ|x|^β u^q` on the
/// unit ball.
pub fn certify_nonexistence(n: u32, beta: f64, lambda: f64, q: f64) -> Result<Certificate> {
    for (name, v) in [("β", beta), ("λ", lambda), ("q", q)] {
        if !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be finite, got {v}")));
        }
    }
    let nf = n as f64;
    let q_threshold = critical_exponent(n, beta)?;
    let crit = critical_power(n);
    let is_crit = (q - crit).abs() <= 1e-12 * crit;
    let sign_value = ((beta + nf) / (q + 1.0) - (nf - 2.0) / 2.0) * lambda;
    let make = |kind: CertificateKind, verdict: String| Certificate {
        n,
        beta: Some(beta),
        lambda,
        q: Some(q),
        kind,
        verdict,
    };
    let case = if lambda <= 0.0 && q <= q_threshold {
        Some(SignCase::NonpositiveSubcritical)
    } else if lambda >= 0.0 && q >= q_threshold {
        Some(SignCase::NonnegativeSupercritical)
    } else if beta == 0.0 && is_crit {
        Some(SignCase::FlatCritical)
    } else {
        None
    };
    if let Some(case) = case {
        return Ok(make(
            CertificateKind::PohozaevSign {
                case,
                sign_value,
                q_threshold,
            },
            format!(
                "no solution: the Pohozaev volume term has sign value {sign_value:e} ≤ 0 \
                 (q threshold {q_threshold})"
            ),
        ));
    }
    if beta >= nf - 2.0 && is_crit && lambda >= 0.0 {
        let ls = lambda_star(n, beta)?;
        if lambda <= ls {
            let (r_min, h_min) = min_h(n, beta, lambda)?;
            let scale = 2.0 * (nf - 1.0) * (nf - 2.0);
            if h_min >= -H_SLACK * scale {
                return Ok(make(
                    CertificateKind::RadialTestFunction {
                        a: -1.0,
                        b: 1.0,
                        lambda_star: ls,
                        r_min,
                        h_min,
                    },
                    format!(
                        "no radial solution: λ = {lambda} ≤ λ* = {ls} and h ≥ 0 with minimum {h_min:e} at r = {r_min}"
                    ),
                ));
            }
        }
    }
    Ok(make(
        CertificateKind::None,
        "no certificate: parameters outside the sign and test-function regions".into(),
    ))
}

/// Reads `(β, λ, q)` off a problem in one of the certified families:
/// `u^{2*−1} + λ A r^β u^q`, or `(1 + A r^β) u^{2*−1}`.
pub fn certificate_parameters(spec: &ProblemSpec) -> std::result::Result<(f64, f64, f64), String> {
    let crit = critical_power(spec.dimension);
    if (spec.main_exponent - crit).abs() > 1e-12 * crit {
        return Err(format!("main exponent {} is not critical", spec.main_exponent));
    }
    let power = |m: &CoefficientModel| -> Option<(f64, f64)> {
        match m {
            CoefficientModel::Zero => Some((0.0, 0.0)),
            CoefficientModel::Constant { amplitude } => Some((*amplitude, 0.0)),
            CoefficientModel::PowerLaw { amplitude, exponent } => Some((*amplitude, *exponent)),
            _ => None,
        }
    };
    let no_perturbation = spec.lambda == 0.0
        || matches!(spec.f, Nonlinearity::Zero)
        || matches!(spec.k, CoefficientModel::Zero);
    match &spec.main_coefficient {
        CoefficientModel::Constant { amplitude } if *amplitude == 1.0 => {
            if no_perturbation {
                return Ok((0.0, 0.0, crit));
            }
            let Some((amp, beta)) = power(&spec.k) else {
                return Err("perturbation coefficient is not a power law".into());
            };
            let Some(q) = spec.f.exponent() else {
                return Err("perturbation is not a pure power".into());
            };
            Ok((beta, spec.lambda * amp, q))
        }
        CoefficientModel::OnePlus { g } if no_perturbation => match power(g) {
            Some((amp, beta)) => Ok((beta, amp, crit)),
            None => Err("g is not a power law".into()),
        },
        _ => Err("coefficients outside the closed-form families".into()),
    }
}

/// Certificate for a problem spec; families without closed-form coverage
/// get a `None` certificate with the reason.
pub fn certify_spec(spec: &ProblemSpec) -> Result<Certificate> {
    spec.validate()?;
    match certificate_parameters(spec) {
        Ok((beta, lambda, q)) => certify_nonexistence(spec.dimension, beta, lambda, q),
        Err(reason) => Ok(Certificate {
            n: spec.dimension,
            beta: None,
            lambda: spec.lambda,
            q: None,
            kind: CertificateKind::None,
            verdict: format!("no certificate: {reason}"),
        }),
    }
}
