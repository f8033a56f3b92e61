//! Parameter sweep over `(N, β, λ)` for `−Δu = (1 + λ r^β) u^{2*−1}` on the
//! unit ball, classifying each point by certificate or shooting.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{energy, DiscreteRadialFunction, DEFAULT_CELLS};
use crate::pohozaev::{certify_nonexistence, Certificate};
use crate::problem::{critical_power, lambda_star, CoefficientModel, ProblemSpec};
use crate::radial_ode::{
    find_dirichlet_solution_with, residual_check, DirichletOutcome, DEFAULT_D_RANGE,
    POINTS_PER_DECADE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// One grid axis: `count` values from `min` to `max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn single(v: f64) -> Self {
        Self {
            min: v,
            max: v,
            count: 1,
            spacing: Spacing::Linear,
        }
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Precondition(format!("{name} grid is empty")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(Error::Precondition(format!(
                "{name} range [{}, {}] is not ordered",
                self.min, self.max
            )));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::Precondition(format!("{name} log spacing needs min > 0")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let m = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let s = i as f64 / m;
                match self.spacing {
                    Spacing::Linear => self.min + s * (self.max - self.min),
                    Spacing::Log => self.min * (self.max / self.min).powf(s),
                }
            })
            .collect()
    }
}

fn default_tol() -> f64 {
    1e-10
}
fn default_residual_tol() -> f64 {
    1e-6
}
fn default_d_range() -> (f64, f64) {
    DEFAULT_D_RANGE
}
fn default_per_decade() -> usize {
    POINTS_PER_DECADE
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub dimensions: Vec<u32>,
    pub beta: Axis,
    pub lambda: Axis,
    /// Shooting tolerance (integrator and boundary defect).
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Bound on the normalized ODE residual for an existence claim.
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_d_range")]
    pub d_range: (f64, f64),
    #[serde(default = "default_per_decade")]
    pub points_per_decade: usize,
    /// Output path prefix; `.csv`, `.json` and `_phase.csv` are appended.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Worker threads; 0 uses the rayon default.
    #[serde(default)]
    pub jobs: usize,
    /// Recorded in the report; the sweep itself is deterministic.
    #[serde(default)]
    pub seed: u64,
    /// Also shoot on certified points and fail on a found solution.
    #[serde(default = "default_true")]
    pub cross_check: bool,
}

impl ScanConfig {
    pub fn new(dimensions: Vec<u32>, beta: Axis, lambda: Axis) -> Self {
        Self {
            dimensions,
            beta,
            lambda,
            tol: default_tol(),
            residual_tol: default_residual_tol(),
            d_range: DEFAULT_D_RANGE,
            points_per_decade: POINTS_PER_DECADE,
            output: None,
            jobs: 0,
            seed: 0,
            cross_check: true,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimensions.is_empty() {
            return Err(Error::Precondition("no dimensions given".into()));
        }
        if let Some(&n) = self.dimensions.iter().find(|&&n| n < 3) {
            return Err(Error::Domain(format!("dimension must be ≥ 3, got {n}")));
        }
        self.beta.validate("beta")?;
        self.lambda.validate("lambda")?;
        if self.beta.min < 0.0 {
            return Err(Error::Domain(format!("β must be ≥ 0, got {}", self.beta.min)));
        }
        if !(self.tol > 0.0 && self.residual_tol > 0.0) {
            return Err(Error::Precondition("tolerances must be positive".into()));
        }
        let (lo, hi) = self.d_range;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Precondition(format!("need 0 < d_min < d_max, got [{lo}, {hi}]")));
        }
        if self.points_per_decade == 0 {
            return Err(Error::Precondition("points_per_decade must be positive".into()));
        }
        Ok(())
    }

    /// Grid points in row-major order `(N, β, λ)`.
    pub fn points(&self) -> Vec<(u32, f64, f64)> {
        let betas = self.beta.values();
        let lambdas = self.lambda.values();
        let mut out = Vec::with_capacity(self.dimensions.len() * betas.len() * lambdas.len());
        for &n in &self.dimensions {
            for &b in &betas {
                for &l in &lambdas {
                    out.push((n, b, l));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "classification", rename_all = "snake_case")]
pub enum Classification {
    Existence {
        d_star: f64,
        energy: f64,
        boundary_slope: f64,
        residual: f64,
        /// Number of sign-change brackets seen in the `d` scan.
        brackets: usize,
    },
    NonexistenceCertified {
        certificate: Certificate,
    },
    /// No bracket over the scanned `d` range; not a proof.
    NonexistenceEvidence {
        shots: usize,
        d_min: f64,
        d_max: f64,
    },
    Unknown {
        diagnostics: String,
    },
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Existence { .. } => "existence",
            Classification::NonexistenceCertified { .. } => "nonexistence_certified",
            Classification::NonexistenceEvidence { .. } => "nonexistence_evidence",
            Classification::Unknown { .. } => "unknown",
        }
    }

    /// Integer code for the phase file.
    pub fn code(&self) -> u8 {
        match self {
            Classification::Unknown { .. } => 0,
            Classification::Existence { .. } => 1,
            Classification::NonexistenceCertified { .. } => 2,
            Classification::NonexistenceEvidence { .. } => 3,
        }
    }

    pub fn is_existence(&self) -> bool {
        matches!(self, Classification::Existence { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub index: usize,
    pub n: u32,
    pub beta: f64,
    pub lambda: f64,
    #[serde(flatten)]
    pub classification: Classification,
    pub elapsed_ms: f64,
}

/// Settings used by [`classify_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub tol: f64,
    pub residual_tol: f64,
    pub d_range: (f64, f64),
    pub points_per_decade: usize,
    pub cross_check: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            residual_tol: default_residual_tol(),
            d_range: DEFAULT_D_RANGE,
            points_per_decade: POINTS_PER_DECADE,
            cross_check: true,
        }
    }
}

impl From<&ScanConfig> for ClassifyOptions {
    fn from(c: &ScanConfig) -> Self {
        Self {
            tol: c.tol,
            residual_tol: c.residual_tol,
            d_range: c.d_range,
            points_per_decade: c.points_per_decade,
            cross_check: c.cross_check,
        }
    }
}

/// Fails when a certified point also has a shooting solution.
pub fn check_coherence(cert: &Certificate, outcome: &DirichletOutcome) -> Result<()> {
    match (cert.is_certified(), outcome.profile()) {
        (true, Some(p)) => Err(Error::Consistency(format!(
            "N = {}, λ = {} carries a {} certificate but shooting found d* = {}",
            cert.n,
            cert.lambda,
            cert.kind_name(),
            p.shooting_height
        ))),
        _ => Ok(()),
    }
}

pub fn point_spec(n: u32, beta: f64, lambda: f64) -> ProblemSpec {
    ProblemSpec::critical_with_g(
        n,
        CoefficientModel::PowerLaw {
            amplitude: lambda,
            exponent: beta,
        },
    )
}

/// Classifies one point: certificate first, then shooting.
///
/// A certified point that also yields a shooting solution is a
/// [`Error::Consistency`] failure when `cross_check` is set.
pub fn classify_point(n: u32, beta: f64, lambda: f64, opts: &ClassifyOptions) -> Result<Classification> {
    let spec = point_spec(n, beta, lambda);
    spec.validate()?;
    let cert = certify_nonexistence(n, beta, lambda, critical_power(n))?;
    if cert.is_certified() {
        if opts.cross_check {
            let outcome = find_dirichlet_solution_with(&spec, opts.d_range, opts.tol, opts.points_per_decade)?;
            check_coherence(&cert, &outcome)?;
        }
        return Ok(Classification::NonexistenceCertified { certificate: cert });
    }
    let outcome = match find_dirichlet_solution_with(&spec, opts.d_range, opts.tol, opts.points_per_decade) {
        Ok(o) => o,
        Err(e) => {
            return Ok(Classification::Unknown {
                diagnostics: format!("shooting failed: {e}"),
            })
        }
    };
    match outcome {
        DirichletOutcome::Found { profile, trace } => {
            let residual = match residual_check(&profile) {
                Ok(r) => r,
                Err(e) => {
                    return Ok(Classification::Unknown {
                        diagnostics: format!("residual unavailable: {e}"),
                    })
                }
            };
            if !(residual < opts.residual_tol) {
                return Ok(Classification::Unknown {
                    diagnostics: format!(
                        "candidate d* = {} has residual {residual:e} ≥ {:e}",
                        profile.shooting_height, opts.residual_tol
                    ),
                });
            }
            let u = DiscreteRadialFunction::from_profile(&profile, DEFAULT_CELLS)?;
            Ok(Classification::Existence {
                d_star: profile.shooting_height,
                energy: energy(&spec, &u)?,
                boundary_slope: profile.boundary_slope,
                residual,
                brackets: trace.brackets.len(),
            })
        }
        DirichletOutcome::NotFound { trace } => Ok(Classification::NonexistenceEvidence {
            shots: trace.shots.len(),
            d_min: opts.d_range.0,
            d_max: opts.d_range.1,
        }),
    }
}

/// Scan results; `error` holds the first hard failure, with the completed
/// records kept.
#[derive(Debug)]
pub struct PartialScan {
    pub records: Vec<ScanRecord>,
    pub error: Option<Error>,
}

fn run_points(config: &ScanConfig) -> PartialScan {
    let opts = ClassifyOptions::from(config);
    let points = config.points();
    let total = points.len();
    let results: Vec<(usize, Result<ScanRecord>)> = points
        .par_iter()
        .enumerate()
        .map(|(index, &(n, beta, lambda))| {
            let start = Instant::now();
            let res = classify_point(n, beta, lambda, &opts).map(|classification| ScanRecord {
                index,
                n,
                beta,
                lambda,
                classification,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            });
            match &res {
                Ok(r) => log::info!(
                    "[{}/{total}] N={n} β={beta} λ={lambda}: {}",
                    index + 1,
                    r.classification.name()
                ),
                Err(e) => log::error!("[{}/{total}] N={n} β={beta} λ={lambda}: {e}", index + 1),
            }
            (index, res)
        })
        .collect();
    let mut records = Vec::with_capacity(total);
    let mut error = None;
    for (_, res) in results {
        match res {
            Ok(r) => records.push(r),
            Err(e) => {
                if error.is_none() {
                    error = Some(e);
                }
            }
        }
    }
    PartialScan { records, error }
}

/// Runs the sweep without aborting on the first failure.
pub fn scan_grid_partial(config: &ScanConfig) -> Result<PartialScan> {
    config.validate()?;
    if config.jobs == 0 {
        return Ok(run_points(config));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    Ok(pool.install(|| run_points(config)))
}

/// Runs the sweep; records come back in grid order.
pub fn scan_grid(config: &ScanConfig) -> Result<Vec<ScanRecord>> {
    let scan = scan_grid_partial(config)?;
    match scan.error {
        Some(e) => Err(e),
        None => Ok(scan.records),
    }
}

/// Observed existence threshold along one `(N, β)` line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalThreshold {
    pub n: u32,
    pub beta: f64,
    /// Largest scanned λ below `upper` not classified existence.
    pub lower: Option<f64>,
    /// Smallest scanned λ classified existence.
    pub upper: Option<f64>,
    /// Closed-form bound when `β ≥ N − 2`.
    pub lambda_star: Option<f64>,
    /// `upper ≥ λ*` when both are known.
    pub consistent: Option<bool>,
}

pub fn empirical_thresholds(records: &[ScanRecord]) -> Vec<EmpiricalThreshold> {
    let mut keys: Vec<(u32, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|&(n, b)| n == r.n && b == r.beta) {
            keys.push((r.n, r.beta));
        }
    }
    keys.into_iter()
        .map(|(n, beta)| {
            let mut line: Vec<&ScanRecord> = records.iter().filter(|r| r.n == n && r.beta == beta).collect();
            line.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
            let upper = line.iter().find(|r| r.classification.is_existence()).map(|r| r.lambda);
            let lower = line
                .iter()
                .filter(|r| !r.classification.is_existence() && upper.is_none_or(|u| r.lambda < u))
                .map(|r| r.lambda)
                .next_back();
            let lambda_star = if beta >= n as f64 - 2.0 {
                lambda_star(n, beta).ok()
            } else {
                None
            };
            let consistent = match (upper, lambda_star) {
                (Some(u), Some(ls)) => Some(u >= ls),
                _ => None,
            };
            EmpiricalThreshold {
                n,
                beta,
                lower,
                upper,
                lambda_star,
                consistent,
            }
        })
        .collect()
}

/// Full scan output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub seed: u64,
    pub records: Vec<ScanRecord>,
    pub thresholds: Vec<EmpiricalThreshold>,
}

impl ScanReport {
    pub fn new(config: &ScanConfig, records: Vec<ScanRecord>) -> Self {
        let thresholds = empirical_thresholds(&records);
        Self {
            seed: config.seed,
            records,
            thresholds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "N,beta,lambda,classification,d_star,energy,boundary_slope,certificate_kind,residual";

/// Shortest round-trip text; exponent form outside `[1e-4, 1e15)`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

pub fn records_csv(records: &[ScanRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let (d, e, s, res) = match &r.classification {
            Classification::Existence {
                d_star,
                energy,
                boundary_slope,
                residual,
                ..
            } => (Some(*d_star), Some(*energy), Some(*boundary_slope), Some(*residual)),
            _ => (None, None, None, None),
        };
        let kind = match &r.classification {
            Classification::NonexistenceCertified { certificate } => certificate.kind_name(),
            _ => "",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            format_f64(r.beta),
            format_f64(r.lambda),
            r.classification.name(),
            cell(d),
            cell(e),
            cell(s),
            kind,
            cell(res)
        );
    }
    out
}

/// Columnar `(N, β, λ, code)` file for phase plots; codes are
/// 0 unknown, 1 existence, 2 certified, 3 evidence.
pub fn phase_csv(records: &[ScanRecord]) -> String {
    let mut out = String::from("N,beta,lambda,code\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.n,
            format_f64(r.beta),
            format_f64(r.lambda),
            r.classification.code()
        );
    }
    out
}

/// Writes the report in one format.
pub fn emit_report(report: &ScanReport, format: ReportFormat, path: &Path) -> Result<()> {
    if report.records.is_empty() {
        return Err(Error::Precondition("no records to emit".into()));
    }
    let text = match format {
        ReportFormat::Csv => records_csv(&report.records),
        ReportFormat::Json => serde_json::to_string_pretty(report)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes `<prefix>.csv`, `<prefix>.json` and `<prefix>_phase.csv`.
pub fn emit_all(report: &ScanReport, prefix: &Path) -> Result<Vec<PathBuf>> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    let csv = with(".csv");
    let json = with(".json");
    let phase = with("_phase.csv");
    emit_report(report, ReportFormat::Csv, &csv)?;
    emit_report(report, ReportFormat::Json, &json)?;
    std::fs::write(&phase, phase_csv(&report.records))?;
    Ok(vec![csv, json, phase])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pohozaev::CertificateKind;

    fn opts() -> ClassifyOptions {
        ClassifyOptions::default()
    }

    #[test]
    fn float_text_round_trips() {
        for x in [0.0, 1.0, -0.5, 2.2e-9, 1e300, 123.456, 1e-4, 5e15] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(2.5e-9), "2.5e-9");
        assert_eq!(format_f64(1.0), "1");
    }

    #[test]
    fn axis_values() {
        assert_eq!(Axis::linear(0.0, 4.0, 5).values(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(Axis::single(2.5).values(), vec![2.5]);
        let log = Axis {
            min: 1.0,
            max: 100.0,
            count: 3,
            spacing: Spacing::Log,
        };
        let v = log.values();
        assert!((v[1] - 10.0).abs() < 1e-12 && (v[2] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn subcritical_weight_gives_existence() {
        let c = classify_point(3, 0.5, 1.0, &opts()).unwrap();
        let Classification::Existence { d_star, residual, .. } = c else {
            panic!("expected existence, got {c:?}");
        };
        assert!(d_star > 0.0 && residual < 1e-6);
    }

    #[test]
    fn below_lambda_star_is_certified() {
        let c = classify_point(3, 1.0, 2.0, &opts()).unwrap();
        match c {
            Classification::NonexistenceCertified { certificate } => {
                assert!(matches!(certificate.kind, CertificateKind::RadialTestFunction { .. }));
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn large_lambda_gives_existence() {
        let c = classify_point(3, 1.0, 100.0, &opts()).unwrap();
        assert!(c.is_existence(), "{c:?}");
    }

    #[test]
    fn config_round_trips_through_toml() {
        let text = r#"
dimensions = [3]
jobs = 2
[beta]
min = 0.1
max = 0.9
count = 5
[lambda]
min = 1.0
max = 10.0
count = 3
spacing = "log"
"#;
        let cfg = ScanConfig::from_toml(text).unwrap();
        assert_eq!(cfg.points().len(), 15);
        assert!(cfg.cross_check);
        let back = ScanConfig::from_toml(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn config_rejects_bad_grids() {
        let mut cfg = ScanConfig::new(vec![3], Axis::linear(0.0, 1.0, 0), Axis::single(1.0));
        assert!(matches!(cfg.validate(), Err(Error::Precondition(_))));
        cfg.beta = Axis::linear(0.0, 1.0, 2);
        cfg.dimensions = vec![2];
        assert!(matches!(cfg.validate(), Err(Error::Domain(_))));
        assert!(matches!(ScanConfig::from_toml("dimensions = 3"), Err(Error::Format(_))));
    }

    #[test]
    fn csv_uses_empty_cells_for_absent_values() {
        let rec = ScanRecord {
            index: 0,
            n: 3,
            beta: 1.0,
            lambda: 2.0,
            classification: Classification::Unknown {
                diagnostics: "x".into(),
            },
            elapsed_ms: 1.0,
        };
        let csv = records_csv(&[rec]);
        assert_eq!(csv.lines().nth(1).unwrap(), "3,1,2,unknown,,,,,");
    }

    #[test]
    fn thresholds_bracket_first_existence() {
        let mk = |lambda: f64, exist: bool| ScanRecord {
            index: 0,
            n: 3,
            beta: 1.0,
            lambda,
            classification: if exist {
                Classification::Existence {
                    d_star: 1.0,
                    energy: 1.0,
                    boundary_slope: -1.0,
                    residual: 0.0,
                    brackets: 1,
                }
            } else {
                Classification::NonexistenceEvidence {
                    shots: 1,
                    d_min: 1.0,
                    d_max: 2.0,
                }
            },
            elapsed_ms: 0.0,
        };
        let t = empirical_thresholds(&[mk(4.0, true), mk(1.0, false), mk(3.0, false), mk(5.0, true)]);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].lower, Some(3.0));
        assert_eq!(t[0].upper, Some(4.0));
        assert_eq!(t[0].consistent, Some(4.0 >= t[0].lambda_star.unwrap()));
    }

    #[test]
    fn emit_rejects_empty_report() {
        let cfg = ScanConfig::new(vec![3], Axis::single(1.0), Axis::single(1.0));
        let report = ScanReport::new(&cfg, Vec::new());
        let dir = tempfile::tempdir().unwrap();
        let err = emit_report(&report, ReportFormat::Csv, &dir.path().join("x.csv")).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
