use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lane_emden::error::{Error, Result};
use lane_emden::functionals::{
    c30_integral, energy, expansion_check, sobolev_constant, DiscreteRadialFunction, DEFAULT_CELLS,
};
use lane_emden::mountain_pass::{find_endpoint, mpa_level, verify_mp_geometry_on};
use lane_emden::pohozaev::{certify_nonexistence, certify_spec};
use lane_emden::problem::{critical_power, lambda_star, Nonlinearity, ProblemSpec};
use lane_emden::radial_ode::{find_dirichlet_solution_with, residual_check, DirichletOutcome, POINTS_PER_DECADE};
use lane_emden::scanner::{emit_all, records_csv, scan_grid_partial, ScanConfig, ScanReport};

const DEFAULT_LADDER: &str = "1e-3,5e-4,2e-4,1e-4,5e-5,2e-5,1e-5";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "lane-emden", version, about = "Radial critical elliptic problems on the unit ball")]
struct Cli {
    /// TOML config: a problem spec, or a scan grid for `scan`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path or prefix; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shoot for a positive Dirichlet solution of the configured problem.
    Solve {
        #[arg(long, default_value_t = 1e-3)]
        d_min: f64,
        #[arg(long, default_value_t = 1e6)]
        d_max: f64,
        #[arg(long, default_value_t = POINTS_PER_DECADE)]
        per_decade: usize,
    },
    /// Nonexistence certificate, from `--config` or from explicit parameters.
    Certify {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Perturbation exponent; the critical power when absent.
        #[arg(long)]
        q: Option<f64>,
    },
    /// Mountain-pass level of the configured problem.
    Mpa {
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = DEFAULT_CELLS)]
        cells: usize,
        /// Radius of the sphere sampled for the geometry check.
        #[arg(long, default_value_t = 0.1)]
        rho: f64,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        /// Also shoot and report the energy gap (heuristic cross-check).
        #[arg(long)]
        compare_shooting: bool,
    },
    /// Bubble expansion check for `|x|^γ u^{q+1}`.
    Expansion {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value = DEFAULT_LADDER)]
        ladder: String,
    },
    /// `∫ |x|^γ F(v_ε)` along an ε ladder; `F = 0` when `--q` is absent.
    C30 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value = DEFAULT_LADDER)]
        ladder: String,
    },
    /// Classify a `(N, β, λ)` grid.
    Scan,
    /// Closed-form λ* for `β ≥ N − 2`.
    LambdaStar {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        beta: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn parse_ladder(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad ladder entry {s:?}: {e}")))
        })
        .collect()
}

fn require_config(cli: &Cli) -> Result<&Path> {
    cli.config
        .as_deref()
        .ok_or_else(|| Error::Precondition("--config is required".into()))
}

fn load_spec(cli: &Cli) -> Result<ProblemSpec> {
    ProblemSpec::load(require_config(cli)?)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Solve {
            d_min,
            d_max,
            per_decade,
        } => solve(cli, (*d_min, *d_max), *per_decade),
        Command::Certify { n, beta, lambda, q } => certify(cli, *n, *beta, *lambda, *q),
        Command::Mpa {
            iters,
            cells,
            rho,
            samples,
            compare_shooting,
        } => mpa(cli, *iters, *cells, *rho, *samples, *compare_shooting),
        Command::Expansion { n, gamma, q, ladder } => {
            let report = expansion_check(*n, *gamma, *q, &parse_ladder(ladder)?)?;
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf)?;
                    String::from_utf8_lossy(&buf).into_owned()
                }
            };
            write_out(cli.out.as_deref(), &text)
        }
        Command::C30 { n, gamma, q, ladder } => {
            let f = match q {
                Some(q) => Nonlinearity::PurePower { q: *q, theta: None },
                None => Nonlinearity::Zero,
            };
            let ladder = parse_ladder(ladder)?;
            let values = ladder
                .iter()
                .map(|&eps| c30_integral(&f, *gamma, *n, eps))
                .collect::<Result<Vec<_>>>()?;
            let text = match cli.format {
                Format::Json => pretty(&json!({ "n": n, "gamma": gamma, "f": f, "epsilon": ladder, "j_eps": values }))?,
                Format::Csv => {
                    let mut s = String::from("epsilon,J_eps\n");
                    for (e, v) in ladder.iter().zip(&values) {
                        s.push_str(&format!("{e},{v}\n"));
                    }
                    s
                }
            };
            write_out(cli.out.as_deref(), &text)
        }
        Command::Scan => scan(cli),
        Command::LambdaStar { n, beta } => {
            let v = lambda_star(*n, *beta)?;
            let text = match cli.format {
                Format::Json => pretty(&json!({ "n": n, "beta": beta, "lambda_star": v }))?,
                Format::Csv => format!("N,beta,lambda_star\n{n},{beta},{v}\n"),
            };
            write_out(cli.out.as_deref(), &text)
        }
    }
}

fn solve(cli: &Cli, d_range: (f64, f64), per_decade: usize) -> Result<()> {
    let spec = load_spec(cli)?;
    let tol = cli.tol.unwrap_or(1e-10);
    let outcome = find_dirichlet_solution_with(&spec, d_range, tol, per_decade)?;
    let trace = outcome.trace();
    let summary = match &outcome {
        DirichletOutcome::Found { profile, .. } => {
            let u = DiscreteRadialFunction::from_profile(profile, DEFAULT_CELLS)?;
            json!({
                "status": "found",
                "spec": spec,
                "d_star": profile.shooting_height,
                "boundary_slope": profile.boundary_slope,
                "residual": residual_check(profile)?,
                "energy": energy(&spec, &u)?,
                "brackets": trace.brackets,
                "shots": trace.shots.len(),
            })
        }
        DirichletOutcome::NotFound { .. } => json!({
            "status": "not_found",
            "spec": spec,
            "d_range": [d_range.0, d_range.1],
            "brackets": trace.brackets,
            "shots": trace.shots.len(),
        }),
    };
    let profile_csv = outcome
        .profile()
        .map(|p| {
            let mut buf = Vec::new();
            p.write_csv(&mut buf).map(|_| String::from_utf8_lossy(&buf).into_owned())
        })
        .transpose()?;
    match &cli.out {
        Some(prefix) => {
            write_out(Some(&with_suffix(prefix, ".json")), &pretty(&summary)?)?;
            if let Some(csv) = &profile_csv {
                write_out(Some(&with_suffix(prefix, ".csv")), csv)?;
            }
        }
        None => match (cli.format, &profile_csv) {
            (Format::Csv, Some(csv)) => write_out(None, csv)?,
            _ => write_out(None, &pretty(&summary)?)?,
        },
    }
    if outcome.profile().is_none() {
        log::warn!("no sign change of the boundary defect over [{}, {}]", d_range.0, d_range.1);
    }
    Ok(())
}

fn certify(cli: &Cli, n: Option<u32>, beta: Option<f64>, lambda: Option<f64>, q: Option<f64>) -> Result<()> {
    let cert = match (&cli.config, n, beta, lambda) {
        (Some(_), None, None, None) => certify_spec(&load_spec(cli)?)?,
        (None, Some(n), Some(beta), Some(lambda)) => {
            let q = match q {
                Some(q) => q,
                None => {
                    if n < 3 {
                        return Err(Error::Domain(format!("dimension must be ≥ 3, got {n}")));
                    }
                    critical_power(n)
                }
            };
            certify_nonexistence(n, beta, lambda, q)?
        }
        _ => {
            return Err(Error::Precondition(
                "give either --config or all of --n, --beta, --lambda".into(),
            ))
        }
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&cert)?,
        Format::Csv => format!(
            "N,beta,lambda,q,certificate_kind,certified\n{},{},{},{},{},{}\n",
            cert.n,
            cert.beta.map(|v| v.to_string()).unwrap_or_default(),
            cert.lambda,
            cert.q.map(|v| v.to_string()).unwrap_or_default(),
            cert.kind_name(),
            cert.is_certified()
        ),
    };
    write_out(cli.out.as_deref(), &text)
}

fn mpa(cli: &Cli, iters: usize, cells: usize, rho: f64, samples: usize, compare: bool) -> Result<()> {
    let spec = load_spec(cli)?;
    let tol = cli.tol.unwrap_or(1e-8);
    let seed = cli.seed.unwrap_or(0);
    let geometry = verify_mp_geometry_on(&spec, rho, samples, seed, cells)?;
    let start = DiscreteRadialFunction::from_fn(spec.dimension, cells, |r| 1.0 - r * r)?;
    let endpoint = find_endpoint(&spec, &start)?;
    let report = mpa_level(&spec, &endpoint.point, iters, tol)?;
    let threshold = sobolev_constant(spec.dimension, 1e-10)?.powf(spec.dimension as f64 / 2.0) / spec.dimension as f64;
    let shooting = if compare {
        let outcome = find_dirichlet_solution_with(&spec, (1e-3, 1e6), 1e-10, POINTS_PER_DECADE)?;
        match outcome.profile() {
            Some(p) => {
                let u = DiscreteRadialFunction::from_profile(p, cells)?;
                let e = energy(&spec, &u)?;
                json!({
                    "d_star": p.shooting_height,
                    "energy": e,
                    "relative_gap": (report.level - e).abs() / e.abs().max(f64::MIN_POSITIVE),
                    "note": "heuristic: the ground state need not be the smallest-d solution",
                })
            }
            None => json!({ "d_star": null }),
        }
    } else {
        Value::Null
    };
    match cli.format {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_trace_csv(&mut buf)?;
            write_out(cli.out.as_deref(), &String::from_utf8_lossy(&buf))
        }
        Format::Json => {
            let v = json!({
                "seed": seed,
                "level": report.level,
                "threshold": threshold,
                "below_threshold": report.level < threshold,
                "iterations": report.iterations,
                "gradient_norm": report.gradient_norm,
                "converged": report.converged,
                "stalled": report.stalled,
                "nehari": report.nehari,
                "endpoint_scale": endpoint.scale,
                "geometry": geometry,
                "shooting": shooting,
                "trace": report.trace,
            });
            write_out(cli.out.as_deref(), &pretty(&v)?)
        }
    }
}

fn scan(cli: &Cli) -> Result<()> {
    let mut config = ScanConfig::load(require_config(cli)?)?;
    if let Some(j) = cli.jobs {
        config.jobs = j;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(t) = cli.tol {
        config.tol = t;
    }
    if let Some(o) = &cli.out {
        config.output = Some(o.clone());
    }
    let partial = scan_grid_partial(&config)?;
    let report = ScanReport::new(&config, partial.records);
    if !report.records.is_empty() {
        match &config.output {
            Some(prefix) => {
                for p in emit_all(&report, prefix)? {
                    log::info!("wrote {}", p.display());
                }
            }
            None => match cli.format {
                Format::Csv => write_out(None, &records_csv(&report.records))?,
                Format::Json => write_out(None, &serde_json::to_string_pretty(&report)?)?,
            },
        }
    }
    match partial.error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
