//! `dispersim`: command-line front end.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 assumption
//! failure, 4 numerical failure.

mod commands;
mod config;
mod output;
mod potential_io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dispersim_core::evolution::EvolutionConfig;
use dispersim_core::ErrorCategory;

use config::{Command, RunConfig, Setup};

const EXIT_USAGE: u8 = 2;
const EXIT_ASSUMPTION: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "dispersim", version, about = "Dispersive estimates for 2D matrix Schrödinger operators")]
struct Cli {
    /// Print the resolved run configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Clone, Default)]
struct SetupArgs {
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Half-width of the square grid.
    #[arg(long)]
    extent: Option<f64>,
    /// Nodes per axis.
    #[arg(long)]
    n: Option<usize>,
    /// Coupling scale applied to the potential.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    gs_tol: Option<f64>,
    #[arg(long)]
    regularity_threshold: Option<f64>,
    /// CSV potential (columns x, y, V1, V2) replacing the linearized one.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Run single-threaded.
    #[arg(long)]
    deterministic: bool,
    /// Output file (prefix for decay-report); stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl SetupArgs {
    fn setup(&self) -> Setup {
        let d = Setup::default();
        Setup {
            gamma: self.gamma.unwrap_or(d.gamma),
            mu: self.mu.unwrap_or(d.mu),
            extent: self.extent.unwrap_or(d.extent),
            n: self.n.unwrap_or(d.n),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            r_max: self.r_max.unwrap_or(d.r_max),
            gs_tol: self.gs_tol.unwrap_or(d.gs_tol),
            regularity_threshold: self.regularity_threshold.unwrap_or(d.regularity_threshold),
            potential_file: self.potential.clone(),
        }
    }
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok([
            a.parse().map_err(|e| format!("{a}: {e}"))?,
            b.parse().map_err(|e| format!("{b}: {e}"))?,
        ]),
        _ => Err(format!("expected a point as X,Y, got {s:?}")),
    }
}

#[derive(Subcommand)]
enum Sub {
    /// Radial ground state as CSV.
    Groundstate {
        #[command(flatten)]
        setup: SetupArgs,
    },
    /// Assumption certificates as JSON; exit 3 if A1 or A2 fails.
    Check {
        #[command(flatten)]
        setup: SetupArgs,
        /// Also write the potential as CSV.
        #[arg(long)]
        save_potential: Option<PathBuf>,
    },
    /// Eigenvalues of the discretized operator as CSV.
    Spectrum {
        #[command(flatten)]
        setup: SetupArgs,
        /// Report persistent localized eigenvalues inside the essential spectrum (JSON).
        #[arg(long)]
        scan_embedded: bool,
        /// Additional resolutions for the scan (default: n + 4).
        #[arg(long, value_delimiter = ',')]
        scan_n: Vec<usize>,
        #[arg(long, default_value_t = 0.05)]
        band_tol: f64,
    },
    /// Threshold-expansion diagnostics on a geometric λ grid (JSON).
    ResolventSweep {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long)]
        lambda_min: f64,
        #[arg(long)]
        lambda_max: f64,
        #[arg(long)]
        points: usize,
    },
    /// One 2×2 kernel of e^{itH}P_ac (JSON).
    Evolve {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Point X,Y (snapped to the nearest node).
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        x: [f64; 2],
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        y: [f64; 2],
        #[arg(long, default_value_t = 10.0)]
        lambda_high: f64,
        #[arg(long, default_value_t = 8)]
        quad_points_per_osc: usize,
    },
    /// Decay report (CSV + JSON) from an evolution config file.
    DecayReport {
        #[command(flatten)]
        setup: SetupArgs,
        /// JSON with the evolution keys: mu, t_list, lambda_high,
        /// quad_points_per_osc, x_samples, y_samples, weight_power, alpha.
        #[arg(long)]
        config: PathBuf,
    },
    /// Execute a saved run configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn resolve(cli: Sub) -> Result<RunConfig, String> {
    let wrap = |a: SetupArgs, command: Command| RunConfig {
        setup: a.setup(),
        command,
        output: a.output.clone(),
        deterministic: a.deterministic,
    };
    let cfg = match cli {
        Sub::Run { config } => RunConfig::from_json(&read(&config)?)?,
        Sub::Groundstate { setup } => wrap(setup, Command::Groundstate),
        Sub::Check { setup, save_potential } => wrap(setup, Command::Check { save_potential }),
        Sub::Spectrum {
            setup,
            scan_embedded,
            scan_n,
            band_tol,
        } => wrap(
            setup,
            Command::Spectrum {
                scan_embedded,
                scan_n,
                band_tol,
            },
        ),
        Sub::ResolventSweep {
            setup,
            lambda_min,
            lambda_max,
            points,
        } => wrap(
            setup,
            Command::ResolventSweep {
                lambda_min,
                lambda_max,
                points,
            },
        ),
        Sub::Evolve {
            setup,
            t,
            x,
            y,
            lambda_high,
            quad_points_per_osc,
        } => wrap(
            setup,
            Command::Evolve {
                t,
                x,
                y,
                lambda_high,
                quad_points_per_osc,
            },
        ),
        Sub::DecayReport { setup, config } => {
            let evolution: EvolutionConfig = serde_json::from_str(&read(&config)?)
                .map_err(|e| format!("malformed evolution config: {e}"))?;
            let explicit_mu = setup.mu;
            let mut c = wrap(setup, Command::DecayReport { evolution: evolution.clone() });
            if explicit_mu.is_none() {
                c.setup.mu = evolution.mu;
            }
            c
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn thread_cap(deterministic: bool) -> Result<Option<usize>, String> {
    if deterministic {
        return Ok(Some(1));
    }
    match std::env::var("DISPERSIM_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("DISPERSIM_THREADS must be a positive integer, got {v:?}")),
        },
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(cli.command) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if cli.print_config {
        print!("{}", output::to_json(&cfg));
        return ExitCode::SUCCESS;
    }
    match thread_cap(cfg.deterministic) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: thread pool: {e}");
                return ExitCode::from(EXIT_NUMERICAL);
            }
            dispersim_core::linalg::cap_parallelism(n);
        }
        Ok(None) => {}
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = match commands::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.category() {
                ErrorCategory::Usage => EXIT_USAGE,
                ErrorCategory::Assumption => EXIT_ASSUMPTION,
                ErrorCategory::Numerical => EXIT_NUMERICAL,
            };
            return ExitCode::from(code);
        }
    };
    for (path, text) in &outcome.artifacts {
        if let Err(e) = output::emit(path.as_deref(), text) {
            eprintln!("error: writing output: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    ExitCode::from(outcome.status as u8)
}
