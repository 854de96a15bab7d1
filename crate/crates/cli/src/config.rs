use std::path::PathBuf;

use dispersim_core::evolution::EvolutionConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Problem definition shared by every command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Setup {
    pub gamma: f64,
    pub mu: f64,
    pub extent: f64,
    pub n: usize,
    /// Coupling scale applied to the linearized potential.
    pub epsilon: f64,
    pub r_max: f64,
    pub gs_tol: f64,
    pub regularity_threshold: f64,
    /// CSV with columns `x, y, V1, V2`; replaces the linearized potential.
    pub potential_file: Option<PathBuf>,
}

impl Default for Setup {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            mu: 1.0,
            extent: 8.0,
            n: 20,
            epsilon: 1.0,
            r_max: 20.0,
            gs_tol: 1e-4,
            regularity_threshold: dispersim_core::resolvent::REGULARITY_THRESHOLD,
            potential_file: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    Groundstate,
    Check {
        save_potential: Option<PathBuf>,
    },
    Spectrum {
        scan_embedded: bool,
        /// Extra resolutions for the embedded scan.
        scan_n: Vec<usize>,
        /// Largest drift of a localized band eigenvalue between resolutions.
        band_tol: f64,
    },
    ResolventSweep {
        lambda_min: f64,
        lambda_max: f64,
        points: usize,
    },
    Evolve {
        t: f64,
        x: [f64; 2],
        y: [f64; 2],
        lambda_high: f64,
        quad_points_per_osc: usize,
    },
    DecayReport {
        evolution: EvolutionConfig,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Groundstate => "groundstate",
            Command::Check { .. } => "check",
            Command::Spectrum { .. } => "spectrum",
            Command::ResolventSweep { .. } => "resolvent-sweep",
            Command::Evolve { .. } => "evolve",
            Command::DecayReport { .. } => "decay-report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub setup: Setup,
    pub command: Command,
    /// Output path (prefix for multi-file artifacts); stdout when absent.
    pub output: Option<PathBuf>,
    /// Pins the worker pool to one thread so reductions run in a fixed order.
    pub deterministic: bool,
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed config: {e}"))
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), String> {
        let s = &self.setup;
        let positive = [
            ("gamma", s.gamma),
            ("mu", s.mu),
            ("extent", s.extent),
            ("r_max", s.r_max),
            ("gs_tol", s.gs_tol),
            ("regularity_threshold", s.regularity_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(s.epsilon >= 0.0 && s.epsilon.is_finite()) {
            return Err(format!("epsilon must be nonnegative, got {}", s.epsilon));
        }
        if s.n < 8 {
            return Err(format!("n must be at least 8, got {}", s.n));
        }
        match &self.command {
            Command::ResolventSweep {
                lambda_min,
                lambda_max,
                points,
            } => {
                if !(*lambda_min > 0.0 && lambda_max >= lambda_min && lambda_max.is_finite()) {
                    return Err(format!("need 0 < lambda_min <= lambda_max, got {lambda_min}, {lambda_max}"));
                }
                if *points == 0 {
                    return Err("points must be at least 1".into());
                }
            }
            Command::Evolve { t, lambda_high, .. } => {
                if *t == 0.0 || !t.is_finite() {
                    return Err(format!("t must be finite and nonzero, got {t}"));
                }
                if !(*lambda_high > s.mu) {
                    return Err(format!("lambda_high must exceed mu, got {lambda_high}"));
                }
            }
            Command::DecayReport { evolution } => {
                if evolution.mu != s.mu {
                    return Err(format!(
                        "evolution config has mu = {}, setup has {}",
                        evolution.mu, s.mu
                    ));
                }
            }
            Command::Spectrum { scan_n, band_tol, .. } => {
                if !(*band_tol > 0.0) {
                    return Err(format!("band_tol must be positive, got {band_tol}"));
                }
                if let Some(m) = scan_n.iter().find(|&&m| m < 10) {
                    return Err(format!("scan resolutions must be at least 10, got {m}"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
