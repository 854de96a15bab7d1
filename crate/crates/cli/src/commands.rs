use std::path::{Path, PathBuf};

use dispersim_core::evolution::{EvolutionConfig, Evolver};
use dispersim_core::groundstate::{solve_ground_state, GroundState};
use dispersim_core::potential::{check_assumptions, linearized_potential, MatrixPotential};
use dispersim_core::resolvent::{
    build_expansion_with, dense_inverse, e1_operator, m_inverse_feshbach, m_operator, ResolventExpansion,
};
use dispersim_core::spectral::{discretize_h, eigen_spectrum, eigen_spectrum_with_vectors, embedded_scan, DEFAULT_PR_TOL};
use dispersim_core::{make_grid, Error, Grid2D, Result, Sign};
use serde::Serialize;

use crate::config::{Command, RunConfig, Setup};
use crate::output::{csv_artifact, float, json_artifact};
use crate::potential_io::{load_potential_file, potential_csv};

/// Files (or stdout, for `None`) to write once the command has finished,
/// and the exit status.
pub struct Outcome {
    pub artifacts: Vec<(Option<PathBuf>, String)>,
    pub status: i32,
}

impl Outcome {
    fn single(path: Option<PathBuf>, text: String) -> Self {
        Self {
            artifacts: vec![(path, text)],
            status: 0,
        }
    }
}

struct Problem {
    grid: Grid2D,
    pot: MatrixPotential,
}

fn ground_state(s: &Setup) -> Result<GroundState> {
    solve_ground_state(s.gamma, s.mu, s.r_max, s.gs_tol)
}

fn problem_on(s: &Setup, n: usize) -> Result<Problem> {
    let grid = make_grid(s.extent, n)?;
    let base = match &s.potential_file {
        Some(p) => load_potential_file(&grid, p)?,
        None => linearized_potential(&ground_state(s)?, &grid)?,
    };
    let pot = if s.epsilon == 1.0 { base } else { base.scaled(s.epsilon)? };
    Ok(Problem { grid, pot })
}

fn expansion(s: &Setup, p: &Problem) -> Result<ResolventExpansion> {
    build_expansion_with(&p.pot, &p.grid, s.mu, s.regularity_threshold)
}

fn with_suffix(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let hash = cfg.hash();
    let s = &cfg.setup;
    let out = cfg.output.clone();
    let name = cfg.command.name();
    match &cfg.command {
        Command::Groundstate => {
            let gs = ground_state(s)?;
            #[derive(Serialize)]
            struct Header<'a> {
                config_hash: &'a str,
                gamma: f64,
                mu: f64,
                phi0: f64,
                decay_rate: f64,
            }
            let header = Header {
                config_hash: &hash,
                gamma: gs.gamma,
                mu: gs.mu,
                phi0: gs.phi0(),
                decay_rate: gs.decay_rate,
            };
            let rows: Vec<Vec<String>> = gs
                .r_nodes
                .iter()
                .zip(&gs.phi_values)
                .map(|(r, p)| vec![float(*r), float(*p)])
                .collect();
            Ok(Outcome::single(out, csv_artifact(&header, &["r", "phi"], &rows)))
        }
        Command::Check { save_potential } => {
            let p = problem_on(s, s.n)?;
            let report = check_assumptions(&p.pot, &p.grid, s.mu)?;
            let mut o = Outcome::single(out, json_artifact(&hash, name, &report));
            if let Some(path) = save_potential {
                let header = format!("config_hash {hash}\nextent {}\nn {}", float(s.extent), s.n);
                o.artifacts.push((Some(path.clone()), potential_csv(&p.grid, &p.pot, &header)));
            }
            o.status = if report.a1_ok && report.a2_ok { 0 } else { 3 };
            Ok(o)
        }
        Command::Spectrum {
            scan_embedded,
            scan_n,
            band_tol,
        } => {
            let p = problem_on(s, s.n)?;
            let h = discretize_h(&p.pot, &p.grid, s.mu)?;
            if *scan_embedded {
                let mut ns = vec![s.n];
                if scan_n.is_empty() {
                    ns.push(s.n + 4);
                } else {
                    ns.extend(scan_n.iter().copied().filter(|&m| m != s.n));
                }
                let spectra = ns
                    .iter()
                    .map(|&n| {
                        let q = problem_on(s, n)?;
                        eigen_spectrum_with_vectors(&discretize_h(&q.pot, &q.grid, s.mu)?, s.mu)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let report = embedded_scan(&spectra, *band_tol, DEFAULT_PR_TOL)?;
                return Ok(Outcome::single(out, json_artifact(&hash, name, &report)));
            }
            let spec = eigen_spectrum(&h, s.mu)?;
            #[derive(Serialize)]
            struct Header<'a> {
                config_hash: &'a str,
                mu: f64,
                h_norm: f64,
                tol: f64,
                negation_defect: f64,
                conjugation_defect: f64,
            }
            let header = Header {
                config_hash: &hash,
                mu: s.mu,
                h_norm: spec.h_norm,
                tol: spec.tol,
                negation_defect: spec.negation_defect(),
                conjugation_defect: spec.conjugation_defect(),
            };
            let rows: Vec<Vec<String>> = spec
                .eigenvalues
                .iter()
                .zip(&spec.classifications)
                .zip(&spec.algebraic_mults)
                .map(|((z, c), m)| vec![float(z.re), float(z.im), c.label().to_string(), m.to_string()])
                .collect();
            Ok(Outcome::single(
                out,
                csv_artifact(&header, &["re", "im", "class", "multiplicity"], &rows),
            ))
        }
        Command::ResolventSweep {
            lambda_min,
            lambda_max,
            points,
        } => {
            let p = problem_on(s, s.n)?;
            let e = expansion(s, &p)?;
            let rows = resolvent_sweep(&e, &p, *lambda_min, *lambda_max, *points)?;
            Ok(Outcome::single(out, json_artifact(&hash, name, &rows)))
        }
        Command::Evolve {
            t,
            x,
            y,
            lambda_high,
            quad_points_per_osc,
        } => {
            let p = problem_on(s, s.n)?;
            let e = if p.pot.is_zero() { None } else { Some(expansion(s, &p)?) };
            let (xi, yi) = (p.grid.nearest(*x), p.grid.nearest(*y));
            let mut ec = EvolutionConfig::new(s.mu, &p.grid);
            ec.lambda_high = *lambda_high;
            ec.quad_points_per_osc = *quad_points_per_osc;
            ec.x_samples = vec![xi];
            ec.y_samples = vec![yi];
            ec.t_list = vec![t.abs()];
            let ev = Evolver::new(&p.pot, e.as_ref(), &p.grid, &ec)?;
            let k = Evolver::block(&ev.kernels(*t), 0, 0);
            #[derive(Serialize)]
            struct Body {
                t: f64,
                x_node: [f64; 2],
                y_node: [f64; 2],
                /// `[[re, im], ...]` row-major.
                kernel: [[[f64; 2]; 2]; 2],
            }
            let c = |z: dispersim_core::c64| [z.re, z.im];
            let body = Body {
                t: *t,
                x_node: p.grid.nodes[xi],
                y_node: p.grid.nodes[yi],
                kernel: [[c(k[0][0]), c(k[0][1])], [c(k[1][0]), c(k[1][1])]],
            };
            Ok(Outcome::single(out, json_artifact(&hash, name, &body)))
        }
        Command::DecayReport { evolution } => {
            let p = problem_on(s, s.n)?;
            let e = if p.pot.is_zero() { None } else { Some(expansion(s, &p)?) };
            let ec = evolution.clone().with_default_samples(&p.grid);
            let report = Evolver::new(&p.pot, e.as_ref(), &p.grid, &ec)?.report()?;
            let prefix = out.unwrap_or_else(|| PathBuf::from("decay-report"));
            #[derive(Serialize)]
            struct Header<'a> {
                config_hash: &'a str,
                fitted_exponent_unweighted: f64,
                fitted_exponent_weighted: f64,
                fitted_exponent_secondary: f64,
            }
            let header = Header {
                config_hash: &hash,
                fitted_exponent_unweighted: report.fitted_exponent_unweighted,
                fitted_exponent_weighted: report.fitted_exponent_weighted,
                fitted_exponent_secondary: report.fitted_exponent_secondary,
            };
            let columns = [
                "t",
                "sup_norm",
                "weighted_sup",
                "t_sup",
                "t_log2_weighted",
                "secondary_compensated",
                "quad_certificate",
                "interp_certificate",
                "cutoff_certificate",
                "accuracy_warning",
            ];
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    let mut v: Vec<String> = [
                        r.t,
                        r.sup_norm,
                        r.weighted_sup,
                        r.t_sup,
                        r.t_log2_weighted,
                        r.secondary_compensated,
                        r.quad_certificate,
                        r.interp_certificate,
                        r.cutoff_certificate,
                    ]
                    .iter()
                    .map(|x| float(*x))
                    .collect();
                    v.push(r.accuracy_warning.to_string());
                    v
                })
                .collect();
            Ok(Outcome {
                artifacts: vec![
                    (Some(with_suffix(&prefix, "csv")), csv_artifact(&header, &columns, &rows)),
                    (Some(with_suffix(&prefix, "json")), json_artifact(&hash, name, &report)),
                ],
                status: 0,
            })
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub qtq_min_sv: f64,
    /// `‖E1(λ)‖_HS` on the `+` branch.
    pub e1_hs: f64,
    /// Relative HS difference between the Feshbach and dense inverses of
    /// `M⁺(λ)`; absent when the Neumann correction does not converge.
    pub feshbach_vs_dense: Option<f64>,
    pub neumann_ratio: Option<f64>,
    pub h_plus: [f64; 2],
    pub h_minus: [f64; 2],
}

fn resolvent_sweep(e: &ResolventExpansion, p: &Problem, lo: f64, hi: f64, points: usize) -> Result<Vec<SweepRow>> {
    let lambdas: Vec<f64> = if points == 1 {
        vec![lo]
    } else {
        (0..points)
            .map(|k| lo * (hi / lo).powf(k as f64 / (points - 1) as f64))
            .collect()
    };
    lambdas
        .into_iter()
        .map(|lambda| {
            let e1 = e1_operator(Sign::Plus, lambda, e, &p.pot, &p.grid)?;
            let (fv, ratio) = match m_inverse_feshbach(Sign::Plus, lambda, e, &p.pot, &p.grid) {
                Ok(f) => {
                    let dense = dense_inverse(&m_operator(Sign::Plus, lambda, e, &p.pot, &p.grid)?, lambda)?;
                    let rel = f.inverse.sub(&dense)?.hs_norm() / dense.hs_norm();
                    (Some(rel), Some(f.ratio))
                }
                Err(Error::ExpansionRadius { .. }) => (None, None),
                Err(other) => return Err(other),
            };
            let hp = e.h(Sign::Plus, lambda)?;
            let hm = e.h(Sign::Minus, lambda)?;
            Ok(SweepRow {
                lambda,
                qtq_min_sv: e.qtq_min_sv,
                e1_hs: e1.hs_norm(),
                feshbach_vs_dense: fv,
                neumann_ratio: ratio,
                h_plus: [hp.re, hp.im],
                h_minus: [hm.re, hm.im],
            })
        })
        .collect()
}
