//! The matrix potential `V = [[-V1, -V2], [V2, V1]]`, its factorization
//! `V = v1 v2` with `v = [[a, b], [b, a]]`, `v1 = -σ3 v`, `v2 = v`, and
//! numerical certificates for the standing assumptions.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fd;
use crate::gridops::{dist, Grid2D, PointwiseMatrix};
use crate::groundstate::{least_squares_slope, GroundState};
use crate::quad::gauss_legendre_on;

/// Value reported for `β` when the potential decays faster than any power.
pub const SUPER_POLYNOMIAL_BETA: f64 = 99.0;

/// `a1_ok` tolerates `V1 - |V2|` down to this value.
pub const A1_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixPotential {
    pub v1_scalar: Vec<f64>,
    pub v2_scalar: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub beta_fit: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub a1_ok: bool,
    pub a1_margin: f64,
    pub a2_min_eig: f64,
    /// Accepted band `[-5h², ∞)` for `a2_min_eig`.
    pub a2_band: f64,
    pub a2_ok: bool,
    pub a3_beta: f64,
    /// `max (|a|+|b|) ⟨x⟩^{1.51}` over the middle and outer annulus.
    pub ab_decay_stat: [f64; 2],
    pub kato_norm: f64,
    pub notes: String,
}

/// `a = (√(V1+V2) + √(V1−V2))/2`, `b = (√(V1+V2) − √(V1−V2))/2`.
pub fn factor_scalars(v1: f64, v2: f64) -> (f64, f64) {
    let p = (v1 + v2).max(0.0).sqrt();
    let m = (v1 - v2).max(0.0).sqrt();
    (0.5 * (p + m), 0.5 * (p - m))
}

fn check_a1(grid: &Grid2D, v1: &[f64], v2: &[f64]) -> Result<()> {
    for (k, (&p, &q)) in v1.iter().zip(v2).enumerate() {
        if !(p.is_finite() && q.is_finite()) || p - q.abs() < -A1_TOLERANCE {
            return Err(Error::AssumptionA1 {
                node: k,
                x: grid.nodes[k],
                v1: p,
                v2: q,
            });
        }
    }
    Ok(())
}

impl MatrixPotential {
    /// Builds the factorization from sampled `V1`, `V2`; rejects A1 violations.
    pub fn from_fields(grid: &Grid2D, v1: Vec<f64>, v2: Vec<f64>) -> Result<Self> {
        if v1.len() != grid.len() || v2.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                got: v1.len().min(v2.len()),
            });
        }
        check_a1(grid, &v1, &v2)?;
        let (a, b): (Vec<f64>, Vec<f64>) =
            v1.iter().zip(&v2).map(|(&p, &q)| factor_scalars(p, q)).unzip();
        let beta_fit = fit_beta(grid, &v1, &v2);
        Ok(Self {
            v1_scalar: v1,
            v2_scalar: v2,
            a,
            b,
            beta_fit,
        })
    }

    pub fn zero(grid: &Grid2D) -> Self {
        Self::from_fields(grid, vec![0.0; grid.len()], vec![0.0; grid.len()])
            .expect("zero potential satisfies A1")
    }

    pub fn nodes(&self) -> usize {
        self.a.len()
    }

    pub fn is_zero(&self) -> bool {
        self.v1_scalar.iter().chain(&self.v2_scalar).all(|&v| v == 0.0)
    }

    /// `εV`, with `a, b` rescaled by `√ε`.
    pub fn scaled(&self, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be nonnegative, got {eps}")));
        }
        let s = eps.sqrt();
        Ok(Self {
            v1_scalar: self.v1_scalar.iter().map(|v| v * eps).collect(),
            v2_scalar: self.v2_scalar.iter().map(|v| v * eps).collect(),
            a: self.a.iter().map(|v| v * s).collect(),
            b: self.b.iter().map(|v| v * s).collect(),
            beta_fit: self.beta_fit,
        })
    }

    /// `v = [[a, b], [b, a]]`.
    pub fn v(&self) -> PointwiseMatrix {
        PointwiseMatrix::new(self.a.clone(), self.b.clone(), self.b.clone(), self.a.clone())
    }

    /// `v1 = -σ3 v = [[-a, -b], [b, a]]`.
    pub fn v1(&self) -> PointwiseMatrix {
        let neg = |x: &Vec<f64>| x.iter().map(|v| -v).collect::<Vec<_>>();
        PointwiseMatrix::new(neg(&self.a), neg(&self.b), self.b.clone(), self.a.clone())
    }

    /// `v2 = v`.
    pub fn v2(&self) -> PointwiseMatrix {
        self.v()
    }

    /// `V = [[-V1, -V2], [V2, V1]]`.
    pub fn v_matrix(&self) -> PointwiseMatrix {
        let neg = |x: &Vec<f64>| x.iter().map(|v| -v).collect::<Vec<_>>();
        PointwiseMatrix::new(
            neg(&self.v1_scalar),
            neg(&self.v2_scalar),
            self.v2_scalar.clone(),
            self.v1_scalar.clone(),
        )
    }

    /// `‖a² + b²‖_{L¹}`.
    pub fn norm_ab(&self, grid: &Grid2D) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .zip(&grid.weights)
            .map(|((a, b), w)| (a * a + b * b) * w)
            .sum()
    }

    /// `max |v1 v2 - V|` over nodes and entries.
    pub fn factorization_defect(&self) -> f64 {
        let prod = self.v1().matmul(&self.v2());
        let v = self.v_matrix();
        let mut worst = 0.0_f64;
        for c in 0..2 {
            for d in 0..2 {
                for (p, q) in prod.m[c][d].iter().zip(&v.m[c][d]) {
                    worst = worst.max((p - q).abs());
                }
            }
        }
        worst
    }
}

/// `V1 = (γ+1)φ^{2γ}`, `V2 = γφ^{2γ}` sampled at the grid nodes.
pub fn linearized_potential(gs: &GroundState, grid: &Grid2D) -> Result<MatrixPotential> {
    let g = gs.gamma;
    let p: Vec<f64> = grid
        .nodes
        .iter()
        .map(|&x| gs.eval(x[0].hypot(x[1])).powf(2.0 * g))
        .collect();
    let v1 = p.iter().map(|v| (g + 1.0) * v).collect();
    let v2 = p.iter().map(|v| g * v).collect();
    MatrixPotential::from_fields(grid, v1, v2)
}

/// Largest `φ` on the grid boundary relative to `φ(0)`.
pub fn boundary_ratio(gs: &GroundState, grid: &Grid2D) -> f64 {
    (0..grid.len())
        .filter(|&k| grid.is_boundary(k))
        .map(|k| gs.eval(grid.nodes[k][0].hypot(grid.nodes[k][1])))
        .fold(0.0, f64::max)
        / gs.phi0()
}

fn japanese(x: [f64; 2]) -> f64 {
    (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt()
}

fn annulus(grid: &Grid2D, lo: f64, hi: f64) -> Vec<usize> {
    (0..grid.len())
        .filter(|&k| {
            let r = grid.nodes[k][0].hypot(grid.nodes[k][1]);
            r >= lo * grid.extent && r < hi * grid.extent
        })
        .collect()
}

fn local_beta(grid: &Grid2D, idx: &[usize], v1: &[f64], v2: &[f64]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = idx
        .iter()
        .filter_map(|&k| {
            let s = v1[k].abs() + v2[k].abs();
            (s > 1e-300).then(|| (japanese(grid.nodes[k]).ln(), s.ln()))
        })
        .unzip();
    (xs.len() >= 4).then(|| -least_squares_slope(&xs, &ys))
}

/// Local power-law exponent of `|V1| + |V2|` on two successive annuli; a
/// steepening exponent means faster-than-polynomial decay.
fn fit_beta(grid: &Grid2D, v1: &[f64], v2: &[f64]) -> f64 {
    if v1.iter().chain(v2).all(|&v| v == 0.0) {
        return SUPER_POLYNOMIAL_BETA;
    }
    let inner = local_beta(grid, &annulus(grid, 0.4, 0.7), v1, v2);
    let outer = local_beta(grid, &annulus(grid, 0.7, 1.0), v1, v2);
    match (inner, outer) {
        (Some(bi), Some(bo)) if bo > 1.25 * bi + 1.0 => SUPER_POLYNOMIAL_BETA,
        (_, Some(bo)) => bo,
        (Some(bi), None) => bi,
        (None, None) => SUPER_POLYNOMIAL_BETA,
    }
}

/// Average of a radial function over a centred square of side `h`, by a
/// Duffy map of each half-quadrant; handles integrable singularities at 0.
pub fn duffy_cell_average<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    let a = 0.5 * h;
    let (u, wu) = gauss_legendre_on(40, 0.0, 1.0);
    let mut acc = 0.0;
    // triangle 0 ≤ y ≤ x ≤ a with x = a u, y = a u v
    for (ui, wi) in u.iter().zip(&wu) {
        for (vj, wj) in u.iter().zip(&wu) {
            let r = a * ui * (1.0 + vj * vj).sqrt();
            acc += f(r) * a * a * ui * wi * wj;
        }
    }
    2.0 * acc / (a * a)
}

/// `‖W‖_K = sup_x ∫ (1 + log⁻|x−y|)² |W(y)| dy`, with the supremum over
/// grid nodes and the diagonal cell integrated exactly.
pub fn kato_norm(grid: &Grid2D, w: &[f64]) -> f64 {
    let kernel = |r: f64| {
        let l = (-r.ln()).max(0.0);
        (1.0 + l) * (1.0 + l)
    };
    let diag = duffy_cell_average(kernel, grid.h);
    let support: Vec<usize> = (0..grid.len()).filter(|&k| w[k] != 0.0).collect();
    let mut best = 0.0_f64;
    for (i, &x) in grid.nodes.iter().enumerate() {
        let mut acc = 0.0;
        for &j in &support {
            let k = if i == j { diag } else { kernel(dist(x, grid.nodes[j])) };
            acc += k * w[j].abs() * grid.weights[j];
        }
        best = best.max(acc);
    }
    best
}

/// Smallest eigenvalue of `L₋ = -Δ + μ - V1 + V2` with five-point Dirichlet
/// differences.
pub fn l_minus_min_eig(pot: &MatrixPotential, grid: &Grid2D, mu: f64) -> Result<f64> {
    if grid.n < 10 {
        return Err(Error::Resolution(format!(
            "need at least 8x8 interior nodes, grid has {}x{}",
            grid.n.saturating_sub(2),
            grid.n.saturating_sub(2)
        )));
    }
    let interior = fd::interior_nodes(grid);
    let mut a = fd::neg_laplacian(grid);
    for (p, &k) in interior.iter().enumerate() {
        a[(p, p)] += mu - pot.v1_scalar[k] + pot.v2_scalar[k];
    }
    let ev = a
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(ev.into_iter().fold(f64::INFINITY, f64::min))
}

pub fn check_assumptions(pot: &MatrixPotential, grid: &Grid2D, mu: f64) -> Result<AssumptionReport> {
    if pot.nodes() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            got: pot.nodes(),
        });
    }
    let a1_margin = pot
        .v1_scalar
        .iter()
        .zip(&pot.v2_scalar)
        .map(|(p, q)| p - q.abs())
        .fold(f64::INFINITY, f64::min);
    let a1_ok = a1_margin >= -A1_TOLERANCE;
    let a2_min_eig = l_minus_min_eig(pot, grid, mu)?;
    let a2_band = 5.0 * grid.h * grid.h;
    let a2_ok = a2_min_eig >= -a2_band;

    let ab_stat = |lo: f64, hi: f64| {
        annulus(grid, lo, hi)
            .iter()
            .map(|&k| (pot.a[k].abs() + pot.b[k].abs()) * japanese(grid.nodes[k]).powf(1.51))
            .fold(0.0, f64::max)
    };
    let ab_decay_stat = [ab_stat(0.4, 0.7), ab_stat(0.7, 1.0)];

    let w: Vec<f64> = pot
        .v1_scalar
        .iter()
        .zip(&pot.v2_scalar)
        .map(|(p, q)| p.abs() + q.abs())
        .collect();
    let kato = kato_norm(grid, &w);

    let mut notes = Vec::new();
    if pot.beta_fit >= SUPER_POLYNOMIAL_BETA {
        notes.push("V decays faster than any power; beta reported as 99".to_string());
    } else if pot.beta_fit <= 3.0 {
        notes.push(format!("fitted beta {:.3} does not exceed 3", pot.beta_fit));
    }
    if ab_decay_stat[1] > ab_decay_stat[0] {
        notes.push("(|a|+|b|)<x>^1.51 grows towards the boundary".to_string());
    }
    if !a2_ok {
        notes.push(format!(
            "L- has eigenvalue {a2_min_eig:.3e} below the discretization band -{a2_band:.3e}"
        ));
    }
    Ok(AssumptionReport {
        a1_ok,
        a1_margin,
        a2_min_eig,
        a2_band,
        a2_ok,
        a3_beta: pot.beta_fit,
        ab_decay_stat,
        kato_norm: kato,
        notes: notes.join("; "),
    })
}

/// Exact `∫_{|y|<ρ} (1 + log⁻|y|)² dy` for `ρ ≤ 1`, used to check [`kato_norm`].
pub fn kato_disk_at_center(rho: f64) -> f64 {
    // ∫_0^ρ (1 - ln r)² r dr
    let l = rho.ln();
    2.0 * PI * rho * rho * (0.5 * (1.0 - l) * (1.0 - l) + 0.5 * (1.0 - l) + 0.25)
}
