use faer::c64;
use std::f64::consts::{LN_2, PI};

use super::grid::{dist, Grid2D};
use super::operator::{assemble_radial, diag_block, Block, Kernel, KernelOperator};
use crate::error::Result;
use crate::quad::gauss_legendre_on;
use crate::specfun::{bessel_k0, EULER_GAMMA};

/// Mean of `log|x|` over the square `[-1/2, 1/2]²`.
pub const LOG_CELL_AVERAGE: f64 = PI / 4.0 - 1.5 - LN_2 / 2.0;

/// Mean of `log|x|` over a centred square cell of side `h`.
pub fn log_cell_average(h: f64) -> f64 {
    h.ln() + LOG_CELL_AVERAGE
}

/// Cell average of a radial kernel `f(r) = alpha log r + (continuous)`:
/// the logarithm is averaged exactly, the remainder by product Gauss rules
/// on one quadrant.
pub fn radial_cell_average<F: Fn(f64) -> c64>(f: F, alpha: f64, h: f64) -> c64 {
    let (x, w) = gauss_legendre_on(24, 0.0, 0.5 * h);
    let area = 0.25 * h * h;
    let mut acc = c64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(&w) {
        for (yj, wj) in x.iter().zip(&w) {
            let r = xi.hypot(*yj);
            acc += (f(r) - alpha * r.ln()) * (wi * wj);
        }
    }
    acc / area + alpha * log_cell_average(h)
}

/// `G0(x, y) = -(1/2π) log|x - y|`, the fundamental solution of `-Δ`.
pub fn g0_kernel(x: [f64; 2], y: [f64; 2]) -> f64 {
    -dist(x, y).ln() / (2.0 * PI)
}

/// `𝒢₀ = (H₀ - μ)⁻¹` kernel: `diag(-(1/2π) log r, -(1/2π) K₀(√(2μ) r))`.
pub fn calg0_kernel(mu: f64, x: [f64; 2], y: [f64; 2]) -> [[f64; 2]; 2] {
    let r = dist(x, y);
    let b = calg0_radial(mu, r);
    [[b[0][0].re, 0.0], [0.0, b[1][1].re]]
}

pub fn calg0_radial(mu: f64, r: f64) -> Block {
    let k = (2.0 * mu).sqrt();
    diag_block(
        c64::new(-r.ln() / (2.0 * PI), 0.0),
        c64::new(-bessel_k0(k * r) / (2.0 * PI), 0.0),
    )
}

/// Cell-averaged diagonal of [`calg0_radial`].
pub fn calg0_diagonal(mu: f64, h: f64) -> Block {
    let k = (2.0 * mu).sqrt();
    let tl = -log_cell_average(h) / (2.0 * PI);
    let br = radial_cell_average(|r| c64::new(-bessel_k0(k * r) / (2.0 * PI), 0.0), 1.0 / (2.0 * PI), h);
    diag_block(c64::new(tl, 0.0), br)
}

/// `𝒢₀` as a [`Kernel`] with its singular diagonal.
pub struct CalG0 {
    pub mu: f64,
}

impl Kernel for CalG0 {
    fn eval(&self, x: [f64; 2], y: [f64; 2]) -> Block {
        calg0_radial(self.mu, dist(x, y))
    }

    fn diagonal(&self, _x: [f64; 2], h: f64) -> Block {
        calg0_diagonal(self.mu, h)
    }
}

/// Scalar `G0` in the top-left block, zero elsewhere.
pub fn assemble_g0(grid: &Grid2D) -> Result<KernelOperator> {
    let zero = c64::new(0.0, 0.0);
    assemble_radial(
        grid,
        |r| diag_block(c64::new(-r.ln() / (2.0 * PI), 0.0), zero),
        diag_block(c64::new(-log_cell_average(grid.h) / (2.0 * PI), 0.0), zero),
    )
}

pub fn assemble_calg0(mu: f64, grid: &Grid2D) -> Result<KernelOperator> {
    assemble_radial(grid, |r| calg0_radial(mu, r), calg0_diagonal(mu, grid.h))
}

/// `K0(k r)` near `r = 0` behaves like `-log r - log(k/2) - γ`; exposed for
/// diagnostics of the diagonal replacement.
pub fn k0_log_model(k: f64, r: f64) -> f64 {
    -(0.5 * k * r).ln() - EULER_GAMMA
}
