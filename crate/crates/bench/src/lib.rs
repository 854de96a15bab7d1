//! Shared fixtures for the benchmarks.

use dispersim_core::groundstate::solve_ground_state;
use dispersim_core::potential::{linearized_potential, MatrixPotential};
use dispersim_core::{make_grid, Grid2D};

/// Townes linearization scaled by `eps` on a `n × n` grid of half-width `extent`.
pub fn townes(extent: f64, n: usize, eps: f64) -> (Grid2D, MatrixPotential) {
    let gs = solve_ground_state(1.0, 1.0, 20.0, 1e-6).expect("Townes profile");
    let g = make_grid(extent, n).expect("grid");
    let p = linearized_potential(&gs, &g).expect("potential").scaled(eps).expect("scale");
    (g, p)
}
