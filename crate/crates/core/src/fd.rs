//! Five-point finite differences on the interior of a [`Grid2D`] with
//! homogeneous Dirichlet truncation.

use faer::Mat;

use crate::gridops::Grid2D;

/// Interior node indices in grid order.
pub fn interior_nodes(grid: &Grid2D) -> Vec<usize> {
    (0..grid.len()).filter(|&k| !grid.is_boundary(k)).collect()
}

/// Dense `-Δ_h` on the interior nodes.
pub fn neg_laplacian(grid: &Grid2D) -> Mat<f64> {
    let interior = interior_nodes(grid);
    let m = interior.len();
    let side = grid.n - 2;
    let inv_h2 = 1.0 / (grid.h * grid.h);
    let mut a = Mat::zeros(m, m);
    for p in 0..m {
        let (i, j) = (p / side, p % side);
        a[(p, p)] = 4.0 * inv_h2;
        if i > 0 {
            a[(p, p - side)] = -inv_h2;
        }
        if i + 1 < side {
            a[(p, p + side)] = -inv_h2;
        }
        if j > 0 {
            a[(p, p - 1)] = -inv_h2;
        }
        if j + 1 < side {
            a[(p, p + 1)] = -inv_h2;
        }
    }
    a
}

/// `(-Δ_h u)` at interior nodes for a field given on all nodes, with the
/// boundary values of `u` used as-is.
pub fn apply_neg_laplacian(grid: &Grid2D, u: &[f64]) -> Vec<f64> {
    let n = grid.n;
    let inv_h2 = 1.0 / (grid.h * grid.h);
    interior_nodes(grid)
        .into_iter()
        .map(|k| (4.0 * u[k] - u[k - 1] - u[k + 1] - u[k - n] - u[k + n]) * inv_h2)
        .collect()
}
