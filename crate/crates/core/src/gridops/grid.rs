use crate::error::{Error, Result};

/// Uniform tensor-product grid on `[-extent, extent]²` with trapezoid weights.
///
/// Node `k = i * n + j` sits at `(-extent + i h, -extent + j h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    pub extent: f64,
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

pub fn make_grid(extent: f64, n: usize) -> Result<Grid2D> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("grid needs n >= 8, got {n}")));
    }
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(Error::InvalidArgument(format!("extent must be positive, got {extent}")));
    }
    let h = 2.0 * extent / (n - 1) as f64;
    let axis_w = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };
    let coord = |i: usize| extent * (2.0 * i as f64 - (n - 1) as f64) / (n - 1) as f64;
    let mut nodes = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            nodes.push([coord(i), coord(j)]);
            weights.push(axis_w(i) * axis_w(j));
        }
    }
    Ok(Grid2D {
        extent,
        n,
        h,
        nodes,
        weights,
    })
}

impl Grid2D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k / self.n, k % self.n)
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = self.ij(k);
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    /// Node closest to `x`.
    pub fn nearest(&self, x: [f64; 2]) -> usize {
        let snap = |c: f64| (((c + self.extent) / self.h).round().max(0.0) as usize).min(self.n - 1);
        self.index(snap(x[0]), snap(x[1]))
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn field<F: Fn([f64; 2]) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// Weighted L² norm of a scalar field.
    pub fn l2_norm(&self, f: &[f64]) -> f64 {
        f.iter()
            .zip(&self.weights)
            .map(|(a, w)| a * a * w)
            .sum::<f64>()
            .sqrt()
    }
}

pub fn dist(x: [f64; 2], y: [f64; 2]) -> f64 {
    (x[0] - y[0]).hypot(x[1] - y[1])
}
