//! Thin helpers over the dense solvers.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{c64, Mat};

use crate::error::{Error, Result};

/// LU factorization that refuses numerically singular matrices.
pub struct Lu {
    lu: faer::linalg::solvers::PartialPivLu<c64>,
}

impl Lu {
    /// `lambda` is only used to label the error.
    pub fn new(a: &Mat<c64>, lambda: f64) -> Result<Self> {
        let lu = a.partial_piv_lu();
        let u = lu.U();
        let mut dmin = f64::INFINITY;
        let mut dmax = 0.0_f64;
        for i in 0..u.nrows() {
            let d = u[(i, i)].norm();
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
        if !(dmin > 1e-13 * dmax) || !dmax.is_finite() {
            return Err(Error::Singular { lambda });
        }
        Ok(Self { lu })
    }

    pub fn solve(&self, b: &Mat<c64>) -> Mat<c64> {
        self.lu.solve(b)
    }

    pub fn inverse(&self) -> Mat<c64> {
        self.lu.inverse()
    }
}

pub fn inverse(a: &Mat<c64>, lambda: f64) -> Result<Mat<c64>> {
    Ok(Lu::new(a, lambda)?.inverse())
}

pub fn singular_values_real(a: &Mat<f64>) -> Result<Vec<f64>> {
    a.singular_values().map_err(|e| Error::Eigen(format!("SVD failed: {e:?}")))
}

pub fn frobenius(a: &Mat<c64>) -> f64 {
    a.norm_l2()
}

pub fn max_abs(a: &Mat<c64>) -> f64 {
    let mut m = 0.0_f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn to_complex(a: &Mat<f64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| c64::new(a[(i, j)], 0.0))
}

/// `exp(i t H) f` by Taylor steps on a scaled time step, for real `H`.
pub fn expm_i_apply(h: &Mat<f64>, t: f64, f: &[c64]) -> Vec<c64> {
    let dim = h.nrows();
    let norm = (0..dim)
        .map(|j| (0..dim).map(|i| h[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * t.abs();
    let steps = (2.0 * norm).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let hc = to_complex(h);
    let mut v = Mat::from_fn(dim, 1, |i, _| f[i]);
    for _ in 0..steps {
        // ‖i dt H‖ ≤ 1/2, so 24 terms are far below rounding
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..=24 {
            term = &hc * &term * faer::Scale(c64::new(0.0, dt / k as f64));
            acc += &term;
        }
        v = acc;
    }
    (0..dim).map(|i| v[(i, 0)]).collect()
}

/// Caps the worker count used by dense kernels; `1` runs them sequentially.
pub fn cap_parallelism(threads: usize) {
    faer::set_global_parallelism(if threads <= 1 {
        faer::Par::Seq
    } else {
        faer::Par::rayon(threads)
    });
}
