use faer::c64;
use rayon::prelude::*;

use super::expansion::ThresholdCore;
use crate::error::{Error, Result};
use crate::gridops::{calg0_diagonal, calg0_radial, inner, l2_norm, Grid2D, OffsetTable};
use crate::potential::MatrixPotential;

/// Largest admissible `‖QTQφ‖ / ‖φ‖`.
pub const KERNEL_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct ZeroMode {
    /// `ψ = -𝒢0 v1 φ + (c0, 0)`, component-major.
    pub psi: Vec<c64>,
    pub c0: c64,
    /// `‖QTQφ‖ / ‖φ‖`.
    pub kernel_residual: f64,
}

fn calg0_table(mu: f64, grid: &Grid2D) -> Result<OffsetTable> {
    OffsetTable::new(grid, |r| calg0_radial(mu, r), calg0_diagonal(mu, grid.h))
}

/// Rebuilds the threshold resonance `ψ` from an element of `ker QTQ`.
pub fn zero_mode(
    core: impl AsRef<ThresholdCore>,
    pot: &MatrixPotential,
    grid: &Grid2D,
    kernel_vec: &[c64],
) -> Result<ZeroMode> {
    let core = core.as_ref();
    let table = calg0_table(core.mu, grid)?;
    construct(core.mu, pot, grid, kernel_vec, &table, &|f| core.transfer_t.apply(f))
}

/// As [`zero_mode`], without assembling `T`; memory stays `O(N)`.
pub fn zero_mode_direct(
    mu: f64,
    pot: &MatrixPotential,
    grid: &Grid2D,
    kernel_vec: &[c64],
) -> Result<ZeroMode> {
    let table = calg0_table(mu, grid)?;
    let apply_t = |f: &[c64]| -> Result<Vec<c64>> {
        let g = table.apply(grid, &pot.v1().apply(f))?;
        let v2g = pot.v2().apply(&g);
        Ok(f.iter().zip(&v2g).map(|(a, b)| a + b).collect())
    };
    construct(mu, pot, grid, kernel_vec, &table, &apply_t)
}

type Apply<'a> = dyn Fn(&[c64]) -> Result<Vec<c64>> + 'a;

fn construct(
    mu: f64,
    pot: &MatrixPotential,
    grid: &Grid2D,
    kernel_vec: &[c64],
    g0: &OffsetTable,
    apply_t: &Apply<'_>,
) -> Result<ZeroMode> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    let n = grid.len();
    if kernel_vec.len() != 2 * n {
        return Err(Error::Dimension {
            expected: 2 * n,
            got: kernel_vec.len(),
        });
    }
    let w = &grid.weights;
    let norm = l2_norm(w, kernel_vec);
    if !(norm > 0.0) {
        return Err(Error::NotKernelElement { residual: f64::NAN });
    }
    let u: Vec<c64> = pot.a.iter().chain(&pot.b).map(|&x| c64::new(x, 0.0)).collect();
    let norm_ab = pot.norm_ab(grid);
    let q = |f: &[c64]| -> Vec<c64> {
        let coef = inner(w, f, &u) / norm_ab;
        f.iter().zip(&u).map(|(a, b)| a - b * coef).collect()
    };
    let qphi = q(kernel_vec);
    let qtq = q(&apply_t(&qphi)?);
    // a component along u is not in ker QTQ either
    let along_u: Vec<c64> = kernel_vec.iter().zip(&qphi).map(|(a, b)| a - b).collect();
    let residual = (l2_norm(w, &qtq) + l2_norm(w, &along_u)) / norm;
    if !(residual <= KERNEL_TOLERANCE) {
        return Err(Error::NotKernelElement { residual });
    }

    let c0 = inner(w, &apply_t(kernel_vec)?, &u) / norm_ab;
    let v1phi = pot.v1().apply(kernel_vec);
    let mut psi: Vec<c64> = g0.apply(grid, &v1phi)?.iter().map(|z| -z).collect();
    for z in psi.iter_mut().take(n) {
        *z += c0;
    }
    Ok(ZeroMode {
        psi,
        c0,
        kernel_residual: residual,
    })
}

/// A scalar-like potential `V1 = c·w`, `V2 = 0` tuned so that `QTQ` has an
/// exact kernel on the grid, together with that kernel element.
#[derive(Clone, Debug)]
pub struct ScalarResonance {
    pub coupling: f64,
    pub potential: MatrixPotential,
    pub kernel_vec: Vec<c64>,
    pub iterations: usize,
}

/// `w` must be nonnegative. The smallest positive coupling is returned.
///
/// With `V2 = 0` the top-left block of `T` is `I - c·a0 G0 a0`, so the
/// resonant `c` is the reciprocal of the top eigenvalue of `Q a0 G0 a0 Q`,
/// found by power iteration (the operator is nonnegative on `ran Q`).
pub fn scalar_resonance(grid: &Grid2D, mu: f64, w: &[f64]) -> Result<ScalarResonance> {
    let n = grid.len();
    if w.len() != n || w.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::InvalidArgument(
            "profile must be a nonnegative grid field".into(),
        ));
    }
    let sw: Vec<f64> = grid.weights.iter().map(|x| x.sqrt()).collect();
    let a0: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let mut uh: Vec<f64> = (0..n).map(|i| sw[i] * a0[i]).collect();
    let un = uh.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(un > 0.0) {
        return Err(Error::InvalidArgument("profile vanishes".into()));
    }
    uh.iter_mut().for_each(|x| *x /= un);
    let project = |x: &mut [f64]| {
        let d: f64 = x.iter().zip(&uh).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(&uh).for_each(|(a, b)| *a -= d * b);
    };
    // G0 by offset; only the top-left block enters
    let side = grid.n;
    let g0: Vec<f64> = (0..side * side)
        .map(|k| {
            let (di, dj) = (k / side, k % side);
            if k == 0 {
                calg0_diagonal(mu, grid.h)[0][0].re
            } else {
                calg0_radial(mu, grid.h * (di as f64).hypot(dj as f64))[0][0].re
            }
        })
        .collect();
    // symmetric form W^{1/2} a0 G0 a0 W^{1/2}
    let c: Vec<f64> = (0..n).map(|i| sw[i] * a0[i]).collect();
    let apply = |x: &[f64]| -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a * b).collect();
        (0..n)
            .into_par_iter()
            .map(|p| {
                let (pi, pj) = (p / side, p % side);
                let mut acc = 0.0;
                for qi in 0..side {
                    let row = &g0[pi.abs_diff(qi) * side..][..side];
                    let yq = &y[qi * side..][..side];
                    for qj in 0..side {
                        acc += row[pj.abs_diff(qj)] * yq[qj];
                    }
                }
                c[p] * acc
            })
            .collect()
    };

    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (i as f64 * 0.7).sin()).collect();
    project(&mut x);
    let mut kappa = 0.0;
    let mut iterations = 0;
    for it in 1..=5000 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        let mut y = apply(&x);
        project(&mut y);
        kappa = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        let res = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (b - kappa * a).powi(2))
            .sum::<f64>()
            .sqrt();
        x = y;
        iterations = it;
        if res <= 1e-12 * kappa.abs() {
            break;
        }
    }
    if !(kappa > 0.0) {
        return Err(Error::Eigen("no positive eigenvalue on ran Q".into()));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let coupling = 1.0 / kappa;
    let mut kernel_vec = vec![c64::new(0.0, 0.0); 2 * n];
    for i in 0..n {
        kernel_vec[i] = c64::new(x[i] / norm / sw[i], 0.0);
    }
    let v1 = w.iter().map(|x| coupling * x).collect();
    let potential = MatrixPotential::from_fields(grid, v1, vec![0.0; n])?;
    Ok(ScalarResonance {
        coupling,
        potential,
        kernel_vec,
        iterations,
    })
}
