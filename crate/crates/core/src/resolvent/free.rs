use faer::c64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gridops::{
    assemble_radial, calg0_radial, dist, radial_cell_average, Block, Grid2D, KernelOperator,
};
use crate::specfun::{bessel_k0, hankel0, Sign, EULER_GAMMA};

/// Which half of the essential spectrum a spectral parameter lives on.
///
/// `Upper`: `z = μ + λ²`; `Lower`: `z = -μ - λ²`. The [`Sign`] selects the
/// boundary value `z ± i0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Branch {
    Upper,
    Lower,
}

const I: c64 = c64 { re: 0.0, im: 1.0 };

/// `g±(λ) = ±i/4 - (1/2π) log(λ/2) - γ/(2π)`.
pub fn g_pm(sign: Sign, lambda: f64) -> Result<c64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("g± needs lambda > 0, got {lambda}")));
    }
    Ok(g_unchecked(sign, lambda))
}

fn g_unchecked(sign: Sign, lambda: f64) -> c64 {
    c64::new(
        -(0.5 * lambda).ln() / (2.0 * PI) - EULER_GAMMA / (2.0 * PI),
        0.25 * sign.as_f64(),
    )
}

/// `±(i/4) H0±(λ r)`, the outgoing/incoming kernel of `(-Δ - λ² ∓ i0)⁻¹`.
fn scalar_outgoing(sign: Sign, lambda: f64, r: f64) -> c64 {
    I * (0.25 * sign.as_f64()) * hankel0(sign, lambda * r)
}

/// `-(1/2π) K0(k r)`, the kernel of `-(−Δ + k²)⁻¹`.
fn scalar_yukawa(k: f64, r: f64) -> c64 {
    c64::new(-bessel_k0(k * r) / (2.0 * PI), 0.0)
}

/// Kernel of `(H0 - z)⁻¹` at distance `r > 0`.
///
/// Upper branch: `diag(±(i/4)H0±(λr), -(1/2π)K0(√(2μ+λ²) r))`.
/// Lower branch: `diag((1/2π)K0(√(2μ+λ²) r), ±(i/4)H0∓(λr))`.
pub fn free_radial(branch: Branch, sign: Sign, lambda: f64, mu: f64, r: f64) -> Block {
    let k = (2.0 * mu + lambda * lambda).sqrt();
    let zero = c64::new(0.0, 0.0);
    match branch {
        Branch::Upper => [
            [scalar_outgoing(sign, lambda, r), zero],
            [zero, scalar_yukawa(k, r)],
        ],
        Branch::Lower => [
            [-scalar_yukawa(k, r), zero],
            [zero, -scalar_outgoing(sign.flip(), lambda, r)],
        ],
    }
}

/// Cell average of [`free_radial`] over the square of side `h` at `x = y`.
pub fn free_diagonal(branch: Branch, sign: Sign, lambda: f64, mu: f64, h: f64) -> Block {
    // both branches: top-left ~ -(1/2π) log r, bottom-right ~ +(1/2π) log r
    let alpha = 1.0 / (2.0 * PI);
    let zero = c64::new(0.0, 0.0);
    let tl = radial_cell_average(|r| free_radial(branch, sign, lambda, mu, r)[0][0], -alpha, h);
    let br = radial_cell_average(|r| free_radial(branch, sign, lambda, mu, r)[1][1], alpha, h);
    [[tl, zero], [zero, br]]
}

fn check_points(x: [f64; 2], y: [f64; 2], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let r = dist(x, y);
    if r == 0.0 {
        return Err(Error::Domain(
            "free resolvent kernel is singular at coincident points".into(),
        ));
    }
    Ok(r)
}

/// Kernel of `ℛ0±(μ + λ²)` at `(x, y)`.
pub fn free_resolvent(sign: Sign, lambda: f64, mu: f64, x: [f64; 2], y: [f64; 2]) -> Result<Block> {
    let r = check_points(x, y, lambda)?;
    Ok(free_radial(Branch::Upper, sign, lambda, mu, r))
}

/// Kernel of `ℛ0±` on either branch.
pub fn free_resolvent_branch(
    branch: Branch,
    sign: Sign,
    lambda: f64,
    mu: f64,
    x: [f64; 2],
    y: [f64; 2],
) -> Result<Block> {
    let r = check_points(x, y, lambda)?;
    Ok(free_radial(branch, sign, lambda, mu, r))
}

/// `E0± = ℛ0±(μ+λ²) - g±(λ) M11 - 𝒢0`.
pub fn e0_remainder(sign: Sign, lambda: f64, mu: f64, x: [f64; 2], y: [f64; 2]) -> Result<Block> {
    let r = check_points(x, y, lambda)?;
    let mut out = free_radial(Branch::Upper, sign, lambda, mu, r);
    let g0 = calg0_radial(mu, r);
    out[0][0] -= g_unchecked(sign, lambda) + g0[0][0];
    out[1][1] -= g0[1][1];
    Ok(out)
}

/// Nyström matrix of `ℛ0±` on the grid.
pub fn assemble_free(
    branch: Branch,
    sign: Sign,
    lambda: f64,
    mu: f64,
    grid: &Grid2D,
) -> Result<KernelOperator> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    assemble_radial(
        grid,
        |r| free_radial(branch, sign, lambda, mu, r),
        free_diagonal(branch, sign, lambda, mu, grid.h),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridops::calg0_kernel;
    use crate::specfun::bessel_j0;

    #[test]
    fn g_difference_is_i_over_2() {
        for &l in &[1e-4, 0.3, 2.0, 17.0] {
            let d = g_pm(Sign::Plus, l).unwrap() - g_pm(Sign::Minus, l).unwrap();
            assert!((d - c64::new(0.0, 0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn g_at_two() {
        let g = g_pm(Sign::Plus, 2.0).unwrap();
        // γ_E / 2π = 0.09186672629915...
        assert!((g.re + 0.091_866_726_299_15).abs() < 1e-12, "{}", g.re);
        assert_eq!(g.im, 0.25);
        assert!(g_pm(Sign::Minus, 0.2).unwrap().re > g_pm(Sign::Minus, 2.0).unwrap().re);
        assert!(g_pm(Sign::Plus, 0.0).is_err());
    }

    #[test]
    fn difference_identity_upper() {
        let (x, y) = ([0.3, -1.0], [2.0, 0.5]);
        for &l in &[1e-3, 0.5, 4.9] {
            let p = free_resolvent(Sign::Plus, l, 1.0, x, y).unwrap();
            let m = free_resolvent(Sign::Minus, l, 1.0, x, y).unwrap();
            let j = bessel_j0(l * dist(x, y));
            assert!((p[0][0] - m[0][0] - c64::new(0.0, 0.5 * j)).norm() < 1e-12);
            assert!((p[1][1] - m[1][1]).norm() == 0.0);
        }
    }

    #[test]
    fn difference_identity_lower() {
        let (x, y) = ([0.0, 0.0], [1.5, 0.5]);
        let l = 0.7;
        let p = free_resolvent_branch(Branch::Lower, Sign::Plus, l, 1.0, x, y).unwrap();
        let m = free_resolvent_branch(Branch::Lower, Sign::Minus, l, 1.0, x, y).unwrap();
        assert_eq!(p[0][0], m[0][0]);
        let j = bessel_j0(l * dist(x, y));
        assert!((p[1][1] - m[1][1] - c64::new(0.0, 0.5 * j)).norm() < 1e-12);
    }

    #[test]
    fn bottom_right_matches_hankel_at_imaginary_argument() {
        // -(i/4) H0+(i k r) = -(1/2π) K0(k r)
        let r: f64 = 0.8;
        let mu: f64 = 0.5;
        let l = 0.3;
        let k = (2.0 * mu + l * l).sqrt();
        let via_hankel = c64::new(0.0, -0.25) * c64::new(0.0, -2.0 / PI) * bessel_k0(k * r);
        let b = free_resolvent(Sign::Plus, l, mu, [0.0, 0.0], [r, 0.0]).unwrap();
        assert!((b[1][1] - via_hankel).norm() < 1e-15);
        assert!(b[1][1].re < 0.0);
    }

    #[test]
    fn e0_vanishes_at_threshold() {
        let (x, y) = ([0.0, 0.0], [1.0, 1.0]);
        let mut prev = f64::INFINITY;
        for k in 1..6 {
            let l = 10f64.powi(-k);
            let e = e0_remainder(Sign::Plus, l, 1.0, x, y).unwrap();
            let size = e.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(size < prev);
            prev = size;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn calg0_is_threshold_limit() {
        let (x, y) = ([0.2, 0.0], [0.0, 0.7]);
        let g = calg0_kernel(1.0, x, y);
        let r = free_resolvent(Sign::Plus, 1e-7, 1.0, x, y).unwrap();
        assert!((r[1][1].re - g[1][1]).abs() < 1e-10);
    }

    #[test]
    fn diagonal_average_agrees_with_log_model_for_small_cells() {
        let h = 1e-3;
        let d = free_diagonal(Branch::Upper, Sign::Plus, 0.5, 1.0, h);
        let model = g_pm(Sign::Plus, 0.5).unwrap() - crate::gridops::log_cell_average(h) / (2.0 * PI);
        assert!((d[0][0] - model).norm() < 1e-6);
        let k = (2.0f64 + 0.25).sqrt();
        let br_model = (crate::gridops::log_cell_average(h) + (0.5 * k).ln() + EULER_GAMMA) / (2.0 * PI);
        assert!((d[1][1].re - br_model).abs() < 1e-6, "{} {}", d[1][1], br_model);
    }
}
