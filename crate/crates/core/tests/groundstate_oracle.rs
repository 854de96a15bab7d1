//! Independent check of the shooting solver: Newton iteration on a
//! second-order finite-difference discretization of the radial boundary
//! value problem.

use dispersim_core::groundstate::{solve_ground_state, GroundState};

/// Solves `φ'' + φ'/r - μφ + φ³ = 0`, `φ'(0) = 0`, `φ(R) = 0` on `m` cells.
/// Newton is seeded with `guess`, rounded to one digit so the oracle has to
/// find the solution of its own discretization.
fn newton_fd(mu: f64, big_r: f64, m: usize, guess: impl Fn(f64) -> f64) -> (f64, Vec<f64>) {
    let h = big_r / m as f64;
    let mut phi: Vec<f64> = (0..=m)
        .map(|k| {
            let r = k as f64 * h;
            if k == m {
                0.0
            } else {
                (guess(r) * 10.0).round() / 10.0
            }
        })
        .collect();
    for _ in 0..50 {
        // tridiagonal system for the Newton update on unknowns 0..m-1
        let n = m;
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut f = vec![0.0; n];
        for k in 0..n {
            let p = phi[k];
            if k == 0 {
                // symmetric ghost point: φ'' + φ'/r → 2φ'' at the origin
                let d2 = 2.0 * (phi[1] - p) / (h * h);
                f[k] = 2.0 * d2 - mu * p + p * p * p;
                b[k] = -4.0 / (h * h) - mu + 3.0 * p * p;
                c[k] = 4.0 / (h * h);
            } else {
                let r = k as f64 * h;
                let pn = phi[k + 1];
                let pp = phi[k - 1];
                f[k] = (pn - 2.0 * p + pp) / (h * h) + (pn - pp) / (2.0 * h * r) - mu * p + p * p * p;
                a[k] = 1.0 / (h * h) - 1.0 / (2.0 * h * r);
                b[k] = -2.0 / (h * h) - mu + 3.0 * p * p;
                c[k] = if k + 1 < n { 1.0 / (h * h) + 1.0 / (2.0 * h * r) } else { 0.0 };
            }
        }
        // Thomas algorithm for J δ = -f
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c[0] / b[0];
        dp[0] = -f[0] / b[0];
        for k in 1..n {
            let den = b[k] - a[k] * cp[k - 1];
            cp[k] = c[k] / den;
            dp[k] = (-f[k] - a[k] * dp[k - 1]) / den;
        }
        let mut delta = vec![0.0; n];
        delta[n - 1] = dp[n - 1];
        for k in (0..n - 1).rev() {
            delta[k] = dp[k] - cp[k] * delta[k + 1];
        }
        let step = delta.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        for k in 0..n {
            phi[k] += delta[k];
        }
        if step < 1e-13 {
            break;
        }
    }
    (phi[0], phi)
}

fn at(gs: &GroundState, r: f64) -> f64 {
    gs.eval(r)
}

#[test]
fn shooting_agrees_with_newton_finite_differences() {
    let gs = solve_ground_state(1.0, 1.0, 20.0, 1e-4).unwrap();
    // Richardson extrapolation of the O(h²) oracle
    let (p1, v1) = newton_fd(1.0, 20.0, 4000, |r| gs.eval(r));
    let (p2, v2) = newton_fd(1.0, 20.0, 8000, |r| gs.eval(r));
    let p = (4.0 * p2 - p1) / 3.0;
    assert!((gs.phi0() - p).abs() < 1e-6, "shooting {} vs oracle {p}", gs.phi0());
    for &r in &[0.5, 1.0, 2.0, 4.0] {
        let k1 = (r / 20.0 * 4000.0) as usize;
        let k2 = 2 * k1;
        let o = (4.0 * v2[k2] - v1[k1]) / 3.0;
        assert!((at(&gs, r) - o).abs() < 1e-6, "r = {r}");
    }
}
