//! Positive radial solution of `μφ - Δφ = φ^{2γ+1}` in two dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::bessel_k0;

/// Radial steps per solve.
pub const DEFAULT_STEPS: usize = 8192;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroundState {
    pub gamma: f64,
    pub mu: f64,
    pub r_nodes: Vec<f64>,
    pub phi_values: Vec<f64>,
    pub decay_rate: f64,
    /// Radius beyond which the profile is the linear tail `C K0(√μ r)`.
    pub tail_start: f64,
    /// Max second-order finite-difference ODE residual over interior nodes.
    pub ode_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shot {
    /// Crossed zero: initial value too large.
    Over,
    /// Turned upward while positive: initial value too small.
    Under,
    /// Reached the end monotonically.
    Inconclusive,
}

struct Trajectory {
    phi: Vec<f64>,
    dphi: Vec<f64>,
    outcome: Shot,
}

fn rhs(gamma: f64, mu: f64, r: f64, phi: f64, dphi: f64) -> f64 {
    let nl = phi.abs().powf(2.0 * gamma) * phi;
    -dphi / r + mu * phi - nl
}

/// RK4 from the series start at `r = h`; stops at the first sign change of
/// `φ` or `φ'`.
fn shoot(gamma: f64, mu: f64, phi0: f64, h: f64, steps: usize) -> Result<Trajectory> {
    let c = (mu * phi0 - phi0.powf(2.0 * gamma + 1.0)) / 4.0;
    let mut phi = Vec::with_capacity(steps + 1);
    let mut dphi = Vec::with_capacity(steps + 1);
    phi.push(phi0);
    dphi.push(0.0);
    let mut y = phi0 + c * h * h;
    let mut v = 2.0 * c * h;
    phi.push(y);
    dphi.push(v);
    let f = |r: f64, y: f64, v: f64| rhs(gamma, mu, r, y, v);
    for k in 1..steps {
        let r = k as f64 * h;
        let (k1y, k1v) = (v, f(r, y, v));
        let (k2y, k2v) = (v + 0.5 * h * k1v, f(r + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v));
        let (k3y, k3v) = (v + 0.5 * h * k2v, f(r + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v));
        let (k4y, k4v) = (v + h * k3v, f(r + h, y + h * k3y, v + h * k3v));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !y.is_finite() || !v.is_finite() {
            return Err(Error::StepSize { r: r + h });
        }
        phi.push(y);
        dphi.push(v);
        if y <= 0.0 {
            return Ok(Trajectory { phi, dphi, outcome: Shot::Over });
        }
        if v > 0.0 {
            return Ok(Trajectory { phi, dphi, outcome: Shot::Under });
        }
    }
    Ok(Trajectory {
        phi,
        dphi,
        outcome: Shot::Inconclusive,
    })
}

pub fn solve_ground_state(gamma: f64, mu: f64, r_max: f64, tol: f64) -> Result<GroundState> {
    solve_ground_state_steps(gamma, mu, r_max, tol, DEFAULT_STEPS)
}

/// As [`solve_ground_state`] with an explicit number of radial steps.
pub fn solve_ground_state_steps(
    gamma: f64,
    mu: f64,
    r_max: f64,
    tol: f64,
    steps: usize,
) -> Result<GroundState> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if !(r_max >= 20.0 / mu.sqrt() * (1.0 - 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "r_max must be at least 20/sqrt(mu) = {}, got {r_max}",
            20.0 / mu.sqrt()
        )));
    }
    if steps < 64 {
        return Err(Error::InvalidArgument("need at least 64 radial steps".into()));
    }
    let h = r_max / steps as f64;

    // Below φ0 = μ^{1/2γ} the profile curves upward immediately.
    let mut lo = 0.999 * mu.powf(0.5 / gamma);
    if shoot(gamma, mu, lo, h, steps)?.outcome != Shot::Under {
        return Err(Error::NoGroundState(format!("lower bracket {lo} does not undershoot")));
    }
    let mut hi = 2.0 * lo;
    let mut found = false;
    for _ in 0..60 {
        match shoot(gamma, mu, hi, h, steps)?.outcome {
            Shot::Over => {
                found = true;
                break;
            }
            _ => {
                lo = hi;
                hi *= 1.5;
            }
        }
    }
    if !found {
        return Err(Error::NoGroundState(
            "no overshooting initial value found while expanding the bracket".into(),
        ));
    }
    // Bisection to machine resolution; the tail switch below needs the
    // trajectory to track the ground state as far out as possible.
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(gamma, mu, mid, h, steps)?.outcome {
            Shot::Over => hi = mid,
            _ => lo = mid,
        }
    }
    if hi - lo > tol * lo {
        return Err(Error::NoGroundState("bisection failed to converge".into()));
    }
    let under = shoot(gamma, mu, lo, h, steps)?;
    let over = shoot(gamma, mu, hi, h, steps)?;

    // Switch to the linear tail once the nonlinearity is negligible or the
    // bracketing trajectories start to separate.
    let len = under.phi.len().min(over.phi.len());
    let mut switch = len - 1;
    for k in 1..len {
        let p = under.phi[k];
        let separated = (over.phi[k] - p).abs() > 1e-6 * p.abs();
        let small = p > 0.0 && p.powf(2.0 * gamma) / mu <= 1e-8;
        if separated || small || under.dphi[k] >= 0.0 {
            switch = k.saturating_sub(1).max(1);
            break;
        }
    }
    let sq = mu.sqrt();
    let r_s = switch as f64 * h;
    let amp = under.phi[switch] / bessel_k0(sq * r_s);
    let mut r_nodes = Vec::with_capacity(steps + 1);
    let mut phi_values = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let r = k as f64 * h;
        r_nodes.push(r);
        phi_values.push(if k <= switch {
            under.phi[k]
        } else {
            amp * bessel_k0(sq * r)
        });
    }
    if phi_values.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::NoGroundState("profile is not strictly positive".into()));
    }

    let decay_rate = fit_decay_rate(&r_nodes, &phi_values);
    let ode_residual = fd_residual(gamma, mu, &r_nodes, &phi_values);
    Ok(GroundState {
        gamma,
        mu,
        r_nodes,
        phi_values,
        decay_rate,
        tail_start: r_s,
        ode_residual,
    })
}

/// Least-squares slope of `-log φ` over the outer half of the radial grid.
fn fit_decay_rate(r: &[f64], phi: &[f64]) -> f64 {
    let start = r.len() / 2;
    let xs = &r[start..];
    let ys: Vec<f64> = phi[start..].iter().map(|p| p.ln()).collect();
    -least_squares_slope(xs, &ys)
}

pub(crate) fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `max |φ'' + φ'/r - μφ + φ^{2γ+1}|` with centred differences.
pub fn fd_residual(gamma: f64, mu: f64, r: &[f64], phi: &[f64]) -> f64 {
    let h = r[1] - r[0];
    let mut worst = 0.0_f64;
    for k in 1..r.len() - 1 {
        let d2 = (phi[k + 1] - 2.0 * phi[k] + phi[k - 1]) / (h * h);
        let d1 = (phi[k + 1] - phi[k - 1]) / (2.0 * h);
        let res = d2 + d1 / r[k] - mu * phi[k] + phi[k].powf(2.0 * gamma + 1.0);
        worst = worst.max(res.abs());
    }
    worst
}

impl GroundState {
    pub fn phi0(&self) -> f64 {
        self.phi_values[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.r_nodes.last().unwrap()
    }

    /// Four-point cubic interpolation on the grid, exponential extension beyond.
    pub fn eval(&self, r: f64) -> f64 {
        let n = self.r_nodes.len();
        let r_max = self.r_max();
        if r >= r_max {
            return self.phi_values[n - 1] * (-self.decay_rate * (r - r_max)).exp();
        }
        let h = self.r_nodes[1] - self.r_nodes[0];
        let k = ((r / h) as usize).min(n - 2);
        // φ is even in r, so mirror across the origin for the left stencil.
        let node = |j: isize| -> (f64, f64) {
            if j < 0 {
                (-self.r_nodes[(-j) as usize], self.phi_values[(-j) as usize])
            } else {
                let j = (j as usize).min(n - 1);
                (self.r_nodes[j], self.phi_values[j])
            }
        };
        let base = if k + 2 >= n { n as isize - 4 } else { k as isize - 1 };
        let pts: Vec<(f64, f64)> = (0..4).map(|d| node(base + d)).collect();
        let mut acc = 0.0;
        for (a, &(xa, ya)) in pts.iter().enumerate() {
            let mut l = 1.0;
            for (b, &(xb, _)) in pts.iter().enumerate() {
                if a != b {
                    l *= (r - xb) / (xa - xb);
                }
            }
            acc += l * ya;
        }
        acc
    }
}

pub fn evaluate_phi(gs: &GroundState, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
    }
    Ok(gs.eval(r))
}
