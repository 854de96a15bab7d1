//! Order-zero Bessel, Neumann, Hankel and modified Bessel functions.
//!
//! Each function is evaluated in one of three argument regimes:
//!
//! * `x < series_cutoff`: ascending power series,
//! * `series_cutoff <= x < asymptotic_cutoff`: Miller backward recurrence for
//!   `J0`, with `Y0` from the Neumann series in even-order Bessel functions,
//! * `x >= asymptotic_cutoff`: the large-argument Hankel expansion.
//!
//! `K0` has no oscillatory cancellation, so it uses the power series below
//! `series_cutoff` and its asymptotic expansion above.

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.5772156649015329;

/// Which boundary value of a Hankel function / resolvent is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpecFunConfig {
    pub series_cutoff: f64,
    pub asymptotic_cutoff: f64,
    pub target_abs_error: f64,
}

impl Default for SpecFunConfig {
    fn default() -> Self {
        Self {
            series_cutoff: SERIES_CUTOFF,
            asymptotic_cutoff: ASYMPTOTIC_CUTOFF,
            target_abs_error: 1e-10,
        }
    }
}

const SERIES_CUTOFF: f64 = 8.0;
const ASYMPTOTIC_CUTOFF: f64 = 25.0;

impl SpecFunConfig {
    pub fn new(series_cutoff: f64, asymptotic_cutoff: f64, target_abs_error: f64) -> Result<Self> {
        let cfg = Self {
            series_cutoff,
            asymptotic_cutoff,
            target_abs_error,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.series_cutoff > 0.0 && self.series_cutoff <= self.asymptotic_cutoff) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < series_cutoff <= asymptotic_cutoff, got {} and {}",
                self.series_cutoff, self.asymptotic_cutoff
            )));
        }
        if !(self.target_abs_error > 0.0) {
            return Err(Error::InvalidArgument(
                "target_abs_error must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn j0(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidArgument(format!("j0 needs finite x >= 0, got {x}")));
        }
        Ok(j0_with(x, self.series_cutoff, self.asymptotic_cutoff))
    }

    pub fn y0(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!("y0 needs finite x, got {x}")));
        }
        if x <= 0.0 {
            return Err(Error::Domain(format!("y0 is singular for x <= 0 (x = {x})")));
        }
        Ok(y0_with(x, self.series_cutoff, self.asymptotic_cutoff))
    }

    pub fn k0(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!("k0 needs finite x, got {x}")));
        }
        if x <= 0.0 {
            return Err(Error::Domain(format!("k0 is singular for x <= 0 (x = {x})")));
        }
        Ok(k0_with(x, self.series_cutoff))
    }

    /// `H0±(x) = J0(x) ± i Y0(x)`.
    pub fn hankel0(&self, sign: Sign, x: f64) -> Result<Complex64> {
        let j = self.j0(x)?;
        let y = self.y0(x)?;
        Ok(Complex64::new(j, sign.as_f64() * y))
    }
}

/// `J0(x)` with the default regime cutoffs. Negative arguments use evenness.
pub fn bessel_j0(x: f64) -> f64 {
    j0_with(x.abs(), SERIES_CUTOFF, ASYMPTOTIC_CUTOFF)
}

/// `Y0(x)` for `x > 0`; returns NaN otherwise.
pub fn bessel_y0(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    y0_with(x, SERIES_CUTOFF, ASYMPTOTIC_CUTOFF)
}

/// `K0(x)` for `x > 0`; returns NaN otherwise.
pub fn bessel_k0(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    k0_with(x, SERIES_CUTOFF)
}

/// Both `J0(x)` and `Y0(x)` from one regime dispatch (shares the recurrence).
pub fn bessel_j0_y0(x: f64) -> (f64, f64) {
    if x < SERIES_CUTOFF {
        (j0_series(x), y0_series(x))
    } else if x < ASYMPTOTIC_CUTOFF {
        j0_y0_miller(x)
    } else {
        j0_y0_asymptotic(x)
    }
}

pub fn hankel0(sign: Sign, x: f64) -> Complex64 {
    let (j, y) = bessel_j0_y0(x);
    Complex64::new(j, sign.as_f64() * y)
}

fn j0_with(x: f64, series: f64, asym: f64) -> f64 {
    if x < series {
        j0_series(x)
    } else if x < asym {
        j0_y0_miller(x).0
    } else {
        j0_y0_asymptotic(x).0
    }
}

fn y0_with(x: f64, series: f64, asym: f64) -> f64 {
    if x < series {
        y0_series(x)
    } else if x < asym {
        j0_y0_miller(x).1
    } else {
        j0_y0_asymptotic(x).1
    }
}

fn k0_with(x: f64, series: f64) -> f64 {
    if x < series {
        k0_series(x)
    } else {
        k0_asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf > q.sqrt() {
            break;
        }
    }
    sum
}

/// `Y0 = (2/π)(ln(x/2)+γ)J0 + (2/π) Σ_{k≥1} (-1)^{k+1} H_k (x²/4)^k/(k!)²`.
fn y0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        let contrib = -term * harmonic;
        tail += contrib;
        if contrib.abs() < 1e-17 * tail.abs().max(1e-300) && kf > q.sqrt() {
            break;
        }
    }
    FRAC_2_PI * ((0.5 * x).ln() + EULER_GAMMA) * j0_series(x) + FRAC_2_PI * tail
}

/// Backward recurrence normalized by `J0 + 2 Σ J_2k = 1`; `Y0` from
/// `Y0 = (2/π)(ln(x/2)+γ) J0 − (4/π) Σ_{k≥1} (−1)^k J_2k / k`.
fn j0_y0_miller(x: f64) -> (f64, f64) {
    let mut start = (x + 12.0 * x.cbrt() + 30.0) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut j_next = 0.0;
    let mut j_cur = 1e-300;
    let mut norm = 0.0;
    let mut neumann = 0.0;
    for m in (1..=start).rev() {
        if m % 2 == 0 {
            let k = (m / 2) as f64;
            norm += 2.0 * j_cur;
            let sgn = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
            neumann += sgn * j_cur / k;
        }
        let j_prev = 2.0 * (m as f64) / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            neumann *= 1e-250;
        }
    }
    norm += j_cur;
    let j0 = j_cur / norm;
    let neumann = neumann / norm;
    let y0 = FRAC_2_PI * (((0.5 * x).ln() + EULER_GAMMA) * j0 - 2.0 * neumann);
    (j0, y0)
}

/// Hankel expansion `J0 = √(2/πx)(P cos χ − Q sin χ)`, `Y0 = √(2/πx)(P sin χ + Q cos χ)`.
fn j0_y0_asymptotic(x: f64) -> (f64, f64) {
    let (p, q) = hankel_pq(x);
    let chi = x - FRAC_PI_4;
    let (s, c) = chi.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// Modulus series `P`, `Q` truncated at the smallest term.
fn hankel_pq(x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    // a_k = Π_{j≤k} (−(2j−1)²) / (k! 8^k x^k)
    let mut a = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= -(odd * odd) / (kf * 8.0 * x);
        if a.abs() >= prev {
            break;
        }
        prev = a.abs();
        // P takes even k with sign (−1)^{k/2}; Q takes odd k with sign (−1)^{(k−1)/2}.
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// `K0 = −(ln(x/2)+γ) I0 + Σ_{k≥1} H_k (x²/4)^k/(k!)²`.
fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..300 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term * harmonic < 1e-17 * tail.max(1e-300) && kf > q.sqrt() {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// `K0 ~ √(π/2x) e^{−x} Σ a_k / x^k`, truncated at the smallest term.
fn k0_asymptotic(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut a = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= -(odd * odd) / (kf * 8.0 * x);
        if a.abs() >= prev {
            break;
        }
        prev = a.abs();
        sum += a;
        if a.abs() < 1e-17 {
            break;
        }
    }
    (FRAC_PI_2 / x).sqrt() * (-x).exp() * sum
}

/// `I0(x)` by its power series; used by the bottom-right threshold kernel tests
/// and the small-argument Yukawa expansion.
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}
