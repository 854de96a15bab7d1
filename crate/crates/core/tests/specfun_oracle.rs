use dispersim_core::specfun::{bessel_j0, bessel_k0, bessel_y0, SpecFunConfig, EULER_GAMMA};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::FRAC_2_PI;

const FRAC_BITS: u32 = 20;
const SCALE_BITS: u64 = 512;

/// `(J0, Σ (−1)^{k+1} H_k q^k/(k!)²)` for `x = p / 2^20`, summed in fixed point.
fn series_oracle(p: u64) -> (f64, f64) {
    let one = BigInt::from(1) << SCALE_BITS;
    let qnum = BigInt::from(p) * BigInt::from(p);
    let qshift = 2 * FRAC_BITS as u64 + 2;
    let mut term = one.clone();
    let mut harmonic = BigInt::zero();
    let mut j0 = one.clone();
    let mut tail = BigInt::zero();
    for k in 1..=200u64 {
        term = (term * &qnum >> qshift) / BigInt::from(k * k);
        harmonic += &one / BigInt::from(k);
        let th = (&term * &harmonic) >> SCALE_BITS;
        if k % 2 == 1 {
            j0 -= &term;
            tail += th;
        } else {
            j0 += &term;
            tail -= th;
        }
    }
    let to_f = |v: &BigInt| {
        let shift = SCALE_BITS - 64;
        (v >> shift).to_f64().unwrap() / 2f64.powi(64)
    };
    (to_f(&j0), to_f(&tail))
}

/// `K0(x) = ∫_0^∞ exp(−x cosh t) dt` by the trapezoid rule, which converges
/// geometrically for this doubly-exponentially decaying integrand.
fn k0_integral(x: f64) -> f64 {
    let h = 1.0 / 64.0;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let v = (-x * t.cosh()).exp();
        sum += v;
        if v < 1e-300 || t > 40.0 {
            break;
        }
        t += h;
    }
    sum * h
}

fn samples() -> Vec<(u64, f64)> {
    let mut out = Vec::new();
    let mut x = 0.01_f64;
    while x <= 30.0 {
        let p = (x * (1u64 << FRAC_BITS) as f64).round() as u64;
        out.push((p, p as f64 / (1u64 << FRAC_BITS) as f64));
        x *= 1.2;
    }
    out.push((30 << FRAC_BITS, 30.0));
    out
}

#[test]
fn j0_y0_match_exact_series_on_log_grid() {
    let cfg = SpecFunConfig::default();
    for (p, x) in samples() {
        let (j, tail) = series_oracle(p);
        let y = FRAC_2_PI * ((0.5 * x).ln() + EULER_GAMMA) * j + FRAC_2_PI * tail;
        assert!(
            (cfg.j0(x).unwrap() - j).abs() <= cfg.target_abs_error,
            "j0({x}): {} vs {j}",
            cfg.j0(x).unwrap()
        );
        assert!(
            (cfg.y0(x).unwrap() - y).abs() <= cfg.target_abs_error,
            "y0({x}): {} vs {y}",
            cfg.y0(x).unwrap()
        );
    }
}

#[test]
fn k0_matches_integral_representation() {
    let cfg = SpecFunConfig::default();
    for (_, x) in samples() {
        let reference = k0_integral(x);
        assert!(
            (cfg.k0(x).unwrap() - reference).abs() <= cfg.target_abs_error,
            "k0({x}): {} vs {reference}",
            cfg.k0(x).unwrap()
        );
    }
    assert!((bessel_k0(1.0) - 0.421_024_438_2).abs() < 1e-10);
}

#[test]
fn y0_at_one() {
    let (j, tail) = series_oracle(1 << FRAC_BITS);
    let y = FRAC_2_PI * ((0.5f64).ln() + EULER_GAMMA) * j + FRAC_2_PI * tail;
    assert!((y - 0.088_256_964_2).abs() < 1e-10);
    assert!((bessel_y0(1.0) - y).abs() < 1e-14);
}

#[test]
fn first_zero_of_j0() {
    let bisect = |f: &dyn Fn(f64) -> f64| {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let oracle = |x: f64| {
        let q = 0.25 * x * x;
        let mut term = 1.0_f64;
        let mut s = 1.0_f64;
        for k in 1..60 {
            term *= -q / (k * k) as f64;
            s += term;
        }
        s
    };
    let z_lib = bisect(&bessel_j0);
    let z_oracle = bisect(&oracle);
    assert!((z_lib - 2.404_825_557).abs() < 1e-9);
    assert!((z_lib - z_oracle).abs() < 1e-12);
}
