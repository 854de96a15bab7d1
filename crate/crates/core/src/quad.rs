//! Fixed quadrature rules.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Chebyshev extrema `cos(πk/m)` on `[-1, 1]`, `k = 0..=m`, in increasing order.
pub fn chebyshev_lobatto(m: usize) -> Vec<f64> {
    (0..=m).map(|k| -(PI * k as f64 / m as f64).cos()).collect()
}

/// Lagrange basis values `ℓ_k(t)` for the given nodes (barycentric form).
pub fn lagrange_basis(nodes: &[f64], t: f64, out: &mut [f64]) {
    let m = nodes.len();
    for k in 0..m {
        if t == nodes[k] {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[k] = 1.0;
            return;
        }
    }
    let mut denom = 0.0;
    for k in 0..m {
        let mut wk = 1.0;
        for j in 0..m {
            if j != k {
                wk /= nodes[k] - nodes[j];
            }
        }
        out[k] = wk / (t - nodes[k]);
        denom += out[k];
    }
    for v in out.iter_mut() {
        *v /= denom;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for p in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(a, b)| a.powi(p as i32) * b).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn lagrange_partition_of_unity() {
        let nodes = chebyshev_lobatto(8);
        let mut l = vec![0.0; 9];
        for &t in &[-0.93, 0.0, 0.37, 1.0] {
            lagrange_basis(&nodes, t, &mut l);
            assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            let interp: f64 = nodes.iter().zip(&l).map(|(x, v)| x.powi(5) * v).sum();
            assert!((interp - t.powi(5)).abs() < 1e-13);
        }
    }
}
