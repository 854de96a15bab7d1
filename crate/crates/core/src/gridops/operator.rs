use faer::{c64, Mat};
use rayon::prelude::*;

use super::grid::{dist, Grid2D};
use crate::error::{Error, Result};

/// 2×2 block of a matrix-valued kernel, `b[c][d]` = component `(c, d)`.
pub type Block = [[c64; 2]; 2];

pub const ZERO_BLOCK: Block = [[c64 { re: 0.0, im: 0.0 }; 2]; 2];

pub fn diag_block(a: c64, d: c64) -> Block {
    [[a, c64::new(0.0, 0.0)], [c64::new(0.0, 0.0), d]]
}

/// A matrix kernel `k(x, y)` together with the value used on the diagonal.
pub trait Kernel: Sync {
    fn eval(&self, x: [f64; 2], y: [f64; 2]) -> Block;

    /// Replacement for `k(x, x)`: the average of the kernel over the square
    /// cell of side `h` centred at `x`. Smooth kernels just evaluate.
    fn diagonal(&self, x: [f64; 2], _h: f64) -> Block {
        self.eval(x, x)
    }
}

/// Adapter for closures with a smooth diagonal.
pub struct FnKernel<F>(pub F);

impl<F> Kernel for FnKernel<F>
where
    F: Fn([f64; 2], [f64; 2]) -> Block + Sync,
{
    fn eval(&self, x: [f64; 2], y: [f64; 2]) -> Block {
        (self.0)(x, y)
    }
}

/// Nyström discretization of a 2×2-block integral operator.
///
/// Rows and columns are component-major: index `c * N + i` is component `c`
/// at node `i`. With `includes_weights`, `entries[(c N + i, d N + j)] =
/// k_cd(x_i, x_j) w_j`, so composition is a plain matrix product.
#[derive(Clone, Debug)]
pub struct KernelOperator {
    pub entries: Mat<c64>,
    pub weights: Vec<f64>,
    pub includes_weights: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMask {
    M11,
    M22,
}

impl BlockMask {
    pub fn component(self) -> usize {
        match self {
            BlockMask::M11 => 0,
            BlockMask::M22 => 1,
        }
    }

    pub fn operator(self, grid: &Grid2D) -> KernelOperator {
        let n = grid.len();
        let c = self.component();
        let entries = Mat::from_fn(2 * n, 2 * n, |r, s| {
            if r == s && r / n == c {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        KernelOperator::from_entries(entries, grid.weights.clone())
    }
}

impl KernelOperator {
    pub fn from_entries(entries: Mat<c64>, weights: Vec<f64>) -> Self {
        debug_assert_eq!(entries.nrows(), 2 * weights.len());
        Self {
            entries,
            weights,
            includes_weights: true,
        }
    }

    pub fn zeros(grid: &Grid2D) -> Self {
        let m = 2 * grid.len();
        Self::from_entries(Mat::zeros(m, m), grid.weights.clone())
    }

    pub fn identity(grid: &Grid2D) -> Self {
        let m = 2 * grid.len();
        Self::from_entries(Mat::identity(m, m), grid.weights.clone())
    }

    /// Number of grid nodes `N`; the matrix is `2N × 2N`.
    pub fn nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    fn weight(&self, r: usize) -> f64 {
        self.weights[r % self.nodes()]
    }

    /// Converts raw kernel samples into quadrature-weighted entries.
    pub fn with_weights(mut self) -> Self {
        if !self.includes_weights {
            let m = self.dim();
            for s in 0..m {
                let w = self.weight(s);
                for r in 0..m {
                    self.entries[(r, s)] *= w;
                }
            }
            self.includes_weights = true;
        }
        self
    }

    /// Kernel value `k(x_r, x_s)` recovered from the weighted entry.
    pub fn kernel(&self, r: usize, s: usize) -> c64 {
        if self.includes_weights {
            self.entries[(r, s)] / self.weight(s)
        } else {
            self.entries[(r, s)]
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// Hilbert–Schmidt norm of the kernel on `L²(w) × L²(w)`.
    pub fn hs_norm(&self) -> f64 {
        let m = self.dim();
        let mut acc = 0.0;
        for s in 0..m {
            let ws = self.weight(s);
            for r in 0..m {
                let k = self.kernel(r, s);
                acc += k.norm_sqr() * self.weight(r) * ws;
            }
        }
        acc.sqrt()
    }

    /// Operator with kernel `|k(x, y)|` entrywise.
    pub fn abs_op(&self) -> Self {
        Self {
            entries: Mat::from_fn(self.dim(), self.dim(), |r, s| {
                c64::new(self.entries[(r, s)].norm(), 0.0)
            }),
            weights: self.weights.clone(),
            includes_weights: self.includes_weights,
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let a = self.clone().with_weights();
        let b = other.clone().with_weights();
        Ok(Self::from_entries(&a.entries * &b.entries, a.weights))
    }

    pub fn apply(&self, f: &[c64]) -> Result<Vec<c64>> {
        if f.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: f.len(),
            });
        }
        let m = self.dim();
        let mut out = vec![c64::new(0.0, 0.0); m];
        for s in 0..m {
            let fs = if self.includes_weights {
                f[s]
            } else {
                f[s] * self.weight(s)
            };
            if fs == c64::new(0.0, 0.0) {
                continue;
            }
            let col = self.entries.col(s);
            for r in 0..m {
                out[r] += col[r] * fs;
            }
        }
        Ok(out)
    }

    /// `L²(w)` adjoint: kernel `conj(k(y, x))`.
    pub fn adjoint(&self) -> Self {
        let m = self.dim();
        Self {
            entries: Mat::from_fn(m, m, |r, s| {
                let k = self.kernel(s, r).conj();
                if self.includes_weights {
                    k * self.weight(s)
                } else {
                    k
                }
            }),
            weights: self.weights.clone(),
            includes_weights: self.includes_weights,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let a = self.clone().with_weights();
        let b = other.clone().with_weights();
        Ok(Self::from_entries(&a.entries + &b.entries, a.weights))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let a = self.clone().with_weights();
        let b = other.clone().with_weights();
        Ok(Self::from_entries(&a.entries - &b.entries, a.weights))
    }

    pub fn scale(&self, s: c64) -> Self {
        Self {
            entries: Mat::from_fn(self.dim(), self.dim(), |r, c| self.entries[(r, c)] * s),
            weights: self.weights.clone(),
            includes_weights: self.includes_weights,
        }
    }

    pub fn max_abs(&self) -> f64 {
        let m = self.dim();
        let mut best = 0.0_f64;
        for s in 0..m {
            for r in 0..m {
                best = best.max(self.entries[(r, s)].norm());
            }
        }
        best
    }

    pub fn max_imag_kernel(&self) -> f64 {
        let m = self.dim();
        let mut best = 0.0_f64;
        for s in 0..m {
            for r in 0..m {
                best = best.max(self.kernel(r, s).im.abs());
            }
        }
        best
    }

    /// `N × N` block `(c, d)` of the entries.
    pub fn block(&self, c: usize, d: usize) -> Mat<c64> {
        let n = self.nodes();
        Mat::from_fn(n, n, |i, j| self.entries[(c * n + i, d * n + j)])
    }

    pub fn is_finite(&self) -> bool {
        let m = self.dim();
        (0..m).all(|s| (0..m).all(|r| self.entries[(r, s)].is_finite()))
    }
}

/// Weighted `L²` inner product `Σ w_i f_i conj(g_i)` over both components.
pub fn inner(weights: &[f64], f: &[c64], g: &[c64]) -> c64 {
    let n = weights.len();
    f.iter()
        .zip(g)
        .enumerate()
        .map(|(r, (a, b))| a * b.conj() * weights[r % n])
        .sum()
}

pub fn l2_norm(weights: &[f64], f: &[c64]) -> f64 {
    inner(weights, f, f).re.max(0.0).sqrt()
}

/// Pointwise multiplication by a real 2×2 matrix field.
#[derive(Clone, Debug, PartialEq)]
pub struct PointwiseMatrix {
    pub m: [[Vec<f64>; 2]; 2],
}

impl PointwiseMatrix {
    pub fn new(m11: Vec<f64>, m12: Vec<f64>, m21: Vec<f64>, m22: Vec<f64>) -> Self {
        Self {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn nodes(&self) -> usize {
        self.m[0][0].len()
    }

    pub fn at(&self, i: usize) -> [[f64; 2]; 2] {
        [
            [self.m[0][0][i], self.m[0][1][i]],
            [self.m[1][0][i], self.m[1][1][i]],
        ]
    }

    /// `M · A`.
    pub fn left_mul(&self, op: &KernelOperator) -> Result<KernelOperator> {
        let n = self.nodes();
        if op.nodes() != n {
            return Err(Error::Dimension {
                expected: n,
                got: op.nodes(),
            });
        }
        let e = &op.entries;
        let entries = Mat::from_fn(2 * n, 2 * n, |r, s| {
            let (c, i) = (r / n, r % n);
            self.m[c][0][i] * e[(i, s)] + self.m[c][1][i] * e[(n + i, s)]
        });
        Ok(KernelOperator {
            entries,
            weights: op.weights.clone(),
            includes_weights: op.includes_weights,
        })
    }

    /// `A · M`.
    pub fn right_mul(&self, op: &KernelOperator) -> Result<KernelOperator> {
        let n = self.nodes();
        if op.nodes() != n {
            return Err(Error::Dimension {
                expected: n,
                got: op.nodes(),
            });
        }
        let e = &op.entries;
        let entries = Mat::from_fn(2 * n, 2 * n, |r, s| {
            let (d, j) = (s / n, s % n);
            e[(r, j)] * self.m[0][d][j] + e[(r, n + j)] * self.m[1][d][j]
        });
        Ok(KernelOperator {
            entries,
            weights: op.weights.clone(),
            includes_weights: op.includes_weights,
        })
    }

    /// Left multiplication on a matrix with `2N` rows and arbitrary columns.
    pub fn left_mul_mat(&self, e: &Mat<c64>) -> Mat<c64> {
        let n = self.nodes();
        Mat::from_fn(2 * n, e.ncols(), |r, s| {
            let (c, i) = (r / n, r % n);
            self.m[c][0][i] * e[(i, s)] + self.m[c][1][i] * e[(n + i, s)]
        })
    }

    /// Right multiplication on a matrix with `2N` columns and arbitrary rows.
    pub fn right_mul_mat(&self, e: &Mat<c64>) -> Mat<c64> {
        let n = self.nodes();
        Mat::from_fn(e.nrows(), 2 * n, |r, s| {
            let (d, j) = (s / n, s % n);
            e[(r, j)] * self.m[0][d][j] + e[(r, n + j)] * self.m[1][d][j]
        })
    }

    pub fn apply(&self, f: &[c64]) -> Vec<c64> {
        let n = self.nodes();
        (0..2 * n)
            .map(|r| {
                let (c, i) = (r / n, r % n);
                f[i] * self.m[c][0][i] + f[n + i] * self.m[c][1][i]
            })
            .collect()
    }

    pub fn as_operator(&self, grid: &Grid2D) -> KernelOperator {
        self.left_mul(&KernelOperator::identity(grid))
            .expect("grid and field sizes agree")
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.nodes();
        let mut out = [[vec![0.0; n], vec![0.0; n]], [vec![0.0; n], vec![0.0; n]]];
        for c in 0..2 {
            for d in 0..2 {
                for i in 0..n {
                    out[c][d][i] =
                        self.m[c][0][i] * other.m[0][d][i] + self.m[c][1][i] * other.m[1][d][i];
                }
            }
        }
        Self { m: out }
    }
}

fn check_block(b: &Block, row: usize, col: usize) -> Result<()> {
    if b.iter().flatten().all(|z| z.is_finite()) {
        Ok(())
    } else {
        Err(Error::Assembly { row, col })
    }
}

/// Nyström assembly `entries = k(x_i, x_j) w_j`, with the diagonal taken
/// from [`Kernel::diagonal`].
pub fn assemble_kernel<K: Kernel>(k: &K, grid: &Grid2D) -> Result<KernelOperator> {
    let n = grid.len();
    let rows: Vec<Vec<Block>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        k.diagonal(grid.nodes[i], grid.h)
                    } else {
                        k.eval(grid.nodes[i], grid.nodes[j])
                    }
                })
                .collect()
        })
        .collect();
    for (i, row) in rows.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            check_block(b, i, j)?;
        }
    }
    let entries = Mat::from_fn(2 * n, 2 * n, |r, s| {
        let (c, i) = (r / n, r % n);
        let (d, j) = (s / n, s % n);
        rows[i][j][c][d] * grid.weights[j]
    });
    Ok(KernelOperator::from_entries(entries, grid.weights.clone()))
}

/// Values of a radial kernel `f(|x - y|)` indexed by the grid offset
/// `(|di|, |dj|)`; entry `(0, 0)` holds the diagonal replacement.
pub struct OffsetTable {
    n: usize,
    values: Vec<Block>,
}

impl OffsetTable {
    pub fn new<F>(grid: &Grid2D, f: F, diagonal: Block) -> Result<Self>
    where
        F: Fn(f64) -> Block + Sync,
    {
        let n = grid.n;
        let values: Vec<Block> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (a, b) = (k / n, k % n);
                if k == 0 {
                    diagonal
                } else {
                    f(grid.h * (a as f64).hypot(b as f64))
                }
            })
            .collect();
        for (k, b) in values.iter().enumerate() {
            check_block(b, 0, k)?;
        }
        Ok(Self { n, values })
    }

    pub fn get(&self, grid: &Grid2D, p: usize, q: usize) -> &Block {
        let (pi, pj) = grid.ij(p);
        let (qi, qj) = grid.ij(q);
        &self.values[pi.abs_diff(qi) * self.n + pj.abs_diff(qj)]
    }

    /// Matrix-free application of the assembled operator, `O(N²)` per call.
    pub fn apply(&self, grid: &Grid2D, f: &[c64]) -> Result<Vec<c64>> {
        let n = grid.len();
        if f.len() != 2 * n {
            return Err(Error::Dimension {
                expected: 2 * n,
                got: f.len(),
            });
        }
        let wf: Vec<c64> = (0..2 * n).map(|s| f[s] * grid.weights[s % n]).collect();
        let rows: Vec<[c64; 2]> = (0..n)
            .into_par_iter()
            .map(|i| {
                let side = self.n;
                let (pi, pj) = (i / side, i % side);
                let mut acc = [c64::new(0.0, 0.0); 2];
                for qi in 0..side {
                    let row = &self.values[pi.abs_diff(qi) * side..][..side];
                    for qj in 0..side {
                        let b = &row[pj.abs_diff(qj)];
                        let j = qi * side + qj;
                        let (x, y) = (wf[j], wf[n + j]);
                        acc[0] += b[0][0] * x + b[0][1] * y;
                        acc[1] += b[1][0] * x + b[1][1] * y;
                    }
                }
                acc
            })
            .collect();
        let mut out = vec![c64::new(0.0, 0.0); 2 * n];
        for (i, r) in rows.iter().enumerate() {
            out[i] = r[0];
            out[n + i] = r[1];
        }
        Ok(out)
    }
}

/// Assembly of a translation- and rotation-invariant kernel `f(|x - y|)`,
/// evaluating `f` once per distinct grid offset.
pub fn assemble_radial<F>(grid: &Grid2D, f: F, diagonal: Block) -> Result<KernelOperator>
where
    F: Fn(f64) -> Block + Sync,
{
    let table = OffsetTable::new(grid, f, diagonal)?;
    let n = grid.len();
    let entries = Mat::from_fn(2 * n, 2 * n, |r, s| {
        let (c, i) = (r / n, r % n);
        let (d, j) = (s / n, s % n);
        table.get(grid, i, j)[c][d] * grid.weights[j]
    });
    Ok(KernelOperator::from_entries(entries, grid.weights.clone()))
}

/// Direct evaluation of a radial kernel between arbitrary points; used for
/// checks against the offset-table assembly.
pub fn radial_at<F: Fn(f64) -> Block>(f: &F, x: [f64; 2], y: [f64; 2]) -> Block {
    f(dist(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridops::make_grid;

    fn re(x: f64) -> c64 {
        c64::new(x, 0.0)
    }

    fn smooth(x: [f64; 2], y: [f64; 2]) -> Block {
        let r2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
        let g = (-r2).exp();
        [
            [re(g), re(0.3 * g * x[0])],
            [c64::new(0.0, 0.1 * g), re((-0.5 * r2).exp())],
        ]
    }

    #[test]
    fn zero_kernel_gives_zero_operator() {
        let g = make_grid(2.0, 8).unwrap();
        let op = assemble_kernel(&FnKernel(|_, _| ZERO_BLOCK), &g).unwrap();
        assert_eq!(op.max_abs(), 0.0);
    }

    #[test]
    fn rank_one_kernel_is_exact() {
        let g = make_grid(3.0, 12).unwrap();
        let u = |x: [f64; 2]| (x[0] - 0.5 * x[1]).cos();
        let v = |x: [f64; 2]| (-(x[0] * x[0] + x[1] * x[1])).exp();
        let op = assemble_kernel(&FnKernel(|x, y| diag_block(re(u(x) * v(y)), re(0.0))), &g).unwrap();
        let n = g.len();
        let f: Vec<c64> = (0..2 * n).map(|r| re(1.0 + (r % 7) as f64)).collect();
        let out = op.apply(&f).unwrap();
        let pairing: f64 = (0..n).map(|j| v(g.nodes[j]) * f[j].re * g.weights[j]).sum();
        for i in 0..n {
            assert!((out[i].re - u(g.nodes[i]) * pairing).abs() < 1e-12 * pairing.abs().max(1.0));
            assert_eq!(out[n + i], re(0.0));
        }
    }

    #[test]
    fn nan_kernel_reports_nodes() {
        let g = make_grid(1.0, 8).unwrap();
        let err = assemble_kernel(
            &FnKernel(|x, y| {
                if x == y {
                    diag_block(re(f64::NAN), re(0.0))
                } else {
                    ZERO_BLOCK
                }
            }),
            &g,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Assembly { row: 0, col: 0 }));
    }

    #[test]
    fn hs_norm_of_rank_one() {
        let g = make_grid(2.0, 10).unwrap();
        let u = |x: [f64; 2]| 1.0 + x[0];
        let v = |x: [f64; 2]| (x[1]).sin() + 2.0;
        let op = assemble_kernel(&FnKernel(|x, y| diag_block(re(u(x) * v(y)), re(0.0))), &g).unwrap();
        let nu = g.l2_norm(&g.field(u));
        let nv = g.l2_norm(&g.field(v));
        assert!((op.hs_norm() - nu * nv).abs() < 1e-12 * nu * nv);
    }

    #[test]
    fn abs_op_idempotent_on_nonnegative() {
        let g = make_grid(2.0, 8).unwrap();
        let op = assemble_kernel(&FnKernel(|x, y| diag_block(re(1.0 + dist(x, y)), re(2.0))), &g).unwrap();
        let a = op.abs_op();
        assert_eq!(a.abs_op().entries, a.entries);
        assert_eq!(a.entries, op.entries);
    }

    #[test]
    fn compose_matches_double_quadrature() {
        let g = make_grid(2.5, 10).unwrap();
        let a = assemble_kernel(&FnKernel(smooth), &g).unwrap();
        let b = assemble_kernel(&FnKernel(|x, y| smooth(y, x)), &g).unwrap();
        let ab = a.compose(&b).unwrap();
        let direct = assemble_kernel(
            &FnKernel(|x, y| {
                let mut out = ZERO_BLOCK;
                for (k, &z) in g.nodes.iter().enumerate() {
                    let ka = smooth(x, z);
                    let kb = smooth(y, z);
                    for c in 0..2 {
                        for d in 0..2 {
                            out[c][d] += (ka[c][0] * kb[0][d] + ka[c][1] * kb[1][d]) * g.weights[k];
                        }
                    }
                }
                out
            }),
            &g,
        )
        .unwrap();
        assert!(ab.sub(&direct).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn adjoint_duality() {
        let g = make_grid(2.0, 9).unwrap();
        let op = assemble_kernel(&FnKernel(smooth), &g).unwrap();
        let n = g.len();
        let f: Vec<c64> = (0..2 * n).map(|r| c64::new((r as f64).sin(), 0.2)).collect();
        let h: Vec<c64> = (0..2 * n).map(|r| c64::new(1.0, (r as f64 * 0.3).cos())).collect();
        let lhs = inner(&g.weights, &op.apply(&f).unwrap(), &h);
        let rhs = inner(&g.weights, &f, &op.adjoint().apply(&h).unwrap());
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn block_mask_identities() {
        let g = make_grid(1.0, 8).unwrap();
        let m11 = BlockMask::M11.operator(&g);
        let m22 = BlockMask::M22.operator(&g);
        let sum = m11.add(&m22).unwrap();
        assert_eq!(sum.entries, KernelOperator::identity(&g).entries);
        assert_eq!(m11.compose(&m22).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn radial_assembly_matches_general() {
        let g = make_grid(3.0, 11).unwrap();
        let f = |r: f64| diag_block(re((-r).exp()), c64::new(0.0, r.cos()));
        let a = assemble_radial(&g, f, f(0.0)).unwrap();
        let b = assemble_kernel(&FnKernel(|x, y| radial_at(&f, x, y)), &g).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn offset_table_apply_matches_dense() {
        let g = make_grid(2.0, 9).unwrap();
        let f = |r: f64| [[re((-r).exp()), re(0.2 * r)], [c64::new(0.0, r.sin()), re(1.0 / (1.0 + r))]];
        let dense = assemble_radial(&g, f, f(0.0)).unwrap();
        let table = OffsetTable::new(&g, f, f(0.0)).unwrap();
        let v: Vec<c64> = (0..2 * g.len()).map(|r| c64::new((r as f64).cos(), 0.3)).collect();
        let a = dense.apply(&v).unwrap();
        let b = table.apply(&g, &v).unwrap();
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn pointwise_multiplication() {
        let g = make_grid(1.0, 8).unwrap();
        let n = g.len();
        let f = |k: usize| (k as f64 * 0.1).sin();
        let m = PointwiseMatrix::new(
            (0..n).map(f).collect(),
            vec![2.0; n],
            vec![-1.0; n],
            (0..n).map(|k| f(k + 3)).collect(),
        );
        let op = assemble_kernel(&FnKernel(smooth), &g).unwrap();
        let v: Vec<c64> = (0..2 * n).map(|r| re(r as f64)).collect();
        let lhs = m.left_mul(&op).unwrap().apply(&v).unwrap();
        let rhs = m.apply(&op.apply(&v).unwrap());
        let err = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
        let lhs = m.right_mul(&op).unwrap().apply(&v).unwrap();
        let rhs = op.apply(&m.apply(&v)).unwrap();
        let err = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}
