//! Spectrum of the discretized (non-selfadjoint) operator, Riesz projections
//! and the continuous-spectrum projection.
//!
//! The discretization lives on the interior nodes of the grid with Dirichlet
//! truncation; vectors are ordered `[first component; second component]`
//! over [`interior_nodes`].

use faer::{c64, Mat};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd::{interior_nodes, neg_laplacian};
use crate::gridops::Grid2D;
use crate::linalg::inverse;
use crate::potential::MatrixPotential;

/// Relative tolerance for the symmetry and classification tests.
pub const TOL_SYM: f64 = 1e-8;
/// Relative radius for grouping eigenvalues split off a Jordan block.
pub const CLUSTER_RADIUS: f64 = 1e-4;
pub const DEFAULT_CONTOUR_POINTS: usize = 64;
const MAX_CONTOUR_POINTS: usize = 1024;
const CONTOUR_SELF_CHECK: f64 = 1e-9;

/// `[[-Δ_h + μ - V1, -V2], [V2, Δ_h - μ + V1]]` on the interior nodes.
pub fn discretize_h(pot: &MatrixPotential, grid: &Grid2D, mu: f64) -> Result<Mat<f64>> {
    if grid.n < 10 {
        return Err(Error::Resolution(format!(
            "need at least 8x8 interior nodes, grid has n = {}",
            grid.n
        )));
    }
    if pot.nodes() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            got: pot.nodes(),
        });
    }
    let lap = neg_laplacian(grid);
    let nodes = interior_nodes(grid);
    let m = nodes.len();
    let mut h = Mat::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let l = lap[(i, j)];
            h[(i, j)] = l;
            h[(m + i, m + j)] = -l;
        }
        let k = nodes[i];
        let (v1, v2) = (pot.v1_scalar[k], pot.v2_scalar[k]);
        h[(i, i)] += mu - v1;
        h[(m + i, m + i)] += -mu + v1;
        h[(i, m + i)] = -v2;
        h[(m + i, i)] = v2;
    }
    Ok(h)
}

/// Restricts a grid field pair (component-major, all nodes) to the layout
/// of [`discretize_h`].
pub fn restrict_interior<T: Copy>(grid: &Grid2D, f: &[T]) -> Vec<T> {
    let n = grid.len();
    let nodes = interior_nodes(grid);
    nodes.iter().map(|&k| f[k]).chain(nodes.iter().map(|&k| f[n + k])).collect()
}

/// Inverse of [`restrict_interior`], filling boundary nodes with `zero`.
pub fn extend_interior<T: Copy>(grid: &Grid2D, f: &[T], zero: T) -> Vec<T> {
    let n = grid.len();
    let nodes = interior_nodes(grid);
    let m = nodes.len();
    let mut out = vec![zero; 2 * n];
    for (p, &k) in nodes.iter().enumerate() {
        out[k] = f[p];
        out[n + k] = f[m + p];
    }
    out
}

/// `max_i Σ_j |h_ij|`, an upper bound for the spectral radius.
pub fn inf_norm(h: &Mat<f64>) -> f64 {
    (0..h.nrows())
        .map(|i| (0..h.ncols()).map(|j| h[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenClass {
    GapReal,
    Imaginary,
    EssentialBand,
    OffAxisViolation,
}

impl EigenClass {
    pub fn is_discrete(self) -> bool {
        self != EigenClass::EssentialBand
    }

    pub fn label(self) -> &'static str {
        match self {
            EigenClass::GapReal => "gap-real",
            EigenClass::Imaginary => "imaginary",
            EigenClass::EssentialBand => "essential-band",
            EigenClass::OffAxisViolation => "off-axis-violation",
        }
    }
}

fn classify(z: c64, mu: f64, tol: f64) -> EigenClass {
    if z.im.abs() < tol {
        if z.re.abs() < mu {
            EigenClass::GapReal
        } else {
            EigenClass::EssentialBand
        }
    } else if z.re.abs() < tol {
        EigenClass::Imaginary
    } else {
        EigenClass::OffAxisViolation
    }
}

/// Eigenvalues grouped by proximity; a split Jordan block shows up as one
/// cluster whose mean is accurate to first order.
#[derive(Clone, Debug, Serialize)]
pub struct EigenCluster {
    pub center: c64,
    pub members: Vec<usize>,
    pub spread: f64,
    pub class: EigenClass,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscreteSpectrum {
    pub mu: f64,
    /// Sorted by real, then imaginary part.
    pub eigenvalues: Vec<c64>,
    pub classifications: Vec<EigenClass>,
    /// Size of the cluster each eigenvalue belongs to.
    pub algebraic_mults: Vec<usize>,
    pub clusters: Vec<EigenCluster>,
    pub h_norm: f64,
    pub tol: f64,
    /// Inverse participation-based localization, when eigenvectors were
    /// computed: `(Σ|v|²)² / (m Σ|v|⁴)` over the `m` interior nodes.
    pub participation: Option<Vec<f64>>,
}

impl DiscreteSpectrum {
    /// `max_j min_k |λ_j + λ_k|`.
    pub fn negation_defect(&self) -> f64 {
        closure_defect(&self.eigenvalues, |z| -z)
    }

    /// `max_j min_k |conj λ_j - λ_k|`.
    pub fn conjugation_defect(&self) -> f64 {
        closure_defect(&self.eigenvalues, |z| z.conj())
    }

    pub fn count(&self, class: EigenClass) -> usize {
        self.classifications.iter().filter(|&&c| c == class).count()
    }

    /// Number of eigenvalues (with multiplicity) inside the open disk.
    pub fn count_within(&self, center: c64, radius: f64) -> usize {
        self.eigenvalues.iter().filter(|z| (*z - center).norm() < radius).count()
    }

    pub fn discrete_clusters(&self) -> impl Iterator<Item = &EigenCluster> {
        self.clusters.iter().filter(|c| c.class.is_discrete())
    }
}

fn closure_defect(eigs: &[c64], map: impl Fn(c64) -> c64) -> f64 {
    eigs.iter()
        .map(|&z| {
            let w = map(z);
            eigs.iter().map(|&v| (v - w).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn eigen_failure(h: &Mat<f64>, e: impl std::fmt::Debug) -> Error {
    Error::Eigen(format!(
        "{e:?} (dimension {}, inf-norm {:e}, finite: {})",
        h.nrows(),
        inf_norm(h),
        h.is_all_finite()
    ))
}

fn sort_key(a: &c64, b: &c64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn build(mu: f64, h_norm: f64, eigenvalues: Vec<c64>, participation: Option<Vec<f64>>) -> DiscreteSpectrum {
    let tol = TOL_SYM * h_norm;
    let radius = CLUSTER_RADIUS * h_norm;
    let m = eigenvalues.len();
    let raw: Vec<EigenClass> = eigenvalues.iter().map(|&z| classify(z, mu, tol)).collect();
    // single linkage: band eigenvalues only merge on exact degeneracy
    let mut owner: Vec<usize> = (0..m).collect();
    fn root(owner: &mut [usize], mut i: usize) -> usize {
        while owner[i] != i {
            owner[i] = owner[owner[i]];
            i = owner[i];
        }
        i
    }
    for i in 0..m {
        for j in i + 1..m {
            let band = raw[i] == EigenClass::EssentialBand || raw[j] == EigenClass::EssentialBand;
            let r = if band { tol } else { radius };
            if (eigenvalues[i] - eigenvalues[j]).norm() <= r {
                let (a, b) = (root(&mut owner, i), root(&mut owner, j));
                owner[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..m {
        let r = root(&mut owner, i);
        groups.entry(r).or_default().push(i);
    }
    let mut classifications = vec![EigenClass::EssentialBand; m];
    let mut algebraic_mults = vec![1; m];
    let clusters: Vec<EigenCluster> = groups
        .into_values()
        .map(|members| {
            let center = members.iter().map(|&i| eigenvalues[i]).sum::<c64>() / members.len() as f64;
            let spread = members
                .iter()
                .map(|&i| (eigenvalues[i] - center).norm())
                .fold(0.0, f64::max);
            let class = classify(center, mu, tol.max(spread));
            for &i in &members {
                classifications[i] = class;
                algebraic_mults[i] = members.len();
            }
            EigenCluster {
                center,
                members,
                spread,
                class,
            }
        })
        .collect();
    DiscreteSpectrum {
        mu,
        eigenvalues,
        classifications,
        algebraic_mults,
        clusters,
        h_norm,
        tol,
        participation,
    }
}

/// Full dense eigen-solve and classification.
pub fn eigen_spectrum(h: &Mat<f64>, mu: f64) -> Result<DiscreteSpectrum> {
    let mut eigs = h.eigenvalues().map_err(|e| eigen_failure(h, e))?;
    eigs.sort_by(sort_key);
    Ok(build(mu, inf_norm(h), eigs, None))
}

/// As [`eigen_spectrum`], also recording eigenvector participation ratios.
pub fn eigen_spectrum_with_vectors(h: &Mat<f64>, mu: f64) -> Result<DiscreteSpectrum> {
    let e = h.eigen().map_err(|e| eigen_failure(h, e))?;
    let s = e.S().column_vector();
    let u = e.U();
    let dim = h.nrows();
    let m = dim / 2;
    let mut pairs: Vec<(c64, f64)> = (0..dim)
        .map(|k| {
            let dens: Vec<f64> = (0..m)
                .map(|i| u[(i, k)].norm_sqr() + u[(m + i, k)].norm_sqr())
                .collect();
            let s2: f64 = dens.iter().sum();
            let s4: f64 = dens.iter().map(|d| d * d).sum();
            (s[k], s2 * s2 / (m as f64 * s4))
        })
        .collect();
    pairs.sort_by(|a, b| sort_key(&a.0, &b.0));
    let (eigs, pr) = pairs.into_iter().unzip();
    Ok(build(mu, inf_norm(h), eigs, Some(pr)))
}

/// Dimensions of the numerical kernels of `H` and `H²`, counting singular
/// values below `rel_tol·‖H‖` and `rel_tol·‖H‖²`.
pub fn near_kernel_dims(h: &Mat<f64>, rel_tol: f64) -> Result<(usize, usize)> {
    let norm = inf_norm(h);
    let s1 = crate::linalg::singular_values_real(h)?;
    let h2 = h * h;
    let s2 = crate::linalg::singular_values_real(&h2)?;
    let k1 = s1.iter().filter(|&&s| s < rel_tol * norm).count();
    let k2 = s2.iter().filter(|&&s| s < rel_tol * norm * norm).count();
    Ok((k1, k2))
}

/// `(1/2πi)∮(z - H)⁻¹dz` on the circle `|z - center| = radius`.
///
/// The trapezoid rule starts from `contour_points` nodes and doubles until
/// the projection changes by less than `1e-9` (relative, max-norm).
pub fn riesz_projection(h: &Mat<f64>, center: c64, radius: f64, contour_points: usize) -> Result<Mat<c64>> {
    let eigs = h.eigenvalues().map_err(|e| eigen_failure(h, e))?;
    riesz_projection_with(h, &eigs, center, radius, contour_points)
}

/// As [`riesz_projection`], with the eigenvalues of `h` supplied.
pub fn riesz_projection_with(
    h: &Mat<f64>,
    eigs: &[c64],
    center: c64,
    radius: f64,
    contour_points: usize,
) -> Result<Mat<c64>> {
    if !(radius > 0.0) || contour_points < 4 {
        return Err(Error::InvalidArgument(format!(
            "contour needs radius > 0 and at least 4 points, got {radius}, {contour_points}"
        )));
    }
    let close: Vec<c64> = eigs
        .iter()
        .copied()
        .filter(|z| ((z - center).norm() - radius).abs() < 0.1 * radius)
        .collect();
    if !close.is_empty() {
        return Err(Error::Contour(format!(
            "eigenvalues within 0.1*radius of the circle |z - {center}| = {radius}: {close:?}"
        )));
    }
    let dim = h.nrows();
    let hc = crate::linalg::to_complex(h);
    // sum of (z_k - c)(z_k - H)⁻¹ over the nodes θ = 2π(k + offset)/count
    let partial = |count: usize, offset: f64| -> Result<Mat<c64>> {
        let terms: Vec<Result<Mat<c64>>> = {
            use rayon::prelude::*;
            (0..count)
                .into_par_iter()
                .map(|k| {
                    let theta = 2.0 * std::f64::consts::PI * (k as f64 + offset) / count as f64;
                    let dz = c64::from_polar(radius, theta);
                    let z = center + dz;
                    let a = Mat::from_fn(dim, dim, |i, j| {
                        let d = if i == j { z } else { c64::new(0.0, 0.0) };
                        d - hc[(i, j)]
                    });
                    Ok(inverse(&a, z.norm())? * faer::Scale(dz))
                })
                .collect()
        };
        let mut acc = Mat::<c64>::zeros(dim, dim);
        for t in terms {
            acc += t?;
        }
        Ok(acc)
    };
    let mut points = contour_points;
    let mut sum = partial(points, 0.0)?;
    let mut proj = &sum * faer::Scale(c64::new(1.0 / points as f64, 0.0));
    while points < MAX_CONTOUR_POINTS {
        let odd = partial(points, 0.5)?;
        sum += odd;
        points *= 2;
        let next = &sum * faer::Scale(c64::new(1.0 / points as f64, 0.0));
        let change = crate::linalg::max_abs(&(&next - &proj));
        let scale = crate::linalg::max_abs(&next).max(1.0);
        proj = next;
        if change < CONTOUR_SELF_CHECK * scale {
            return Ok(proj);
        }
    }
    Err(Error::Contour(format!(
        "trapezoid rule did not settle with {points} points around {center} (radius {radius})"
    )))
}

/// A contour around each discrete cluster, half way to the nearest other
/// eigenvalue.
pub fn discrete_contours(spec: &DiscreteSpectrum) -> Result<Vec<(c64, f64)>> {
    let mut out = Vec::new();
    for cl in spec.discrete_clusters() {
        let gap = spec
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(i, _)| !cl.members.contains(i))
            .map(|(_, z)| (z - cl.center).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = if gap.is_finite() { 0.5 * gap } else { 1.0 };
        if cl.spread >= 0.5 * radius {
            return Err(Error::Contour(format!(
                "cluster at {} (spread {:e}) is not isolated (gap {gap:e})",
                cl.center, cl.spread
            )));
        }
        out.push((cl.center, radius));
    }
    for (i, a) in out.iter().enumerate() {
        for b in &out[i + 1..] {
            if (a.0 - b.0).norm() <= a.1 + b.1 {
                return Err(Error::Contour(format!(
                    "contours around {} and {} overlap",
                    a.0, b.0
                )));
            }
        }
    }
    Ok(out)
}

/// `I - Σ P_λj` over every cluster that is not essential band.
pub fn pac_projection(h: &Mat<f64>, spec: &DiscreteSpectrum) -> Result<Mat<c64>> {
    let dim = h.nrows();
    let mut p = Mat::<c64>::identity(dim, dim);
    for (c, r) in discrete_contours(spec)? {
        p -= riesz_projection_with(h, &spec.eigenvalues, c, r, DEFAULT_CONTOUR_POINTS)?;
    }
    Ok(p)
}

/// An essential-band eigenvalue that looks embedded.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddedCandidate {
    pub eigenvalue: c64,
    pub participation: f64,
    /// Distance to the closest localized band eigenvalue on the other grid.
    pub shift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddedReport {
    pub mu: f64,
    pub band_tol: f64,
    pub pr_tol: f64,
    pub resolutions: usize,
    pub candidates: Vec<EmbeddedCandidate>,
}

impl EmbeddedReport {
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

pub const DEFAULT_PR_TOL: f64 = 0.15;

/// Band eigenvalues that are localized (participation below `pr_tol`) on
/// the first spectrum and reappear, localized, within `band_tol` on every
/// other one.
pub fn embedded_scan(spectra: &[DiscreteSpectrum], band_tol: f64, pr_tol: f64) -> Result<EmbeddedReport> {
    if spectra.len() < 2 {
        return Err(Error::InsufficientData(
            "the embedded-eigenvalue scan needs spectra on at least two grids".into(),
        ));
    }
    let localized = |s: &DiscreteSpectrum| -> Result<Vec<(c64, f64)>> {
        let pr = s.participation.as_ref().ok_or_else(|| {
            Error::InsufficientData("spectrum was computed without eigenvectors".into())
        })?;
        Ok(s.eigenvalues
            .iter()
            .zip(&s.classifications)
            .zip(pr)
            .filter(|((_, &c), &p)| c == EigenClass::EssentialBand && p < pr_tol)
            .map(|((&z, _), &p)| (z, p))
            .collect())
    };
    let first = localized(&spectra[0])?;
    let others: Vec<Vec<(c64, f64)>> = spectra[1..].iter().map(localized).collect::<Result<_>>()?;
    let mut candidates = Vec::new();
    for &(z, p) in &first {
        let mut shift = 0.0_f64;
        for o in &others {
            let d = o.iter().map(|(w, _)| (w - z).norm()).fold(f64::INFINITY, f64::min);
            shift = shift.max(d);
        }
        if shift < band_tol {
            candidates.push(EmbeddedCandidate {
                eigenvalue: z,
                participation: p,
                shift,
            });
        }
    }
    Ok(EmbeddedReport {
        mu: spectra[0].mu,
        band_tol,
        pr_tol,
        resolutions: spectra.len(),
        candidates,
    })
}
