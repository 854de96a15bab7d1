use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::gridops::{assemble_calg0, inner, Grid2D, KernelOperator};
use crate::linalg::{inverse, singular_values_real};
use crate::potential::MatrixPotential;

/// Default regularity threshold, relative to `‖T‖_HS`.
pub const REGULARITY_THRESHOLD: f64 = 1e-4;

/// The λ-independent threshold objects that do not need any inversion.
#[derive(Clone, Debug)]
pub struct ThresholdCore {
    pub mu: f64,
    /// `(a, b)` stacked component-major.
    pub u: Vec<f64>,
    /// `‖a² + b²‖_{L¹} = ‖u‖²`.
    pub norm_ab: f64,
    /// `T = I + v2 𝒢0 v1`.
    pub transfer_t: KernelOperator,
    pub weights: Vec<f64>,
}

impl ThresholdCore {
    pub fn new(pot: &MatrixPotential, grid: &Grid2D, mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
        }
        if pot.nodes() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                got: pot.nodes(),
            });
        }
        let g0 = assemble_calg0(mu, grid)?;
        let t = pot.v1().right_mul(&pot.v2().left_mul(&g0)?)?;
        let mut t = t;
        for r in 0..t.dim() {
            t.entries[(r, r)] += c64::new(1.0, 0.0);
        }
        let u: Vec<f64> = pot.a.iter().chain(&pot.b).copied().collect();
        let norm_ab = pot.norm_ab(grid);
        Ok(Self {
            mu,
            u,
            norm_ab,
            transfer_t: t,
            weights: grid.weights.clone(),
        })
    }

    pub fn u_complex(&self) -> Vec<c64> {
        self.u.iter().map(|&x| c64::new(x, 0.0)).collect()
    }

    /// `Pf = u ⟨f, u⟩ / ‖u‖²`.
    pub fn apply_p(&self, f: &[c64]) -> Vec<c64> {
        let uc = self.u_complex();
        let coef = inner(&self.weights, f, &uc) / self.norm_ab;
        uc.iter().map(|x| x * coef).collect()
    }

    pub fn proj_p(&self) -> KernelOperator {
        let n = self.weights.len();
        let m = 2 * n;
        let entries = Mat::from_fn(m, m, |r, s| {
            c64::new(self.u[r] * self.u[s] * self.weights[s % n] / self.norm_ab, 0.0)
        });
        KernelOperator::from_entries(entries, self.weights.clone())
    }
}

/// The threshold expansion of `M±(λ)` for a fixed potential.
#[derive(Clone, Debug)]
pub struct ResolventExpansion {
    pub core: ThresholdCore,
    pub mu: f64,
    pub proj_p: KernelOperator,
    pub proj_q: KernelOperator,
    /// `Q D0 Q`, the inverse of `QTQ` on `ran Q`, extended by zero.
    pub d0: KernelOperator,
    pub s_op: KernelOperator,
    pub c_const: f64,
    /// Imaginary part of the trace formula for `c`; zero up to rounding.
    pub c_imag: f64,
    pub norm_ab: f64,
    pub qtq_min_sv: f64,
    pub t_hs_norm: f64,
}

impl AsRef<ThresholdCore> for ResolventExpansion {
    fn as_ref(&self) -> &ThresholdCore {
        &self.core
    }
}

impl AsRef<ThresholdCore> for ThresholdCore {
    fn as_ref(&self) -> &ThresholdCore {
        self
    }
}

/// `W^{1/2} A W^{-1/2}`, whose Euclidean singular values are those of `A`
/// on `L²(w)`; real part only.
fn weighted_real(op: &KernelOperator) -> Mat<f64> {
    let n = op.nodes();
    let m = op.dim();
    Mat::from_fn(m, m, |r, s| {
        op.entries[(r, s)].re * (op.weights[r % n] / op.weights[s % n]).sqrt()
    })
}

pub fn build_expansion(pot: &MatrixPotential, grid: &Grid2D, mu: f64) -> Result<ResolventExpansion> {
    build_expansion_with(pot, grid, mu, REGULARITY_THRESHOLD)
}

/// As [`build_expansion`], with the regularity threshold (relative to
/// `‖T‖_HS`) given explicitly; `0` disables the check.
pub fn build_expansion_with(
    pot: &MatrixPotential,
    grid: &Grid2D,
    mu: f64,
    threshold: f64,
) -> Result<ResolventExpansion> {
    if pot.is_zero() {
        return Err(Error::InvalidArgument(
            "the threshold expansion needs a nonzero potential".into(),
        ));
    }
    let core = ThresholdCore::new(pot, grid, mu)?;
    let t = &core.transfer_t;
    let p = core.proj_p();
    let q = KernelOperator::identity(grid).sub(&p)?;
    let qtq = q.compose(&t.compose(&q)?)?;
    let t_hs = t.hs_norm();

    // Deflation: on ran P the shifted operator acts as s·I, on ran Q as QTQ.
    let shift = t_hs.max(1.0);
    let shifted = qtq.add(&p.scale(c64::new(shift, 0.0)))?;
    let sv = singular_values_real(&weighted_real(&shifted))?;
    let qtq_min_sv = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if qtq_min_sv < threshold * t_hs {
        return Err(Error::NonRegularThreshold {
            qtq_min_sv,
            threshold: threshold * t_hs,
        });
    }
    let inv = KernelOperator::from_entries(inverse(&shifted.entries, 0.0)?, grid.weights.clone());
    let d0 = inv.sub(&p.scale(c64::new(1.0 / shift, 0.0)))?;

    let td0 = t.compose(&d0)?;
    let d0t = d0.compose(t)?;
    let u = core.u_complex();
    let tu = t.apply(&u)?;
    let ttd0tu = td0.apply(&tu)?;
    let num = inner(&core.weights, &tu, &u) - inner(&core.weights, &ttd0tu, &u);
    let c = num / core.norm_ab;

    let ptd0 = p.compose(&td0)?;
    let d0tp = d0t.compose(&p)?;
    let s_op = p
        .sub(&ptd0)?
        .sub(&d0tp)?
        .add(&d0tp.compose(&t.compose(&d0)?)?)?;
    Ok(ResolventExpansion {
        mu,
        proj_p: p,
        proj_q: q,
        d0,
        s_op,
        c_const: c.re,
        c_imag: c.im,
        norm_ab: core.norm_ab,
        qtq_min_sv,
        t_hs_norm: t_hs,
        core,
    })
}

impl ResolventExpansion {
    /// `h±(λ) = g̃±(λ) + c` with `g̃± = -‖a²+b²‖ g±`.
    pub fn h(&self, sign: crate::specfun::Sign, lambda: f64) -> Result<c64> {
        let g = super::free::g_pm(sign, lambda)?;
        Ok(-g * self.norm_ab + self.c_const)
    }

    /// `QTQ` as an operator.
    pub fn qtq(&self) -> Result<KernelOperator> {
        self.proj_q
            .compose(&self.core.transfer_t.compose(&self.proj_q)?)
    }
}
