use faer::c64;

use super::expansion::ResolventExpansion;
use super::free::{assemble_free, g_pm, Branch};
use crate::error::{Error, Result};
use crate::gridops::{Grid2D, KernelOperator};
use crate::linalg::inverse;
use crate::potential::MatrixPotential;
use crate::specfun::Sign;

/// Neumann terms below this HS norm (relative to `‖A⁻¹‖_HS`) are dropped.
pub const NEUMANN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum InverseMethod {
    Dense,
    Feshbach,
}

/// `M = I + v2 ℛ0 v1` from an assembled free resolvent.
pub fn m_from_free(r0: &KernelOperator, pot: &MatrixPotential) -> Result<KernelOperator> {
    let mut m = pot.v1().right_mul(&pot.v2().left_mul(r0)?)?;
    for r in 0..m.dim() {
        m.entries[(r, r)] += c64::new(1.0, 0.0);
    }
    Ok(m)
}

pub fn m_operator_at(
    branch: Branch,
    sign: Sign,
    lambda: f64,
    mu: f64,
    pot: &MatrixPotential,
    grid: &Grid2D,
) -> Result<KernelOperator> {
    let r0 = assemble_free(branch, sign, lambda, mu, grid)?;
    m_from_free(&r0, pot)
}

/// `M±(λ) = I + v2 ℛ0±(μ+λ²) v1`.
pub fn m_operator(
    sign: Sign,
    lambda: f64,
    exp: &ResolventExpansion,
    pot: &MatrixPotential,
    grid: &Grid2D,
) -> Result<KernelOperator> {
    m_operator_at(Branch::Upper, sign, lambda, exp.mu, pot, grid)
}

/// `g̃± P + T`, the leading part of `M±(λ)`.
pub fn leading_part(sign: Sign, lambda: f64, exp: &ResolventExpansion) -> Result<KernelOperator> {
    let gt = -g_pm(sign, lambda)? * exp.norm_ab;
    exp.proj_p.scale(gt).add(&exp.core.transfer_t)
}

/// `E1±(λ) = M±(λ) - g̃±P - T`.
pub fn e1_operator(
    sign: Sign,
    lambda: f64,
    exp: &ResolventExpansion,
    pot: &MatrixPotential,
    grid: &Grid2D,
) -> Result<KernelOperator> {
    m_operator(sign, lambda, exp, pot, grid)?.sub(&leading_part(sign, lambda, exp)?)
}

/// `A⁻¹ = h⁻¹S + QD0Q`, the exact inverse of `g̃P + T`.
pub fn a_inverse(sign: Sign, lambda: f64, exp: &ResolventExpansion) -> Result<KernelOperator> {
    let h = exp.h(sign, lambda)?;
    exp.s_op.scale(1.0 / h).add(&exp.d0)
}

/// Feshbach inverse with its Neumann diagnostics.
#[derive(Clone, Debug)]
pub struct FeshbachInverse {
    pub inverse: KernelOperator,
    /// `‖E1 A⁻¹‖_HS`.
    pub ratio: f64,
    pub neumann_terms: usize,
    pub h: c64,
}

pub fn m_inverse_feshbach(
    sign: Sign,
    lambda: f64,
    exp: &ResolventExpansion,
    pot: &MatrixPotential,
    grid: &Grid2D,
) -> Result<FeshbachInverse> {
    let ainv = a_inverse(sign, lambda, exp)?;
    let e1 = e1_operator(sign, lambda, exp, pot, grid)?;
    let k = e1.compose(&ainv)?.scale(c64::new(-1.0, 0.0));
    let ratio = k.hs_norm();
    if ratio >= 1.0 {
        return Err(Error::ExpansionRadius { lambda, ratio });
    }
    // M⁻¹ = A⁻¹ Σ (−E1 A⁻¹)^k
    let scale = ainv.hs_norm().max(1.0);
    let mut term = ainv.clone();
    let mut sum = ainv;
    let mut terms = 1;
    for _ in 0..500 {
        term = term.compose(&k)?;
        let size = term.hs_norm();
        sum = sum.add(&term)?;
        terms += 1;
        if size < NEUMANN_TOL * scale {
            break;
        }
    }
    Ok(FeshbachInverse {
        inverse: sum,
        ratio,
        neumann_terms: terms,
        h: exp.h(sign, lambda)?,
    })
}

/// Dense inverse of an assembled `M`.
pub fn dense_inverse(m: &KernelOperator, lambda: f64) -> Result<KernelOperator> {
    Ok(KernelOperator::from_entries(inverse(&m.entries, lambda)?, m.weights.clone()))
}

pub fn m_inverse(
    sign: Sign,
    lambda: f64,
    exp: &ResolventExpansion,
    pot: &MatrixPotential,
    grid: &Grid2D,
    method: InverseMethod,
) -> Result<KernelOperator> {
    match method {
        InverseMethod::Dense => dense_inverse(&m_operator(sign, lambda, exp, pot, grid)?, lambda),
        InverseMethod::Feshbach => Ok(m_inverse_feshbach(sign, lambda, exp, pot, grid)?.inverse),
    }
}

/// Largest dyadic `λ ≤ lambda_high` with `‖E1 A⁻¹‖_HS ≤ 1/2`, halved.
pub fn find_lambda1(
    exp: &ResolventExpansion,
    pot: &MatrixPotential,
    grid: &Grid2D,
    lambda_high: f64,
) -> Result<f64> {
    let mut lambda = lambda_high;
    for _ in 0..40 {
        let ainv = a_inverse(Sign::Plus, lambda, exp)?;
        let e1 = e1_operator(Sign::Plus, lambda, exp, pot, grid)?;
        if e1.compose(&ainv)?.hs_norm() <= 0.5 {
            return Ok(0.5 * lambda);
        }
        lambda *= 0.5;
    }
    Err(Error::ExpansionRadius {
        lambda,
        ratio: f64::NAN,
    })
}

/// `ℛ_V = ℛ0 - ℛ0 v1 M⁻¹ v2 ℛ0` on either branch, with a dense `M⁻¹`.
pub fn perturbed_resolvent_at(
    branch: Branch,
    sign: Sign,
    lambda: f64,
    mu: f64,
    pot: &MatrixPotential,
    grid: &Grid2D,
) -> Result<KernelOperator> {
    let r0 = assemble_free(branch, sign, lambda, mu, grid)?;
    if pot.is_zero() {
        return Ok(r0);
    }
    let minv = dense_inverse(&m_from_free(&r0, pot)?, lambda)?;
    let left = pot.v1().right_mul(&r0)?;
    let right = pot.v2().left_mul(&r0)?;
    r0.sub(&left.compose(&minv)?.compose(&right)?)
}

pub fn perturbed_resolvent(
    sign: Sign,
    lambda: f64,
    exp: &ResolventExpansion,
    pot: &MatrixPotential,
    grid: &Grid2D,
) -> Result<KernelOperator> {
    perturbed_resolvent_at(Branch::Upper, sign, lambda, exp.mu, pot, grid)
}
