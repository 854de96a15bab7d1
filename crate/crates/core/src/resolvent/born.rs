use faer::c64;

use super::free::{assemble_free, Branch};
use crate::error::{Error, Result};
use crate::gridops::{Grid2D, KernelOperator};
use crate::potential::MatrixPotential;
use crate::specfun::Sign;

pub const BORN_MAX_ORDER: usize = 12;

#[derive(Clone, Debug)]
pub struct BornSeries {
    pub sum: KernelOperator,
    /// `‖ℛ0(−Vℛ0)^m‖_HS` for `m = 0..=m_max`.
    pub increments: Vec<f64>,
}

impl BornSeries {
    /// HS norm of the last increment, the convergence certificate.
    pub fn last_increment(&self) -> f64 {
        *self.increments.last().unwrap()
    }

    /// Ratio of the last two increments.
    pub fn ratio(&self) -> f64 {
        let n = self.increments.len();
        if n < 2 {
            return 0.0;
        }
        self.increments[n - 1] / self.increments[n - 2]
    }
}

/// `Σ_{m=0}^{m_max} ℛ0±(−Vℛ0±)^m` on the upper branch.
pub fn born_series(
    sign: Sign,
    lambda: f64,
    mu: f64,
    pot: &MatrixPotential,
    grid: &Grid2D,
    m_max: usize,
) -> Result<BornSeries> {
    if m_max > BORN_MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Born order {m_max} exceeds {BORN_MAX_ORDER}"
        )));
    }
    let r0 = assemble_free(Branch::Upper, sign, lambda, mu, grid)?;
    let step = pot.v_matrix().left_mul(&r0)?.scale(c64::new(-1.0, 0.0));
    let mut term = r0.clone();
    let mut sum = r0;
    let mut increments = vec![term.hs_norm()];
    let mut growth = 0;
    for _ in 1..=m_max {
        term = term.compose(&step)?;
        let size = term.hs_norm();
        if size > *increments.last().unwrap() {
            growth += 1;
            if growth >= 3 {
                return Err(Error::BornDivergence {
                    ratio: size / increments.last().unwrap(),
                });
            }
        } else {
            growth = 0;
        }
        increments.push(size);
        sum = sum.add(&term)?;
    }
    Ok(BornSeries { sum, increments })
}
