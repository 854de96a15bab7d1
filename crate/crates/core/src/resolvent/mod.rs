//! Free and perturbed resolvents, the threshold expansion of `M±(λ)` and
//! its inversion.

pub mod born;
pub mod expansion;
pub mod free;
pub mod minverse;
pub mod zero_mode;

pub use born::{born_series, BornSeries, BORN_MAX_ORDER};
pub use expansion::{
    build_expansion, build_expansion_with, ResolventExpansion, ThresholdCore, REGULARITY_THRESHOLD,
};
pub use free::{
    assemble_free, e0_remainder, free_diagonal, free_radial, free_resolvent,
    free_resolvent_branch, g_pm, Branch,
};
pub use minverse::{
    a_inverse, dense_inverse, e1_operator, find_lambda1, leading_part, m_from_free, m_inverse,
    m_inverse_feshbach, m_operator, m_operator_at, perturbed_resolvent, perturbed_resolvent_at,
    FeshbachInverse, InverseMethod, NEUMANN_TOL,
};
pub use zero_mode::{scalar_resonance, zero_mode, zero_mode_direct, ScalarResonance, ZeroMode, KERNEL_TOLERANCE};
