//! Threshold resolvent expansion, spectral analysis and dispersive decay
//! for the two-dimensional matrix Schrödinger operator
//!
//! ```text
//! H = [ -Δ + μ - V1      -V2      ]
//!     [     V2       Δ - μ + V1   ]
//! ```
//!
//! arising from linearizing focusing NLS about a standing wave.

pub mod error;
pub mod evolution;
pub mod fd;
pub mod gridops;
pub mod groundstate;
pub mod linalg;
pub mod potential;
pub mod quad;
pub mod resolvent;
pub mod spectral;
pub mod specfun;

pub use error::{Error, ErrorCategory, Result};
pub use gridops::{make_grid, Grid2D, KernelOperator};
pub use specfun::{Sign, SpecFunConfig, EULER_GAMMA};

pub use faer::c64;
