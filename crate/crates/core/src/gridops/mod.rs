//! Grids, Nyström discretization of 2×2-block integral operators, and the
//! threshold kernels `G0` and `𝒢₀`.

mod grid;
pub mod io;
mod operator;
mod threshold;

pub use grid::{dist, make_grid, Grid2D};
pub use operator::{
    assemble_kernel, assemble_radial, diag_block, inner, l2_norm, radial_at, Block, BlockMask,
    FnKernel, Kernel, KernelOperator, OffsetTable, PointwiseMatrix, ZERO_BLOCK,
};
pub use threshold::{
    assemble_calg0, assemble_g0, calg0_diagonal, calg0_kernel, calg0_radial, g0_kernel,
    k0_log_model, log_cell_average, radial_cell_average, CalG0, LOG_CELL_AVERAGE,
};
