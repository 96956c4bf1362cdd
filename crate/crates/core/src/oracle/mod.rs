//! Independent verifiers: exhaustive phase grids, Monte-Carlo metric
//! estimates, finite-difference gradients and a semidefinite-relaxation bound.
//! Nothing in the optimization path depends on this module.

pub mod finite_diff;
pub mod grid;
pub mod instances;
pub mod monte_carlo;
pub mod sdr;

pub use finite_diff::{finite_diff_gradient, pack_complex};
pub use grid::{grid_search_phi, MAX_GRID_ELEMENTS};
pub use monte_carlo::monte_carlo_metrics;
pub use sdr::sdr_w_oracle;
