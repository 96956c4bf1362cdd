//! Phase update at fixed precoder: penalty reformulation, minorization of
//! the quartic radar term, Riemannian conjugate gradient on the unit circle
//! and the auxiliary-gain projection.

pub mod auxvars;
pub mod coeffs;
pub mod penalty;
pub mod rcg;

pub use auxvars::{multiplier_projection, project_user, solve_a_step, AuxVars};
pub use coeffs::{
    apply_c2t, build_bt, build_vt, mm_phi_coeffs, penalty_quadratic, phi_euclidean_gradient,
    phi_objective, vt_factored, MmCoeffs, PenaltyCoeffs, PhiStepCoeffs,
};
pub use penalty::{PenaltyOutcome, PenaltyState, PhiStep};
pub use rcg::{rcg_optimize, RcgOptions, RcgResult};
