//! Joint transmit beamforming and RIS reflection design for RIS-assisted
//! integrated sensing and communication (ISAC).
//!
//! A multi-antenna base station illuminates `T` point targets and serves `K`
//! single-antenna users through direct links and a passive `N`-element RIS.
//! The library maximizes the weighted radar sum-SNR over the stacked
//! precoder `W` and the unit-modulus reflection vector `phi` subject to
//! per-user SINR targets and a total power budget.
//!
//! Layout:
//! - [`scenario`]: configuration, geometry and channel generation.
//! - [`model`]: precoder/phase types, effective channels, SNR/SINR metrics,
//!   vectorization helpers.
//! - [`conic`]: an embedded second-order cone program solver.
//! - [`beamform_w`]: the minorize-maximize SOCP update of `W`.
//! - [`ris_phase`]: the penalty / MM / Riemannian CG update of `phi`.
//! - [`driver`]: alternating optimization, baselines and traces.
//! - [`oracle`]: brute-force and Monte-Carlo verifiers used by tests.

pub mod beamform_w;
pub mod conic;
pub mod driver;
pub mod error;
pub mod model;
pub mod oracle;
pub mod ris_phase;
pub mod scenario;

pub use num_complex::Complex64;

pub use driver::{
    alternating_optimize, initialize, run_baseline, RunOutcome, RunStatus, RunTrace, Scheme,
    TraceEntry,
};
pub use error::{Error, Result};
pub use model::{BeamformerMatrix, EffectiveChannels, Metrics, PhaseVector};
pub use scenario::{BaselineMode, ChannelSet, Geometry, ScenarioConfig, SolverConfig};

/// Complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;
/// Complex dense matrix.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

/// `10 log10(x)`, with `-inf` for non-positive input.
pub fn to_db(x: f64) -> f64 {
    if x > 0.0 {
        10.0 * x.log10()
    } else {
        f64::NEG_INFINITY
    }
}

/// Inverse of [`to_db`].
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
