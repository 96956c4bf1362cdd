//! Fixed problem instances shared by the solver benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ris_isac_core::beamform_w::WStepContext;
use ris_isac_core::ris_phase::{PhiStep, PhiStepCoeffs};
use ris_isac_core::scenario::realize;
use ris_isac_core::{initialize, BeamformerMatrix, ChannelSet, PhaseVector, ScenarioConfig};

/// Realized channels with a feasible starting point.
pub struct Fixture {
    pub config: ScenarioConfig,
    pub channels: ChannelSet,
    pub w: BeamformerMatrix,
    pub phi: PhaseVector,
}

impl Fixture {
    pub fn new(config: ScenarioConfig) -> Self {
        let (_, channels) = realize(&config).expect("valid config");
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let (w, phi) = initialize(&channels, &config, &mut rng).expect("feasible scenario");
        Self { config, channels, w, phi }
    }

    pub fn desk() -> Self {
        Self::new(ScenarioConfig::desk())
    }

    pub fn reference() -> Self {
        Self::new(ScenarioConfig::default())
    }

    pub fn w_step(&self) -> WStepContext {
        WStepContext::from_scenario(&self.channels, &self.phi, &self.config, self.w.clone()).expect("shapes")
    }

    pub fn phi_step(&self) -> PhiStep<'_> {
        PhiStep::new(&self.channels, self.w.matrix(), &self.config).expect("shapes")
    }

    /// Phase-subproblem coefficients at the starting point.
    pub fn phi_coeffs(&self) -> PhiStepCoeffs {
        let step = self.phi_step();
        let v = self.phi.as_vector();
        let aux = step.a_step(v).expect("a-step");
        step.coeffs(v, &aux, step.radar(v)).expect("coefficients")
    }
}
