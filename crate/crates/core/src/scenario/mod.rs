//! Configuration, deployment geometry and channel realizations.

mod channel;
mod config;
pub mod geometry;

pub use channel::{
    apply_baseline, generate_channels, path_loss_gain, path_loss_gain_with, rician_channel,
    rician_vector, steering_vector, BaselineMode, ChannelSet, DEFAULT_PL0,
};
pub use config::{ScenarioConfig, SolverConfig};
pub use geometry::Geometry;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Geometry and fading draws.
pub const STREAM_CHANNELS: u64 = 0;
/// Random RIS phases (initial point and the random-RIS baseline).
pub const STREAM_PHASES: u64 = 1;
/// Symbol and noise draws of the Monte-Carlo oracle.
pub const STREAM_SYMBOLS: u64 = 2;

/// Independent deterministic random stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Places the deployment and draws its channels from `config.rng_seed`.
pub fn realize(config: &ScenarioConfig) -> Result<(Geometry, ChannelSet)> {
    config.validate()?;
    let mut rng = stream_rng(config.rng_seed, STREAM_CHANNELS);
    let geometry = Geometry::place(config, &mut rng);
    let channels = generate_channels(config, &geometry, &mut rng)?;
    Ok((geometry, channels))
}
