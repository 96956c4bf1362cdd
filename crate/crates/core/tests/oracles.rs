use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ris_isac_core::beamform_w::WStepContext;
use ris_isac_core::conic::SolverSettings;
use ris_isac_core::model;
use ris_isac_core::oracle::instances::{random_beamformer, random_channels, random_cvector, random_phase, random_psd};
use ris_isac_core::oracle::{monte_carlo_metrics, sdr_w_oracle};
use ris_isac_core::{BeamformerMatrix, CMatrix, Error, ScenarioConfig};

fn ctx(c1: CMatrix, users: usize, rng: &mut ChaCha8Rng) -> WStepContext {
    let m = c1.nrows();
    WStepContext {
        users: (0..users).map(|_| random_cvector(rng, m)).collect(),
        gamma: vec![1.0; users],
        sigma_sq: vec![1.0; users],
        power: 3.0,
        w_i: BeamformerMatrix::zeros(m, users),
        settings: SolverSettings::default(),
        c1,
    }
}

#[test]
fn sdr_without_users_is_power_times_top_eigenvalue() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in 1..=4 {
        let c1 = random_psd(&mut rng, m, m);
        let top = c1.clone().symmetric_eigen().eigenvalues.max();
        let bound = sdr_w_oracle(&ctx(c1, 0, &mut rng)).unwrap();
        assert!((bound - 3.0 * top).abs() <= 1e-9 * bound);
    }
}

#[test]
fn sdr_of_zero_objective_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let bound = sdr_w_oracle(&ctx(CMatrix::zeros(3, 3), 2, &mut rng)).unwrap();
    assert!(bound.abs() < 1e-9, "{bound}");
}

#[test]
fn sdr_refuses_large_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = ctx(CMatrix::identity(5, 5), 1, &mut rng);
    assert!(matches!(sdr_w_oracle(&c), Err(Error::OracleRefused(_))));
}

fn unit_config(m: usize, n: usize, k: usize) -> ScenarioConfig {
    ScenarioConfig {
        antennas: m,
        ris_elements: n,
        users: k,
        target_azimuths_deg: vec![0.0, 40.0],
        weights: vec![0.5, 2.0],
        sigma_r_sq: 0.5,
        sigma_k_sq: 2.0,
        ..ScenarioConfig::default()
    }
}

#[test]
fn monte_carlo_of_silent_transmitter_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = unit_config(3, 4, 2);
    let ch = random_channels(&mut rng, 3, 4, 2, 2, 0.5);
    let phi = random_phase(&mut rng, 4);
    let est = monte_carlo_metrics(&BeamformerMatrix::zeros(3, 2), &phi, &ch, &cfg, 1000, &mut rng);
    assert!(est.target_snr.iter().all(|&v| v == 0.0));
    assert!(est.sinr.iter().all(|&v| v == 0.0));
}

#[test]
fn monte_carlo_tracks_closed_form_on_unit_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = unit_config(3, 4, 2);
    let ch = random_channels(&mut rng, 3, 4, 2, 2, 0.5);
    let phi = random_phase(&mut rng, 4);
    let w = random_beamformer(&mut rng, 3, 2, 4.0);
    let exact = model::metrics(&w, &phi, &ch, &cfg).unwrap();
    let est = monte_carlo_metrics(&w, &phi, &ch, &cfg, 100_000, &mut rng);
    for (a, b) in exact.target_snr.iter().zip(&est.target_snr) {
        assert!((a - b).abs() < 0.03 * a, "{a} vs {b}");
    }
    for (a, b) in exact.sinr.iter().zip(&est.sinr) {
        assert!((a - b).abs() < 0.03 * a, "{a} vs {b}");
    }
}
