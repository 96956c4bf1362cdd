use super::*;
use crate::oracle::instances::{random_beamformer, random_channels, random_cvector, random_phase};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn second_singular_ratio(h: &CMatrix) -> f64 {
    let sv = h.clone().svd(false, false).singular_values;
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if s[0] == 0.0 {
        0.0
    } else {
        s[1] / s[0]
    }
}

#[test]
fn user_channel_without_ris_is_direct() {
    let mut r = rng(1);
    let ch = random_channels(&mut r, 4, 6, 2, 1, 1.0).without_ris();
    let phi = random_phase(&mut r, 6);
    for k in 0..2 {
        assert_eq!(effective_user_channel(&ch, &phi, k).unwrap(), ch.h_d_k[k]);
    }
    assert!(matches!(
        effective_user_channel(&ch, &phi, 2),
        Err(Error::IndexOutOfRange { index: 2, len: 2 })
    ));
}

#[test]
fn user_channel_single_element_expansion() {
    let mut r = rng(2);
    let ch = random_channels(&mut r, 3, 1, 1, 1, 1.0);
    let phi = PhaseVector::from_angles(&[0.7]);
    let h = effective_user_channel(&ch, &phi, 0).unwrap();
    for m in 0..3 {
        let want = ch.h_d_k[0][m] + phi.as_vector()[0] * ch.h_r_k[0][0] * ch.g[(0, m)];
        assert!((h[m] - want).norm() < 1e-14);
    }
}

#[test]
fn target_channel_without_ris_and_symmetry_and_rank() {
    let mut r = rng(3);
    let ch = random_channels(&mut r, 5, 7, 1, 2, 0.5);
    let phi = random_phase(&mut r, 7);
    let plain = ch.without_ris();
    for t in 0..2 {
        let h0 = equivalent_target_channel(&plain, &phi, t).unwrap();
        let want = &ch.h_d_t[t] * ch.h_d_t[t].transpose();
        assert!((h0 - want).norm() < 1e-14);

        let h = equivalent_target_channel(&ch, &phi, t).unwrap();
        assert!((&h - h.transpose()).norm() < 1e-14);
        assert!(second_singular_ratio(&h) < 1e-10);
    }
    assert!(equivalent_target_channel(&ch, &phi, 2).is_err());
}

#[test]
fn radar_snr_zero_and_normalized() {
    let mut r = rng(4);
    let w = BeamformerMatrix::zeros(4, 2);
    let h = random_cvector(&mut r, 4);
    let ht = &h * h.transpose();
    assert_eq!(radar_snr(&w, &ht, 1.0).unwrap(), 0.0);

    let bf = random_beamformer(&mut r, 4, 2, 3.0);
    let raw = (&ht * bf.matrix()).norm_squared();
    // sigma^2 equal to the echo power gives SNR 1.
    assert!((radar_snr(&bf, &ht, raw).unwrap() - 1.0).abs() < 1e-14);
    assert!((radar_snr_rank_one(bf.matrix(), &h, raw) - 1.0).abs() < 1e-12);
}

#[test]
fn weighted_sum_linear_in_weights() {
    let mut r = rng(5);
    let ch = random_channels(&mut r, 4, 5, 1, 1, 0.3);
    let phi = random_phase(&mut r, 5);
    let w = random_beamformer(&mut r, 4, 1, 2.0);
    let mut cfg = ScenarioConfig::desk();
    cfg.target_azimuths_deg = vec![0.0];
    cfg.weights = vec![1.0];
    cfg.sigma_r_sq = 0.7;
    let single = radar_snr(&w, &equivalent_target_channel(&ch, &phi, 0).unwrap(), 0.7).unwrap();
    let sum = weighted_sum_snr(&w, &phi, &ch, &cfg).unwrap();
    assert!((single - sum).abs() < 1e-12 * single);
    cfg.weights = vec![2.0];
    let doubled = weighted_sum_snr(&w, &phi, &ch, &cfg).unwrap();
    assert!((doubled - 2.0 * sum).abs() < 1e-12 * sum);
}

#[test]
fn sinr_single_column_and_orthogonal() {
    let h = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]);
    let w = CMatrix::from_column_slice(2, 1, &[Complex64::new(0.5, 0.0), Complex64::new(1.0, 1.0)]);
    let gain = (h.transpose() * &w)[0].norm_sqr();
    assert!((sinr_from_channel(&w, &h, 0, 0.25) - gain / 0.25).abs() < 1e-14);

    // w_0 orthogonal to h under the bilinear product h^T w.
    let w = CMatrix::from_column_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 2.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    assert!(sinr_from_channel(&w, &h, 0, 1.0).abs() < 1e-30);
}

#[test]
fn sinr_no_ris_is_phase_invariant() {
    let mut r = rng(6);
    let ch = random_channels(&mut r, 4, 6, 2, 1, 1.0).without_ris();
    let w = random_beamformer(&mut r, 4, 2, 1.0);
    let phi = random_phase(&mut r, 6);
    let rotated = PhaseVector::retract(&phi.as_vector().map(|x| x * Complex64::from_polar(1.0, 1.3)));
    for k in 0..2 {
        assert_eq!(
            comm_sinr(&w, &phi, &ch, k, 0.1).unwrap(),
            comm_sinr(&w, &rotated, &ch, k, 0.1).unwrap()
        );
    }
}

#[test]
fn metrics_consistent_db() {
    let mut r = rng(7);
    let mut cfg = ScenarioConfig::desk();
    cfg.sigma_r_sq = 1.0;
    cfg.sigma_k_sq = 1.0;
    let ch = random_channels(&mut r, 8, 16, 2, 2, 0.3);
    let phi = random_phase(&mut r, 16);
    let w = random_beamformer(&mut r, 8, 2, 2.0);
    let m = metrics(&w, &phi, &ch, &cfg).unwrap();
    assert!((m.sum_snr_db - 10.0 * m.sum_snr.log10()).abs() < 1e-12);
    for (l, d) in m.sinr.iter().zip(&m.sinr_db) {
        assert!((d - 10.0 * l.log10()).abs() < 1e-12);
    }
    assert!((m.power - 2.0).abs() < 1e-12);
    assert!(m.target_snr.iter().all(|s| *s >= 0.0));
}

#[test]
fn phase_vector_validation() {
    assert!(PhaseVector::new(CVector::from_element(3, Complex64::new(1.1, 0.0))).is_err());
    let p = PhaseVector::retract(&CVector::from_vec(vec![
        Complex64::new(3.0, 4.0),
        Complex64::ZERO,
    ]));
    assert!(p.max_modulus_error() < 1e-15);
    assert_eq!(p.as_vector()[1], Complex64::ONE);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radar_snr_ignores_column_phases(seed in any::<u64>(), angles in proptest::collection::vec(0.0..6.3f64, 6)) {
        let mut r = rng(seed);
        let ch = random_channels(&mut r, 4, 5, 2, 1, 0.5);
        let phi = random_phase(&mut r, 5);
        let w = random_beamformer(&mut r, 4, 2, 1.0);
        let ht = equivalent_target_channel(&ch, &phi, 0).unwrap();
        let mut wr = w.matrix().clone();
        for (j, a) in angles.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, *a);
            wr.column_mut(j).iter_mut().for_each(|x| *x *= ph);
        }
        let wr = BeamformerMatrix::new(wr, 2).unwrap();
        let a = radar_snr(&w, &ht, 1.0).unwrap();
        let b = radar_snr(&wr, &ht, 1.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn target_channel_rank_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ch = random_channels(&mut r, 6, 8, 1, 1, 1.0);
        let phi = random_phase(&mut r, 8);
        let h = equivalent_target_channel(&ch, &phi, 0).unwrap();
        prop_assert!(second_singular_ratio(&h) < 1e-10);
    }
}
