//! Sample-average estimates of radar SNR and user SINR from simulated
//! symbol and noise realizations.

use rand::Rng;

use super::instances::complex_normal;
use crate::model::{BeamformerMatrix, Metrics, PhaseVector};
use crate::scenario::{ChannelSet, ScenarioConfig};
use crate::{to_db, CVector, Complex64};

/// Draws `n_samples` unit-power symbol vectors `s` and noise, forms the
/// target echoes `H_t W s + n_r` and user signals `h_k^T W s + n_k`, and
/// returns the empirical signal-to-noise ratios.
pub fn monte_carlo_metrics<R: Rng + ?Sized>(
    w: &BeamformerMatrix,
    phi: &PhaseVector,
    ch: &ChannelSet,
    config: &ScenarioConfig,
    n_samples: usize,
    rng: &mut R,
) -> Metrics {
    let wm = w.matrix();
    let m = wm.nrows();
    let cols = wm.ncols();
    let k_users = w.users();
    // Channels rebuilt elementwise.
    let one_way = |hd: &CVector, hr: &CVector| -> CVector {
        CVector::from_fn(m, |i, _| {
            let mut acc = hd[i];
            for n in 0..phi.len() {
                acc += ch.g[(n, i)] * phi.as_vector()[n] * hr[n];
            }
            acc
        })
    };
    let targets: Vec<CVector> = (0..ch.targets()).map(|t| one_way(&ch.h_d_t[t], &ch.h_r_t[t])).collect();
    let users: Vec<CVector> = (0..k_users).map(|k| one_way(&ch.h_d_k[k], &ch.h_r_k[k])).collect();
    let sr = config.sigma_r_sq.sqrt();
    let sk = config.sigma_k_sq.sqrt();

    let mut echo = vec![0.0; targets.len()];
    let mut radar_noise = 0.0;
    let mut sig = vec![0.0; k_users];
    let mut intf = vec![0.0; k_users];
    let mut user_noise = vec![0.0; k_users];
    let mut x = CVector::zeros(m);
    let mut s = CVector::zeros(cols);
    for _ in 0..n_samples {
        for v in s.iter_mut() {
            *v = complex_normal(rng);
        }
        x.gemv(Complex64::ONE, wm, &s, Complex64::ZERO);
        for (t, g) in targets.iter().enumerate() {
            // H_t x = g (g^T x)
            let gx = g.transpose() * &x;
            echo[t] += g.norm_squared() * gx[0].norm_sqr();
        }
        for _ in 0..m {
            radar_noise += (complex_normal(rng) * sr).norm_sqr();
        }
        for (k, h) in users.iter().enumerate() {
            let mut desired = Complex64::ZERO;
            let mut other = Complex64::ZERO;
            for j in 0..cols {
                let mut hw = Complex64::ZERO;
                for i in 0..m {
                    hw += h[i] * wm[(i, j)];
                }
                if j == k {
                    desired += hw * s[j];
                } else {
                    other += hw * s[j];
                }
            }
            sig[k] += desired.norm_sqr();
            intf[k] += other.norm_sqr();
            user_noise[k] += (complex_normal(rng) * sk).norm_sqr();
        }
    }
    let ns = n_samples as f64;
    let noise_r = radar_noise / (ns * m as f64);
    let target_snr: Vec<f64> = echo.iter().map(|e| e / ns / noise_r).collect();
    let sum_snr = target_snr.iter().zip(&config.weights).map(|(s, w)| s * w).sum();
    let sinr: Vec<f64> = (0..k_users)
        .map(|k| sig[k] / (intf[k] + user_noise[k]))
        .collect();
    Metrics {
        sum_snr_db: to_db(sum_snr),
        sinr_db: sinr.iter().map(|s| to_db(*s)).collect(),
        target_snr,
        sum_snr,
        sinr,
        power: wm.norm_squared(),
    }
}
