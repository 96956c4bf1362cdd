//! System model: precoder and phase types, effective channels and the radar
//! SNR / communication SINR metrics.

pub mod vecops;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{ChannelSet, ScenarioConfig};
use crate::{to_db, CMatrix, CVector, Complex64};

/// Absolute tolerance for power and SINR feasibility checks.
pub const TOL_FEAS: f64 = 1e-8;

/// Stacked precoder `W = [W_c W_r]`: the first `users` columns carry
/// communication symbols, the remaining `M` columns radar probing streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformerMatrix {
    w: CMatrix,
    users: usize,
}

impl BeamformerMatrix {
    pub fn new(w: CMatrix, users: usize) -> Result<Self> {
        if users > w.ncols() {
            return Err(Error::shape(format!(
                "{users} communication columns requested from a {}-column matrix",
                w.ncols()
            )));
        }
        Ok(Self { w, users })
    }

    pub fn zeros(antennas: usize, users: usize) -> Self {
        Self {
            w: CMatrix::zeros(antennas, users + antennas),
            users,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.w
    }

    pub fn matrix_mut(&mut self) -> &mut CMatrix {
        &mut self.w
    }

    pub fn into_matrix(self) -> CMatrix {
        self.w
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn antennas(&self) -> usize {
        self.w.nrows()
    }

    pub fn columns(&self) -> usize {
        self.w.ncols()
    }

    /// `||W||_F^2`.
    pub fn power(&self) -> f64 {
        self.w.norm_squared()
    }

    pub fn is_power_feasible(&self, budget: f64) -> bool {
        self.power() <= budget + TOL_FEAS
    }
}

/// RIS reflection coefficients with `|phi_n| = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector(CVector);

impl PhaseVector {
    pub const MODULUS_TOL: f64 = 1e-12;

    pub fn new(phi: CVector) -> Result<Self> {
        let p = Self(phi);
        if p.max_modulus_error() > Self::MODULUS_TOL {
            return Err(Error::invalid("reflection coefficients must have unit modulus"));
        }
        Ok(p)
    }

    /// Entrywise normalization onto the unit circle; zero entries map to 1.
    pub fn retract(v: &CVector) -> Self {
        Self(v.map(|x| {
            let r = x.norm();
            if r > 0.0 {
                x / r
            } else {
                Complex64::ONE
            }
        }))
    }

    pub fn from_angles(angles: &[f64]) -> Self {
        Self(CVector::from_iterator(
            angles.len(),
            angles.iter().map(|a| Complex64::from_polar(1.0, *a)),
        ))
    }

    pub fn ones(n: usize) -> Self {
        Self(CVector::from_element(n, Complex64::ONE))
    }

    /// I.i.d. uniform phases.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let angles: Vec<f64> = (0..n)
            .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
            .collect();
        Self::from_angles(&angles)
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_modulus_error(&self) -> f64 {
        self.0.iter().map(|x| (x.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn angles(&self) -> Vec<f64> {
        self.0.iter().map(|x| x.arg()).collect()
    }
}

/// Stacked symbol realization `s = [s_c; s_r]`, used by Monte-Carlo checks.
#[derive(Debug, Clone)]
pub struct SymbolBlock {
    pub s_c: CVector,
    pub s_r: CVector,
}

impl SymbolBlock {
    pub fn stacked(&self) -> CVector {
        let mut s = CVector::zeros(self.s_c.len() + self.s_r.len());
        s.rows_mut(0, self.s_c.len()).copy_from(&self.s_c);
        s.rows_mut(self.s_c.len(), self.s_r.len()).copy_from(&self.s_r);
        s
    }
}

/// Radar and communication figures of merit for one `(W, phi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub target_snr: Vec<f64>,
    pub sum_snr: f64,
    pub sum_snr_db: f64,
    pub sinr: Vec<f64>,
    pub sinr_db: Vec<f64>,
    pub power: f64,
}

/// Per-user effective channels `h_k` and per-target round-trip matrices `H_t`.
#[derive(Debug, Clone)]
pub struct EffectiveChannels {
    pub users: Vec<CVector>,
    pub targets: Vec<CMatrix>,
}

impl EffectiveChannels {
    pub fn compute(ch: &ChannelSet, phi: &PhaseVector) -> Result<Self> {
        let users = (0..ch.users())
            .map(|k| effective_user_channel(ch, phi, k))
            .collect::<Result<_>>()?;
        let targets = (0..ch.targets())
            .map(|t| equivalent_target_channel(ch, phi, t))
            .collect::<Result<_>>()?;
        Ok(Self { users, targets })
    }
}

fn check_phase_len(ch: &ChannelSet, phi: &PhaseVector) -> Result<()> {
    if phi.len() != ch.ris_elements() {
        return Err(Error::shape(format!(
            "phase vector has {} entries, RIS has {}",
            phi.len(),
            ch.ris_elements()
        )));
    }
    Ok(())
}

/// `G^T diag(phi) r` for an RIS-side channel `r`.
pub(crate) fn reflected(ch: &ChannelSet, phi: &PhaseVector, r: &CVector) -> CVector {
    ch.g.transpose() * phi.as_vector().component_mul(r)
}

/// `h_k = h_{d,k} + G^T diag(phi) h_{r,k}` (column form).
pub fn effective_user_channel(ch: &ChannelSet, phi: &PhaseVector, k: usize) -> Result<CVector> {
    if k >= ch.users() {
        return Err(Error::IndexOutOfRange { index: k, len: ch.users() });
    }
    check_phase_len(ch, phi)?;
    Ok(&ch.h_d_k[k] + reflected(ch, phi, &ch.h_r_k[k]))
}

/// One-way target channel `g_t = h_{d,t} + G^T diag(phi) h_{r,t}`; the
/// round-trip matrix is `H_t = g_t g_t^T`.
pub fn target_vector(ch: &ChannelSet, phi: &PhaseVector, t: usize) -> Result<CVector> {
    if t >= ch.targets() {
        return Err(Error::IndexOutOfRange { index: t, len: ch.targets() });
    }
    check_phase_len(ch, phi)?;
    Ok(&ch.h_d_t[t] + reflected(ch, phi, &ch.h_r_t[t]))
}

pub fn equivalent_target_channel(ch: &ChannelSet, phi: &PhaseVector, t: usize) -> Result<CMatrix> {
    let g = target_vector(ch, phi, t)?;
    Ok(&g * g.transpose())
}

/// `Tr(W^H H^H H W) / sigma_r^2`.
pub fn radar_snr(w: &BeamformerMatrix, h_t: &CMatrix, sigma_r_sq: f64) -> Result<f64> {
    if h_t.ncols() != w.antennas() {
        return Err(Error::shape("target channel and precoder sizes differ"));
    }
    Ok((h_t * w.matrix()).norm_squared() / sigma_r_sq)
}

/// Rank-one shortcut: `||g||^2 ||g^T W||^2 / sigma^2` for `H = g g^T`.
pub(crate) fn radar_snr_rank_one(w: &CMatrix, g: &CVector, sigma_r_sq: f64) -> f64 {
    g.norm_squared() * (g.transpose() * w).norm_squared() / sigma_r_sq
}

pub fn target_snrs(
    w: &BeamformerMatrix,
    phi: &PhaseVector,
    ch: &ChannelSet,
    sigma_r_sq: f64,
) -> Result<Vec<f64>> {
    (0..ch.targets())
        .map(|t| Ok(radar_snr_rank_one(w.matrix(), &target_vector(ch, phi, t)?, sigma_r_sq)))
        .collect()
}

/// Objective: `sum_t omega_t SNR_t(W, phi)`.
pub fn weighted_sum_snr(
    w: &BeamformerMatrix,
    phi: &PhaseVector,
    ch: &ChannelSet,
    config: &ScenarioConfig,
) -> Result<f64> {
    let snr = target_snrs(w, phi, ch, config.sigma_r_sq)?;
    if snr.len() != config.weights.len() {
        return Err(Error::shape("weights and targets differ in length"));
    }
    Ok(snr.iter().zip(&config.weights).map(|(s, w)| s * w).sum())
}

/// SINR of user `k` given its effective channel.
pub fn sinr_from_channel(w: &CMatrix, h: &CVector, k: usize, sigma_k_sq: f64) -> f64 {
    let gains = h.transpose() * w;
    let signal = gains[k].norm_sqr();
    let interference: f64 = gains
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, x)| x.norm_sqr())
        .sum();
    signal / (interference + sigma_k_sq)
}

/// `|h_k^T w_k|^2 / (sum_{j != k} |h_k^T w_j|^2 + sigma_k^2)` over all
/// `K + M` columns.
pub fn comm_sinr(
    w: &BeamformerMatrix,
    phi: &PhaseVector,
    ch: &ChannelSet,
    k: usize,
    sigma_k_sq: f64,
) -> Result<f64> {
    if k >= w.users() {
        return Err(Error::IndexOutOfRange { index: k, len: w.users() });
    }
    let h = effective_user_channel(ch, phi, k)?;
    if h.len() != w.antennas() {
        return Err(Error::shape("user channel and precoder sizes differ"));
    }
    Ok(sinr_from_channel(w.matrix(), &h, k, sigma_k_sq))
}

pub fn metrics(
    w: &BeamformerMatrix,
    phi: &PhaseVector,
    ch: &ChannelSet,
    config: &ScenarioConfig,
) -> Result<Metrics> {
    let target_snr = target_snrs(w, phi, ch, config.sigma_r_sq)?;
    let sum_snr = target_snr.iter().zip(&config.weights).map(|(s, w)| s * w).sum();
    let sinr = (0..w.users().min(ch.users()))
        .map(|k| comm_sinr(w, phi, ch, k, config.sigma_k_sq))
        .collect::<Result<Vec<_>>>()?;
    Ok(Metrics {
        sum_snr_db: to_db(sum_snr),
        sinr_db: sinr.iter().map(|s| to_db(*s)).collect(),
        target_snr,
        sum_snr,
        sinr,
        power: w.power(),
    })
}

#[cfg(test)]
mod tests;
