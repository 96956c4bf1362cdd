use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::geometry::{direction_sine, distance, Geometry};
use super::ScenarioConfig;
use crate::error::{Error, Result};
use crate::model::PhaseVector;
use crate::{from_db, CMatrix, CVector, Complex64};

/// Reference path-loss power gain at 1 m: -30 dB.
pub const DEFAULT_PL0: f64 = 1e-3;

/// One realization of every baseband channel in the deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    /// BS -> target `t`, length `M` each.
    pub h_d_t: Vec<CVector>,
    /// RIS -> target `t`, length `N` each.
    pub h_r_t: Vec<CVector>,
    /// BS -> RIS, `N x M`.
    pub g: CMatrix,
    /// BS -> user `k`, length `M` each.
    pub h_d_k: Vec<CVector>,
    /// RIS -> user `k`, length `N` each.
    pub h_r_k: Vec<CVector>,
}

impl ChannelSet {
    pub fn antennas(&self) -> usize {
        self.g.ncols()
    }

    pub fn ris_elements(&self) -> usize {
        self.g.nrows()
    }

    pub fn users(&self) -> usize {
        self.h_d_k.len()
    }

    pub fn targets(&self) -> usize {
        self.h_d_t.len()
    }

    pub fn check_shapes(&self) -> Result<()> {
        let (m, n) = (self.antennas(), self.ris_elements());
        if self.h_r_t.len() != self.h_d_t.len() || self.h_r_k.len() != self.h_d_k.len() {
            return Err(Error::shape("direct/reflected channel counts differ"));
        }
        let bad_m = self.h_d_t.iter().chain(&self.h_d_k).any(|h| h.len() != m);
        let bad_n = self.h_r_t.iter().chain(&self.h_r_k).any(|h| h.len() != n);
        if bad_m || bad_n {
            return Err(Error::shape(format!("channel lengths must be M={m} / N={n}")));
        }
        Ok(())
    }

    /// Copy with every RIS-side channel zeroed.
    pub fn without_ris(&self) -> Self {
        let zero = |v: &CVector| CVector::zeros(v.len());
        Self {
            h_d_t: self.h_d_t.clone(),
            h_r_t: self.h_r_t.iter().map(zero).collect(),
            g: CMatrix::zeros(self.g.nrows(), self.g.ncols()),
            h_d_k: self.h_d_k.clone(),
            h_r_k: self.h_r_k.iter().map(zero).collect(),
        }
    }
}

/// Half-wavelength ULA response `exp(j pi m sin(angle))`, `m = 0..n_elems-1`.
pub fn steering_vector(angle_deg: f64, n_elems: usize) -> Result<CVector> {
    if !(angle_deg > -90.0 && angle_deg < 90.0) {
        return Err(Error::invalid(format!("angle {angle_deg} outside (-90, 90)")));
    }
    if n_elems == 0 {
        return Err(Error::invalid("steering vector needs at least one element"));
    }
    Ok(steering_from_sine(angle_deg.to_radians().sin(), n_elems))
}

pub(crate) fn steering_from_sine(sine: f64, n_elems: usize) -> CVector {
    DVector::from_fn(n_elems, |m, _| {
        Complex64::from_polar(1.0, std::f64::consts::PI * m as f64 * sine)
    })
}

/// Amplitude gain `sqrt(PL0 * d^-alpha)` with the default reference loss.
pub fn path_loss_gain(distance: f64, exponent: f64) -> Result<f64> {
    path_loss_gain_with(DEFAULT_PL0, distance, exponent)
}

pub fn path_loss_gain_with(pl0: f64, distance: f64, exponent: f64) -> Result<f64> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::invalid(format!("distance must be positive, got {distance}")));
    }
    Ok((pl0 * distance.powf(-exponent)).sqrt())
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Mixes a unit-modulus line-of-sight component with i.i.d. CN(0, 1)
/// scattering at Rician factor `beta_db`. `+inf` dB returns the LoS part.
pub fn rician_channel<R: Rng + ?Sized>(los: &CMatrix, beta_db: f64, rng: &mut R) -> CMatrix {
    let mut out = los.clone();
    rician_in_place(out.as_mut_slice(), beta_db, rng);
    out
}

pub fn rician_vector<R: Rng + ?Sized>(los: &CVector, beta_db: f64, rng: &mut R) -> CVector {
    let mut out = los.clone();
    rician_in_place(out.as_mut_slice(), beta_db, rng);
    out
}

fn rician_in_place<R: Rng + ?Sized>(data: &mut [Complex64], beta_db: f64, rng: &mut R) {
    if beta_db == f64::INFINITY {
        return;
    }
    let beta = from_db(beta_db);
    let los_w = (beta / (1.0 + beta)).sqrt();
    let nlos_w = (1.0 / (1.0 + beta)).sqrt();
    for x in data.iter_mut() {
        *x = *x * los_w + complex_gaussian(rng) * nlos_w;
    }
}

/// Draws all channels for `geometry`. Target links are pure line of sight;
/// the BS-RIS and user links are Rician.
pub fn generate_channels<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    geometry: &Geometry,
    rng: &mut R,
) -> Result<ChannelSet> {
    config.validate()?;
    geometry.validate(config)?;
    let (m, n) = (config.antennas, config.ris_elements);
    let pl0 = config.pl0();
    let bs = geometry.bs_position;
    let ris = geometry.ris_position;
    let sine = |from, to| {
        direction_sine(from, to).ok_or_else(|| Error::invalid("coincident link endpoints"))
    };

    let mut h_d_t = Vec::with_capacity(config.targets());
    let mut h_r_t = Vec::with_capacity(config.targets());
    for &tp in &geometry.target_positions {
        let gd = path_loss_gain_with(pl0, distance(bs, tp), config.alpha_bt)?;
        h_d_t.push(steering_from_sine(sine(bs, tp)?, m) * Complex64::from(gd));
        let gr = path_loss_gain_with(pl0, distance(ris, tp), config.alpha_rt)?;
        h_r_t.push(steering_from_sine(sine(ris, tp)?, n) * Complex64::from(gr));
    }

    let g_los = steering_from_sine(sine(ris, bs)?, n) * steering_from_sine(sine(bs, ris)?, m).transpose();
    let g_gain = path_loss_gain_with(pl0, config.d_bs_ris, config.alpha_br)?;
    let g = rician_channel(&g_los, config.beta_other_db, rng) * Complex64::from(g_gain);

    let mut h_d_k = Vec::with_capacity(config.users);
    let mut h_r_k = Vec::with_capacity(config.users);
    for &up in &geometry.user_positions {
        let gd = path_loss_gain_with(pl0, distance(bs, up), config.alpha_bu)?;
        let los = steering_from_sine(sine(bs, up)?, m);
        h_d_k.push(rician_vector(&los, config.beta_other_db, rng) * Complex64::from(gd));
        let gr = path_loss_gain_with(pl0, distance(ris, up), config.alpha_ru)?;
        let los = steering_from_sine(sine(ris, up)?, n);
        h_r_k.push(rician_vector(&los, config.beta_ru_db, rng) * Complex64::from(gr));
    }

    let ch = ChannelSet {
        h_d_t,
        h_r_t,
        g,
        h_d_k,
        h_r_k,
    };
    debug_assert!(ch.check_shapes().is_ok());
    Ok(ch)
}

/// Comparison schemes that differ only in what the RIS contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselineMode {
    /// All RIS-side channels zeroed.
    NoRis,
    /// Channels unchanged, RIS held at i.i.d. uniform phases drawn from `seed`.
    RandomRis { seed: u64 },
    Full,
}

pub fn apply_baseline(ch: &ChannelSet, mode: BaselineMode) -> (ChannelSet, Option<PhaseVector>) {
    match mode {
        BaselineMode::NoRis => (ch.without_ris(), None),
        BaselineMode::RandomRis { seed } => {
            let mut rng = super::stream_rng(seed, super::STREAM_PHASES);
            let phi = PhaseVector::random(ch.ris_elements(), &mut rng);
            (ch.clone(), Some(phi))
        }
        BaselineMode::Full => (ch.clone(), None),
    }
}
