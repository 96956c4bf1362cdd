//! Random problem instances for property checks and oracle comparisons.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::{BeamformerMatrix, PhaseVector};
use crate::scenario::ChannelSet;
use crate::{CMatrix, CVector, Complex64};

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_cvector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn random_cmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Hermitian PSD matrix of the given rank (`R R^H`).
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> CMatrix {
    let r = random_cmatrix(rng, n, rank);
    &r * r.adjoint()
}

/// Channel set with i.i.d. CN(0, 1) entries; `ris_scale` multiplies the
/// RIS-side channels.
pub fn random_channels<R: Rng + ?Sized>(
    rng: &mut R,
    antennas: usize,
    ris: usize,
    users: usize,
    targets: usize,
    ris_scale: f64,
) -> ChannelSet {
    let s = Complex64::from(ris_scale);
    ChannelSet {
        h_d_t: (0..targets).map(|_| random_cvector(rng, antennas)).collect(),
        h_r_t: (0..targets).map(|_| random_cvector(rng, ris) * s).collect(),
        g: random_cmatrix(rng, ris, antennas) * s,
        h_d_k: (0..users).map(|_| random_cvector(rng, antennas)).collect(),
        h_r_k: (0..users).map(|_| random_cvector(rng, ris) * s).collect(),
    }
}

/// Random precoder scaled to Frobenius power `power`.
pub fn random_beamformer<R: Rng + ?Sized>(
    rng: &mut R,
    antennas: usize,
    users: usize,
    power: f64,
) -> BeamformerMatrix {
    let w = random_cmatrix(rng, antennas, users + antennas);
    let scale = (power / w.norm_squared()).sqrt();
    BeamformerMatrix::new(w * Complex64::from(scale), users).expect("shape")
}

pub fn random_phase<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PhaseVector {
    PhaseVector::random(n, rng)
}
