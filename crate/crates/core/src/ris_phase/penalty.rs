//! Penalty method for the phase subproblem.
//!
//! The coupling `a_{k,j} = h_k^T w_j` is moved into the objective with
//! weight `rho`. At fixed `rho` the auxiliary gains and the phases are
//! updated alternately (gains first); then `rho` grows by `1 / c` until
//! the largest coupling residual `zeta` drops below `epsilon`.

use serde::{Deserialize, Serialize};

use crate::conic::SolverSettings;
use crate::error::{Error, Result};
use crate::model::{radar_snr_rank_one, PhaseVector};
use crate::scenario::{ChannelSet, ScenarioConfig, SolverConfig};
use crate::{CMatrix, CVector};

use super::auxvars::{solve_a_step, AuxVars};
use super::coeffs::{
    build_bt, mm_phi_coeffs, penalty_quadratic, vt_factored, PhiStepCoeffs,
};
use super::rcg::{rcg_optimize, RcgOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyState {
    pub rho: f64,
    pub shrink: f64,
    pub epsilon: f64,
    pub zeta: f64,
    pub inner_rounds: usize,
    pub outer_rounds: usize,
    /// `rho` used in each completed outer round.
    pub rho_history: Vec<f64>,
    pub zeta_history: Vec<f64>,
}

impl PenaltyState {
    pub fn new(solver: &SolverConfig) -> Self {
        Self {
            rho: solver.rho_init,
            shrink: solver.shrink,
            epsilon: solver.epsilon,
            zeta: f64::INFINITY,
            inner_rounds: 0,
            outer_rounds: 0,
            rho_history: Vec::new(),
            zeta_history: Vec::new(),
        }
    }

    pub fn converged(&self) -> bool {
        self.zeta < self.epsilon
    }
}

/// Fixed data of one phase subproblem (precoder held constant).
#[derive(Debug, Clone)]
pub struct PhiStep<'a> {
    pub ch: &'a ChannelSet,
    pub w: &'a CMatrix,
    pub weights: Vec<f64>,
    pub sigma_r_sq: f64,
    pub gamma: Vec<f64>,
    /// Noise amplitudes `sigma_k`.
    pub sigma_k: Vec<f64>,
    pub settings: SolverSettings,
    pub rcg: RcgOptions,
    pub inner_tol: f64,
    pub max_inner_rounds: usize,
    pub max_penalty_rounds: usize,
    b_t: Vec<CMatrix>,
    b_k: Vec<CMatrix>,
}

#[derive(Debug, Clone)]
pub struct PenaltyOutcome {
    pub phi: PhaseVector,
    pub aux: AuxVars,
    pub state: PenaltyState,
    pub converged: bool,
    pub rcg_line_search_failures: usize,
}

impl<'a> PhiStep<'a> {
    pub fn new(ch: &'a ChannelSet, w: &'a CMatrix, config: &ScenarioConfig) -> Result<Self> {
        ch.check_shapes()?;
        if w.nrows() != ch.antennas() || w.ncols() != ch.users() + ch.antennas() {
            return Err(Error::shape("precoder does not match the channel set"));
        }
        let b_t = ch
            .h_r_t
            .iter()
            .map(|h| build_bt(&ch.g, h))
            .collect::<Result<_>>()?;
        let b_k = ch
            .h_r_k
            .iter()
            .map(|h| build_bt(&ch.g, h))
            .collect::<Result<_>>()?;
        let s = &config.solver;
        Ok(Self {
            ch,
            w,
            weights: config.weights.clone(),
            sigma_r_sq: config.sigma_r_sq,
            gamma: vec![config.gamma_linear(); ch.users()],
            sigma_k: vec![config.sigma_k_sq.sqrt(); ch.users()],
            settings: SolverSettings {
                tol: s.conic_tol,
                max_iter: s.conic_max_iter,
            },
            rcg: RcgOptions {
                max_iter: s.rcg_max_iter,
                grad_tol: s.rcg_grad_tol,
                ..RcgOptions::default()
            },
            inner_tol: s.inner_tol,
            max_inner_rounds: s.max_inner_rounds,
            max_penalty_rounds: s.max_penalty_rounds,
            b_t,
            b_k,
        })
    }

    pub fn users(&self, phi: &CVector) -> Vec<CVector> {
        self.b_k
            .iter()
            .zip(&self.ch.h_d_k)
            .map(|(b, hd)| hd + b * phi)
            .collect()
    }

    /// True weighted radar sum-SNR at `phi`.
    pub fn radar(&self, phi: &CVector) -> f64 {
        self.b_t
            .iter()
            .zip(&self.ch.h_d_t)
            .zip(&self.weights)
            .map(|((b, hd), w)| w * radar_snr_rank_one(self.w, &(hd + b * phi), self.sigma_r_sq))
            .sum()
    }

    pub fn a_step(&self, phi: &CVector) -> Result<AuxVars> {
        solve_a_step(&self.users(phi), self.w, &self.gamma, &self.sigma_k, &self.settings)
    }

    pub fn gains(&self, phi: &CVector) -> CMatrix {
        AuxVars::gains(&self.users(phi), self.w, &self.sigma_k)
    }

    /// Quadratic models at expansion point `phi`.
    pub fn coeffs(&self, phi: &CVector, aux: &AuxVars, scale: f64) -> Result<PhiStepCoeffs> {
        let v: Vec<CVector> = self
            .b_t
            .iter()
            .zip(&self.ch.h_d_t)
            .map(|(b, hd)| vt_factored(b, hd, phi))
            .collect();
        let mm = mm_phi_coeffs(&v, &self.b_t, &self.ch.h_d_t, self.w, &self.weights, self.sigma_r_sq)?;
        let penalty = penalty_quadratic(
            self.w,
            &self.ch.g,
            &self.ch.h_d_k,
            &self.ch.h_r_k,
            &self.sigma_k,
            &aux.a,
        )?;
        Ok(PhiStepCoeffs { mm, penalty, scale })
    }

    /// `-radar(phi) / scale + rho sum |a - gains|^2`.
    pub fn penalized(&self, phi: &CVector, aux: &AuxVars, rho: f64, scale: f64) -> f64 {
        let gains = self.gains(phi);
        let pen: f64 = aux.a.zip_map(&gains, |a, b| (a - b).norm_sqr()).sum();
        -self.radar(phi) / scale + rho * pen
    }

    pub fn penalty_loop(&self, phi_init: &PhaseVector, mut state: PenaltyState) -> Result<PenaltyOutcome> {
        if phi_init.len() != self.ch.ris_elements() {
            return Err(Error::shape("phase vector length differs from RIS size"));
        }
        let scale = self.radar(phi_init.as_vector()).max(f64::MIN_POSITIVE);
        let mut phi = phi_init.clone();
        let mut aux = self.a_step(phi.as_vector())?;
        let mut failures = 0;
        let mut best: Option<(f64, PhaseVector, AuxVars)> = None;

        loop {
            let mut prev: Option<f64> = None;
            for _ in 0..self.max_inner_rounds.max(1) {
                let coeffs = self.coeffs(phi.as_vector(), &aux, scale)?;
                let res = rcg_optimize(&phi, &coeffs, state.rho, &self.rcg);
                if res.line_search_failed {
                    failures += 1;
                }
                phi = res.phi;
                aux = self.a_step(phi.as_vector())?;
                state.inner_rounds += 1;
                let val = self.penalized(phi.as_vector(), &aux, state.rho, scale);
                if let Some(p) = prev {
                    if (val - p).abs() <= self.inner_tol * p.abs().max(1.0) {
                        break;
                    }
                }
                prev = Some(val);
            }
            state.zeta = aux.zeta(&self.gains(phi.as_vector()));
            state.rho_history.push(state.rho);
            state.zeta_history.push(state.zeta);
            state.outer_rounds += 1;
            if best.as_ref().is_none_or(|(z, _, _)| state.zeta < *z) {
                best = Some((state.zeta, phi.clone(), aux.clone()));
            }
            if state.converged() || state.outer_rounds >= self.max_penalty_rounds {
                break;
            }
            state.rho /= state.shrink;
        }

        let converged = state.converged();
        let (zeta, phi, aux) = best.expect("at least one round");
        if !converged {
            state.zeta = zeta;
        }
        Ok(PenaltyOutcome {
            phi,
            aux,
            state,
            converged,
            rcg_line_search_failures: failures,
        })
    }
}
