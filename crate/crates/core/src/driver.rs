//! Alternating optimization of `(W, phi)`, baselines and run traces.
//!
//! Each outer iteration runs one W-step (minorize-maximize SOCP) followed by
//! one phase step (penalty loop). The run stops when the weighted sum-SNR has
//! settled over a short window and the coupling residual `zeta` of the last
//! phase step is below `epsilon`. The final iterate always comes from a
//! W-step, so it satisfies the SINR and power cones up to solver accuracy.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::beamform_w::{min_power_comm, orthonormal_basis, solve_w_step, WStepContext};
use crate::conic::SolverSettings;
use crate::error::{Error, Result};
use crate::model::{self, BeamformerMatrix, EffectiveChannels, Metrics, PhaseVector};
use crate::ris_phase::{PenaltyState, PhiStep};
use crate::scenario::{apply_baseline, stream_rng, BaselineMode, ChannelSet, ScenarioConfig, STREAM_PHASES};
use crate::{CMatrix, CVector, Complex64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Proposed,
    NoRis,
    RandomRis,
    RadarOnly,
    RadarOnlyNoRis,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Proposed,
        Scheme::NoRis,
        Scheme::RandomRis,
        Scheme::RadarOnly,
        Scheme::RadarOnlyNoRis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::NoRis => "no_ris",
            Scheme::RandomRis => "random_ris",
            Scheme::RadarOnly => "radar_only",
            Scheme::RadarOnlyNoRis => "radar_only_no_ris",
        }
    }

    /// SINR constraints are dropped.
    pub fn is_radar_only(self) -> bool {
        matches!(self, Scheme::RadarOnly | Scheme::RadarOnlyNoRis)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scheme '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    MaxIterations,
    /// A subproblem failed; the run kept the last good iterate.
    Failed { reason: String },
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxIterations => "max_iter",
            RunStatus::Failed { .. } => "failed",
        }
    }
}

/// State after one outer iteration (iteration 0 is the initial point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub sum_snr: f64,
    pub sum_snr_db: f64,
    pub sinr_db: Vec<f64>,
    pub power: f64,
    /// Coupling residual of the preceding phase step (0 when there is none).
    pub zeta: f64,
    /// Final penalty weight of the preceding phase step.
    pub rho: f64,
    pub penalty_rounds: usize,
    pub phi_accepted: bool,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub entries: Vec<TraceEntry>,
    pub status: RunStatus,
}

impl RunTrace {
    /// Outer iterations performed (excluding the initial point).
    pub fn iterations(&self) -> usize {
        self.entries.last().map_or(0, |e| e.iter)
    }

    pub fn final_snr_db(&self) -> f64 {
        self.entries.last().map_or(f64::NEG_INFINITY, |e| e.sum_snr_db)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutcome {
    pub scheme: Scheme,
    pub w: BeamformerMatrix,
    pub phi: PhaseVector,
    pub metrics: Metrics,
    pub trace: RunTrace,
}

fn settings(config: &ScenarioConfig) -> SolverSettings {
    SolverSettings {
        tol: config.solver.conic_tol,
        max_iter: config.solver.conic_max_iter,
    }
}

/// Random phases and a feasible precoder: minimum-power communication
/// columns, then the remaining power on one radar column along the strongest
/// radar direction orthogonal to every user channel.
pub fn initialize<R: Rng + ?Sized>(
    ch: &ChannelSet,
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<(BeamformerMatrix, PhaseVector)> {
    ch.check_shapes()?;
    let phi = PhaseVector::random(ch.ris_elements(), rng);
    let w = initial_precoder(ch, &phi, config)?;
    Ok((w, phi))
}

fn initial_precoder(ch: &ChannelSet, phi: &PhaseVector, config: &ScenarioConfig) -> Result<BeamformerMatrix> {
    let m = ch.antennas();
    let k = ch.users();
    let eff = EffectiveChannels::compute(ch, phi)?;
    let gamma = vec![config.gamma_linear(); k];
    let sigma = vec![config.sigma_k_sq; k];
    let wc = min_power_comm(&eff.users, &gamma, &sigma, &settings(config))?.ok_or_else(|| {
        Error::Infeasible(format!("SINR target {} dB cannot be met by {k} users on {m} antennas", config.gamma_db))
    })?;
    let needed = wc.norm_squared();
    if needed > config.power_w * (1.0 - 1e-9) {
        return Err(Error::Infeasible(format!(
            "SINR target {} dB needs {needed:.4e} W, budget is {} W",
            config.gamma_db, config.power_w
        )));
    }
    let mut w = CMatrix::zeros(m, k + m);
    for j in 0..k {
        w.set_column(j, &wc.column(j));
    }
    let c1 = crate::beamform_w::build_c1(&eff.targets, &config.weights, config.sigma_r_sq)?;
    let conj: Vec<CVector> = eff.users.iter().map(|h| h.conjugate()).collect();
    let q = orthonormal_basis(&conj, m);
    let p_perp = CMatrix::identity(m, m) - &q * q.adjoint();
    let rest = config.power_w - needed;
    let reduced = &p_perp * &c1 * &p_perp;
    let eig = reduced.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let mut d = &p_perp * eig.eigenvectors.column(top);
    if d.norm() < 1e-9 {
        // some non-user direction, if any exists
        d = &p_perp * CVector::from_fn(m, |i, _| Complex64::new(1.0, 0.1 * i as f64));
    }
    if d.norm() > 1e-9 {
        w.set_column(k, &(d.unscale(d.norm()) * Complex64::from(rest.sqrt())));
    } else {
        // users span the whole space: scale the communication columns instead
        w *= Complex64::from((config.power_w / needed).sqrt());
    }
    BeamformerMatrix::new(w, k)
}

fn w_step(ch: &ChannelSet, phi: &PhaseVector, config: &ScenarioConfig, w: &BeamformerMatrix) -> Result<BeamformerMatrix> {
    solve_w_step(&WStepContext::from_scenario(ch, phi, config, w.clone())?)
}

struct PhiStepReport {
    phi: PhaseVector,
    zeta: f64,
    rho: f64,
    rounds: usize,
    accepted: bool,
}

/// Penalty loop from the current phases; the candidate is kept only if it
/// does not lower the weighted sum-SNR at the current precoder.
fn phi_step(ch: &ChannelSet, phi: &PhaseVector, config: &ScenarioConfig, w: &BeamformerMatrix) -> Result<PhiStepReport> {
    let step = PhiStep::new(ch, w.matrix(), config)?;
    let out = step.penalty_loop(phi, PenaltyState::new(&config.solver))?;
    let before = step.radar(phi.as_vector());
    let after = step.radar(out.phi.as_vector());
    let accepted = after >= before;
    Ok(PhiStepReport {
        phi: if accepted { out.phi } else { phi.clone() },
        zeta: out.state.zeta,
        rho: out.state.rho,
        rounds: out.state.outer_rounds,
        accepted,
    })
}

struct Tracker {
    start: Instant,
    entries: Vec<TraceEntry>,
}

impl Tracker {
    fn push(
        &mut self,
        ch: &ChannelSet,
        config: &ScenarioConfig,
        w: &BeamformerMatrix,
        phi: &PhaseVector,
        report: Option<&PhiStepReport>,
    ) -> Result<()> {
        let m = model::metrics(w, phi, ch, config)?;
        self.entries.push(TraceEntry {
            iter: self.entries.len(),
            sum_snr: m.sum_snr,
            sum_snr_db: m.sum_snr_db,
            sinr_db: m.sinr_db,
            power: m.power,
            zeta: report.map_or(0.0, |r| r.zeta),
            rho: report.map_or(0.0, |r| r.rho),
            penalty_rounds: report.map_or(0, |r| r.rounds),
            phi_accepted: report.is_some_and(|r| r.accepted),
            elapsed_s: self.start.elapsed().as_secs_f64(),
        });
        Ok(())
    }

    /// Sum-SNR settled over the window and the last phase step converged.
    fn settled(&self, config: &ScenarioConfig) -> bool {
        let win = config.solver.conv_window.max(1);
        let n = self.entries.len();
        if n < win + 1 {
            return false;
        }
        let calm = self.entries[n - win - 1..].windows(2).all(|p| {
            (p[1].sum_snr - p[0].sum_snr).abs() <= config.solver.conv_rel_tol * p[0].sum_snr.abs()
        });
        calm && self.entries[n - 1].zeta < config.solver.epsilon
    }
}

/// Alternates W-steps and phase steps from `(w0, phi0)`. With
/// `optimize_phi = false` only the precoder is iterated.
fn alternate(
    ch: &ChannelSet,
    config: &ScenarioConfig,
    scheme: Scheme,
    w0: BeamformerMatrix,
    phi0: PhaseVector,
    optimize_phi: bool,
) -> Result<RunOutcome> {
    let mut tracker = Tracker {
        start: Instant::now(),
        entries: Vec::new(),
    };
    let mut w = w0;
    let mut phi = phi0;
    tracker.push(ch, config, &w, &phi, None)?;
    let mut report: Option<PhiStepReport> = None;
    let mut status = RunStatus::MaxIterations;

    for _ in 0..config.solver.max_outer_iters {
        match w_step(ch, &phi, config, &w) {
            Ok(next) => w = next,
            Err(e) => {
                status = RunStatus::Failed { reason: e.to_string() };
                break;
            }
        }
        tracker.push(ch, config, &w, &phi, report.as_ref())?;
        if tracker.settled(config) {
            status = RunStatus::Converged;
            break;
        }
        if tracker.entries.len() > config.solver.max_outer_iters {
            break;
        }
        if optimize_phi {
            match phi_step(ch, &phi, config, &w) {
                Ok(r) => {
                    phi = r.phi.clone();
                    report = Some(r);
                }
                Err(e) => {
                    status = RunStatus::Failed { reason: e.to_string() };
                    break;
                }
            }
        }
    }

    let metrics = model::metrics(&w, &phi, ch, config)?;
    Ok(RunOutcome {
        scheme,
        w,
        phi,
        metrics,
        trace: RunTrace {
            entries: tracker.entries,
            status,
        },
    })
}

/// Full joint design from a random phase start.
///
/// With `radar_warm_start` a second run starts from the phases reached by a
/// radar-only phase ascent from the same random point; the run with the
/// higher final sum-SNR is returned.
pub fn alternating_optimize(ch: &ChannelSet, config: &ScenarioConfig) -> Result<RunOutcome> {
    let mut rng = stream_rng(config.rng_seed, STREAM_PHASES);
    let (w0, phi0) = initialize(ch, config, &mut rng)?;
    let cold = alternate(ch, config, Scheme::Proposed, w0, phi0.clone(), true)?;
    if !config.solver.radar_warm_start || ch.users() == 0 {
        return Ok(cold);
    }
    let aligned = radar_only_from(&without_users(ch), config, Scheme::RadarOnly, phi0, true)?;
    let warm = optimize_from(ch, config, aligned.phi)?;
    let usable = |o: &RunOutcome| !matches!(o.trace.status, RunStatus::Failed { .. });
    Ok(match (usable(&cold), usable(&warm)) {
        (true, true) if warm.metrics.sum_snr > cold.metrics.sum_snr => warm,
        (false, true) => warm,
        _ => cold,
    })
}

/// Joint design from the given starting phases.
pub fn optimize_from(ch: &ChannelSet, config: &ScenarioConfig, phi0: PhaseVector) -> Result<RunOutcome> {
    let w0 = initial_precoder(ch, &phi0, config)?;
    alternate(ch, config, Scheme::Proposed, w0, phi0, true)
}

pub fn without_users(ch: &ChannelSet) -> ChannelSet {
    ChannelSet {
        h_d_k: Vec::new(),
        h_r_k: Vec::new(),
        ..ch.clone()
    }
}

/// Runs one comparison scheme on the channel realization `ch`.
///
/// Radar-only schemes keep the power budget and drop every SINR constraint;
/// the RIS variant is warm-started from the proposed solution so that it can
/// only improve on it.
pub fn run_baseline(ch: &ChannelSet, config: &ScenarioConfig, scheme: Scheme) -> Result<RunOutcome> {
    match scheme {
        Scheme::Proposed => alternating_optimize(ch, config),
        Scheme::NoRis => {
            let (bare, _) = apply_baseline(ch, BaselineMode::NoRis);
            let phi = PhaseVector::ones(bare.ris_elements());
            let w0 = initial_precoder(&bare, &phi, config)?;
            alternate(&bare, config, scheme, w0, phi, false)
        }
        Scheme::RandomRis => {
            let (same, phi) = apply_baseline(ch, BaselineMode::RandomRis { seed: config.rng_seed });
            let phi = phi.expect("random phases");
            let w0 = initial_precoder(&same, &phi, config)?;
            alternate(&same, config, scheme, w0, phi, false)
        }
        Scheme::RadarOnly => {
            let warm = alternating_optimize(ch, config)?;
            radar_only_from(&without_users(ch), config, scheme, warm.phi, true)
        }
        Scheme::RadarOnlyNoRis => {
            let (bare, _) = apply_baseline(ch, BaselineMode::NoRis);
            let phi = PhaseVector::ones(bare.ris_elements());
            radar_only_from(&without_users(&bare), config, scheme, phi, false)
        }
    }
}

/// Radar-only run from phases `phi` (users already removed from `ch`).
pub fn radar_only_from(
    ch: &ChannelSet,
    config: &ScenarioConfig,
    scheme: Scheme,
    phi: PhaseVector,
    optimize_phi: bool,
) -> Result<RunOutcome> {
    let w0 = initial_precoder(ch, &phi, config)?;
    alternate(ch, config, scheme, w0, phi, optimize_phi)
}

/// Mean of per-seed sum-SNR values in dB (arithmetic mean of dB values).
pub fn mean_db(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median of a sample (`NaN` when empty).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
