//! Precoder update at fixed RIS phases.
//!
//! The radar objective `Tr(W^H C_1 W)` is convex in `W`, so its first-order
//! expansion at `W_i` is a global lower bound. Maximizing that linear bound
//! subject to the SINR and power cones gives a monotone minorize-maximize
//! step. Column phases are first rotated so every `h_k^T w_k` is real and
//! nonnegative; the cone restriction `Im{h_k^T w_k} = 0` is then lossless at
//! the expansion point.

use crate::conic::{self, ComplexAffine, ProgramBuilder, RealAffine, SolverSettings};
use crate::error::{Error, Result};
use crate::model::{self, BeamformerMatrix, EffectiveChannels, PhaseVector, TOL_FEAS};
use crate::scenario::{ChannelSet, ScenarioConfig};
use crate::{CMatrix, CVector, Complex64};

/// Everything the W-step needs at one expansion point.
#[derive(Debug, Clone)]
pub struct WStepContext {
    pub c1: CMatrix,
    /// Effective user channels `h_k` (column form, `h_k^T w` is the gain).
    pub users: Vec<CVector>,
    /// Linear SINR targets.
    pub gamma: Vec<f64>,
    pub sigma_sq: Vec<f64>,
    pub power: f64,
    pub w_i: BeamformerMatrix,
    pub settings: SolverSettings,
}

impl WStepContext {
    pub fn from_scenario(
        ch: &ChannelSet,
        phi: &PhaseVector,
        config: &ScenarioConfig,
        w_i: BeamformerMatrix,
    ) -> Result<Self> {
        let eff = EffectiveChannels::compute(ch, phi)?;
        let k = ch.users();
        Ok(Self {
            c1: build_c1(&eff.targets, &config.weights, config.sigma_r_sq)?,
            users: eff.users,
            gamma: vec![config.gamma_linear(); k],
            sigma_sq: vec![config.sigma_k_sq; k],
            power: config.power_w,
            w_i,
            settings: SolverSettings {
                tol: config.solver.conic_tol,
                max_iter: config.solver.conic_max_iter,
            },
        })
    }

    fn validate(&self) -> Result<()> {
        let m = self.c1.nrows();
        let k = self.users.len();
        if self.c1.ncols() != m || self.w_i.antennas() != m {
            return Err(Error::shape("C_1 and precoder sizes differ"));
        }
        if self.w_i.users() != k || self.gamma.len() != k || self.sigma_sq.len() != k {
            return Err(Error::shape("user count differs between channels, targets and precoder"));
        }
        if self.users.iter().any(|h| h.len() != m) {
            return Err(Error::shape("user channel length differs from antenna count"));
        }
        if !(self.power > 0.0) || self.sigma_sq.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::invalid("power and noise powers must be positive"));
        }
        if self.gamma.iter().any(|g| !(*g > 0.0)) {
            return Err(Error::invalid("SINR targets must be positive"));
        }
        Ok(())
    }

    /// `Tr(W^H C_1 W)`.
    pub fn objective(&self, w: &CMatrix) -> f64 {
        radar_objective(&self.c1, w)
    }

    /// Power within budget and every SINR at least `(1 - tol)` of its target.
    pub fn is_feasible(&self, w: &CMatrix, tol: f64) -> bool {
        if w.norm_squared() > self.power * (1.0 + tol) + TOL_FEAS {
            return false;
        }
        self.users.iter().enumerate().all(|(k, h)| {
            model::sinr_from_channel(w, h, k, self.sigma_sq[k]) >= self.gamma[k] * (1.0 - tol)
        })
    }
}

/// `C_1 = sum_t omega_t H_t^H H_t / sigma_r^2`.
pub fn build_c1(h_t: &[CMatrix], weights: &[f64], sigma_r_sq: f64) -> Result<CMatrix> {
    if h_t.is_empty() {
        return Err(Error::invalid("at least one target is required"));
    }
    if h_t.len() != weights.len() {
        return Err(Error::shape("one weight per target required"));
    }
    let m = h_t[0].ncols();
    let mut c1 = CMatrix::zeros(m, m);
    for (h, &w) in h_t.iter().zip(weights) {
        if h.shape() != (m, m) {
            return Err(Error::shape("target channels must be square and equal size"));
        }
        c1 += h.adjoint() * h * Complex64::from(w / sigma_r_sq);
    }
    // Remove round-off asymmetry.
    let herm = (&c1 + c1.adjoint()) * Complex64::from(0.5);
    Ok(herm)
}

pub fn radar_objective(c1: &CMatrix, w: &CMatrix) -> f64 {
    (w.adjoint() * c1 * w).trace().re
}

/// Linear minorizer of `Tr(W^H C_1 W)` at `W_i`:
/// `2 Re Tr(W_i^H C_1 W) - Tr(W_i^H C_1 W_i)`.
pub fn mm_surrogate_w(w: &CMatrix, w_i: &CMatrix, c1: &CMatrix) -> Result<f64> {
    if w.shape() != w_i.shape() || c1.ncols() != w.nrows() {
        return Err(Error::shape("surrogate arguments differ in shape"));
    }
    let u = c1 * w_i;
    let lin = u.zip_fold(w, 0.0, |acc, a, b| acc + (a.conj() * b).re);
    Ok(2.0 * lin - radar_objective(c1, w_i))
}

/// Rotates the first `K` columns so that `h_k^T w_k` is real and nonnegative.
/// Columns with a vanishing inner product are left unchanged.
pub fn rotate_columns(w: &BeamformerMatrix, users: &[CVector]) -> Result<BeamformerMatrix> {
    if users.len() > w.columns() {
        return Err(Error::shape("more users than precoder columns"));
    }
    let mut out = w.clone();
    for (k, h) in users.iter().enumerate() {
        if h.len() != w.antennas() {
            return Err(Error::shape("user channel length differs from antenna count"));
        }
        let g = (h.transpose() * w.matrix().column(k))[0];
        if g.norm() > 0.0 {
            let rot = g.conj() / g.norm();
            let col = w.matrix().column(k) * rot;
            out.matrix_mut().set_column(k, &col);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WFormulation {
    /// Optimizes only the component of `W` in the span of the user channels
    /// plus one scalar along the projected ascent direction. Exact, and much
    /// smaller than the full program when `K << M`.
    #[default]
    Reduced,
    /// All `M (K + M)` complex entries as variables.
    Full,
}

/// One MM step with the default formulation.
pub fn solve_w_step(ctx: &WStepContext) -> Result<BeamformerMatrix> {
    solve_w_step_with(ctx, WFormulation::Reduced)
}

pub fn solve_w_step_with(ctx: &WStepContext, form: WFormulation) -> Result<BeamformerMatrix> {
    ctx.validate()?;
    let m = ctx.c1.nrows();
    let cols = ctx.w_i.columns();
    let w_i = rotate_columns(&ctx.w_i, &ctx.users)?;
    let u = &ctx.c1 * w_i.matrix();

    let conj_users: Vec<CVector> = ctx.users.iter().map(|h| h.conjugate()).collect();
    let (basis, extra) = match form {
        WFormulation::Full => (CMatrix::identity(m, m), None),
        WFormulation::Reduced => {
            let q = orthonormal_basis(&conj_users, m);
            // P_perp U
            let perp = &u - &q * (q.adjoint() * &u);
            let n = perp.norm();
            let extra = (n > 1e-12 * u.norm().max(f64::MIN_POSITIVE)).then(|| perp.unscale(n));
            (q, extra)
        }
    };
    let r = basis.ncols();
    let scale = ctx.power.sqrt();

    let mut pb = ProgramBuilder::new();
    let a = pb.complex_block(r * cols);
    let b = extra.as_ref().map(|_| pb.real_block(1).at(0));

    // maximize Re Tr(U^H W) with W = sqrt(P) (Q A + b E)
    let unorm = u.norm().max(f64::MIN_POSITIVE);
    let qu = basis.adjoint() * &u;
    for j in 0..cols {
        for i in 0..r {
            let c = qu[(i, j)] / unorm;
            pb.minimize_term(a.re(j * r + i), -c.re);
            pb.minimize_term(a.im(j * r + i), -c.im);
        }
    }
    if let (Some(e), Some(b)) = (&extra, b) {
        let gain = u.zip_fold(e, 0.0, |acc, x, y| acc + (x.conj() * y).re) / unorm;
        pb.minimize_term(b, -gain);
    }

    // h~_k^T w_j with h~_k = sqrt(P) h_k / sigma_k
    let gain_expr = |k: usize, j: usize| -> ComplexAffine {
        let hs = &ctx.users[k] * Complex64::from(scale / ctx.sigma_sq[k].sqrt());
        let hq = basis.transpose() * &hs;
        let mut e = ComplexAffine::default();
        for i in 0..r {
            e.push_complex(a, j * r + i, hq[i]);
        }
        if let (Some(ex), Some(b)) = (&extra, b) {
            e.push_real(b, (hs.transpose() * ex.column(j))[0]);
        }
        e
    };
    for (k, &gamma) in ctx.gamma.iter().enumerate() {
        let gains = (0..cols).map(|j| gain_expr(k, j)).collect();
        let norm = ctx.users[k].norm() * scale / ctx.sigma_sq[k].sqrt();
        push_sinr_cone(&mut pb, gains, k, gamma, norm);
    }
    let mut power_body: Vec<RealAffine> = (0..a.len)
        .flat_map(|i| [RealAffine::var(a.re(i)), RealAffine::var(a.im(i))])
        .collect();
    if let Some(b) = b {
        power_body.push(RealAffine::var(b));
    }
    pb.soc(RealAffine::constant(1.0), power_body);

    let prog = pb.build()?;
    let sol = conic::solve(&prog, &ctx.settings)?.require_optimal("W-step")?;

    let mut amat = CMatrix::zeros(r, cols);
    for j in 0..cols {
        for i in 0..r {
            let idx = j * r + i;
            amat[(i, j)] = Complex64::new(sol.x[a.re(idx)], sol.x[a.im(idx)]);
        }
    }
    let mut w = &basis * amat;
    if let (Some(e), Some(b)) = (&extra, b) {
        w += e * Complex64::from(sol.x[b]);
    }
    w *= Complex64::from(scale);
    let p = w.norm_squared();
    if p > ctx.power {
        w *= Complex64::from((ctx.power / p).sqrt());
    }

    // Guard against solver round-off undoing the MM ascent.
    if ctx.objective(&w) < ctx.objective(w_i.matrix()) && ctx.is_feasible(w_i.matrix(), 1e-9) {
        return Ok(w_i);
    }
    BeamformerMatrix::new(w, ctx.w_i.users())
}

/// Orthonormal basis of the span of `vectors` (modified Gram-Schmidt with
/// reorthogonalization); near-dependent vectors are dropped.
pub fn orthonormal_basis(vectors: &[CVector], dim: usize) -> CMatrix {
    let mut q: Vec<CVector> = Vec::new();
    for v in vectors {
        let mut x = v.clone();
        for _ in 0..2 {
            for b in &q {
                let proj = b.dotc(&x);
                x -= b * proj;
            }
        }
        let n = x.norm();
        if n > 1e-10 * v.norm() && n > 0.0 {
            q.push(x.unscale(n));
        }
    }
    let mut out = CMatrix::zeros(dim, q.len());
    for (j, b) in q.iter().enumerate() {
        out.set_column(j, b);
    }
    out
}

/// Minimum-power communication precoder meeting every SINR target with the
/// `K` communication columns only (`M x K`). Returns `None` when the targets
/// are infeasible at any power.
pub fn min_power_comm(
    users: &[CVector],
    gamma: &[f64],
    sigma_sq: &[f64],
    settings: &SolverSettings,
) -> Result<Option<CMatrix>> {
    let k = users.len();
    if k == 0 {
        return Ok(Some(CMatrix::zeros(0, 0)));
    }
    let m = users[0].len();
    if gamma.len() != k || sigma_sq.len() != k || users.iter().any(|h| h.len() != m) {
        return Err(Error::shape("inconsistent user data"));
    }
    // W = s X with s the largest single-user matched-filter amplitude keeps X O(1).
    let s = (0..k)
        .map(|kk| (gamma[kk] * sigma_sq[kk]).sqrt() / users[kk].norm())
        .fold(0.0f64, f64::max);
    if !s.is_finite() {
        return Ok(None);
    }
    let mut pb = ProgramBuilder::new();
    let w = pb.complex_block(m * k);
    let t = pb.real_block(1).at(0);
    pb.minimize_term(t, 1.0);
    for kk in 0..k {
        let hs = &users[kk] * Complex64::from(s / sigma_sq[kk].sqrt());
        let gains = (0..k)
            .map(|j| {
                let mut e = ComplexAffine::default();
                for i in 0..m {
                    e.push_complex(w, j * m + i, hs[i]);
                }
                e
            })
            .collect();
        push_sinr_cone(&mut pb, gains, kk, gamma[kk], hs.norm());
    }
    let body: Vec<RealAffine> = (0..w.len)
        .flat_map(|i| [RealAffine::var(w.re(i)), RealAffine::var(w.im(i))])
        .collect();
    pb.soc(RealAffine::var(t), body);
    let sol = conic::solve(&pb.build()?, settings)?;
    match sol.status {
        conic::SolveStatus::Optimal => {}
        conic::SolveStatus::Infeasible => return Ok(None),
        // very large targets flatten the cones; a nearly converged point is
        // repaired below
        _ if sol.primal_residual.max(sol.dual_residual) < 1e-5 => {}
        _ => {
            sol.require_optimal("minimum-power initialization")?;
            unreachable!()
        }
    }
    let mut out = CMatrix::zeros(m, k);
    for j in 0..k {
        for i in 0..m {
            out[(i, j)] = Complex64::new(sol.x[w.re(j * m + i)], sol.x[w.im(j * m + i)]) * s;
        }
    }
    // Uniform scaling raises every SINR, so the smallest factor meeting all
    // targets restores exact feasibility.
    let mut factor = 1.0f64;
    for kk in 0..k {
        let g: Vec<f64> = (0..k).map(|j| (users[kk].transpose() * out.column(j))[0].norm_sqr()).collect();
        let interference: f64 = g.iter().enumerate().filter(|(j, _)| *j != kk).map(|(_, v)| v).sum();
        let margin = g[kk] - gamma[kk] * interference;
        if margin <= 0.0 {
            return Err(Error::StepFailed {
                step: "minimum-power initialization".into(),
                status: sol.status,
                pres: sol.primal_residual,
                dres: sol.dual_residual,
                gap: sol.gap,
            });
        }
        factor = factor.max(gamma[kk] * sigma_sq[kk] / margin * (1.0 + 1e-9));
    }
    if factor > 1.0 {
        out *= Complex64::from(factor.sqrt());
    }
    Ok(Some(out))
}

/// `sqrt(1 + 1/gamma) Re{g_k} >= ||[g_1, .., g_J, 1]||` with `Im{g_k} = 0`,
/// where `gains[j]` is the noise-normalized gain of column `j`. Every row is
/// divided by `norm` (a positive scale leaves the cone unchanged).
fn push_sinr_cone(pb: &mut ProgramBuilder, gains: Vec<ComplexAffine>, k: usize, gamma: f64, norm: f64) {
    let inv = if norm > 0.0 { 1.0 / norm } else { 1.0 };
    let scaled = |e: RealAffine, f: f64| RealAffine {
        terms: e.terms.into_iter().map(|(i, c)| (i, c * f)).collect(),
        constant: e.constant * f,
    };
    pb.equal_zero(scaled(gains[k].im(), inv));
    let head = scaled(gains[k].re(), inv * (1.0 + 1.0 / gamma).sqrt());
    let mut body: Vec<RealAffine> = gains
        .iter()
        .flat_map(|e| [scaled(e.re(), inv), scaled(e.im(), inv)])
        .collect();
    body.push(RealAffine::constant(inv));
    pb.soc(head, body);
}

#[cfg(test)]
mod tests;
