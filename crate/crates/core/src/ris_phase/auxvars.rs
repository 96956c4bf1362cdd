//! Auxiliary-variable update: projection of the current user gains onto the
//! SINR-feasible set.
//!
//! For user `k` with noise-normalized gains `b_j = h_k^T w_j / sigma_k`,
//!
//! ```text
//! minimize  sum_j |a_j - b_j|^2
//! s.t.      |a_k|^2 >= Gamma (sum_{j != k} |a_j|^2 + 1)
//! ```
//!
//! The constraint only involves moduli, so the optimal `a_j` shares the phase
//! of `b_j`, leaving a real second-order cone program in the moduli.

use crate::conic::{self, ProgramBuilder, RealAffine, SolverSettings};
use crate::error::{Error, Result};
use crate::{CMatrix, CVector, Complex64};

/// Auxiliary gains `a_{k,j}` in units of `sigma_k` (`K x (K + M)`).
#[derive(Debug, Clone, PartialEq)]
pub struct AuxVars {
    pub a: CMatrix,
}

impl AuxVars {
    /// Noise-normalized gains `h_k^T w_j / sigma_k`.
    pub fn gains(users: &[CVector], w: &CMatrix, sigma_k: &[f64]) -> CMatrix {
        let mut out = CMatrix::zeros(users.len(), w.ncols());
        for (k, h) in users.iter().enumerate() {
            let row = h.transpose() * w * Complex64::from(1.0 / sigma_k[k]);
            out.set_row(k, &row);
        }
        out
    }

    /// `max_{k,j} |a_{k,j} - h_k^T w_j / sigma_k|`.
    pub fn zeta(&self, gains: &CMatrix) -> f64 {
        self.a
            .zip_map(gains, |a, b| (a - b).norm())
            .iter()
            .fold(0.0, |m, v| m.max(*v))
    }

    /// Largest relative shortfall of the SINR constraint.
    pub fn max_violation(&self, gamma: &[f64]) -> f64 {
        (0..self.a.nrows())
            .map(|k| {
                let own = self.a[(k, k)].norm_sqr();
                let rest: f64 = (0..self.a.ncols())
                    .filter(|&j| j != k)
                    .map(|j| self.a[(k, j)].norm_sqr())
                    .sum();
                let need = gamma[k] * (rest + 1.0);
                ((need - own) / need).max(0.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Projects one user's gain row; `k` is the user's own column.
pub fn project_user(b: &[Complex64], k: usize, gamma: f64, settings: &SolverSettings) -> Result<Vec<Complex64>> {
    let j_total = b.len();
    if k >= j_total {
        return Err(Error::IndexOutOfRange { index: k, len: j_total });
    }
    let moduli: Vec<f64> = b.iter().map(|z| z.norm()).collect();
    let rest: f64 = moduli.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, m)| m * m).sum();
    if moduli[k] * moduli[k] >= gamma * (rest + 1.0) {
        return Ok(b.to_vec());
    }
    let need = gamma * (rest + 1.0);
    if need - moduli[k] * moduli[k] <= NEGLIGIBLE * need {
        return Ok(phase_align(b, &multiplier_projection(&moduli, k, gamma)));
    }
    let mut pb = ProgramBuilder::new();
    let r = pb.real_block(j_total);
    let t = pb.real_block(1).at(0);
    pb.minimize_term(t, 1.0);
    // ||r - |b||| <= t
    let diff = (0..j_total)
        .map(|j| RealAffine::var(r.at(j)).with_constant(-moduli[j]))
        .collect();
    pb.soc(RealAffine::var(t), diff);
    // r_k >= sqrt(Gamma) ||[r_{-k}, 1]||, scaled by 1 / sqrt(Gamma)
    let mut body: Vec<RealAffine> = (0..j_total).filter(|&j| j != k).map(|j| RealAffine::var(r.at(j))).collect();
    body.push(RealAffine::constant(1.0));
    pb.soc(RealAffine::var(r.at(k)).scaled(1.0 / gamma.sqrt()), body);
    let sol = conic::solve(&pb.build()?, settings)?;
    let radii = if sol.is_optimal() {
        let mut radii: Vec<f64> = (0..j_total).map(|j| sol.x[r.at(j)].max(0.0)).collect();
        lift_own(&mut radii, k, gamma);
        radii
    } else {
        // The optimum sits at the apex of the distance cone when the row is
        // almost feasible; the stationarity condition is solved directly.
        multiplier_projection(&moduli, k, gamma)
    };
    Ok(phase_align(b, &radii))
}

/// Relative SINR shortfall below which the row is moved onto the boundary
/// without calling the cone solver.
const NEGLIGIBLE: f64 = 1e-9;

fn phase_align(b: &[Complex64], radii: &[f64]) -> Vec<Complex64> {
    b.iter()
        .zip(radii)
        .map(|(z, r)| {
            let m = z.norm();
            let phase = if m > 0.0 { z / m } else { Complex64::ONE };
            phase * r
        })
        .collect()
}

/// Raises `r_k` to the constraint boundary if round-off left it short.
fn lift_own(r: &mut [f64], k: usize, gamma: f64) {
    let rest: f64 = r.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, x)| x * x).sum();
    r[k] = r[k].max((gamma * (rest + 1.0)).sqrt());
}

/// Projection of the moduli `m` through the stationarity conditions
/// `r_k = m_k / (1 - lambda)`, `r_j = m_j / (1 + lambda Gamma)`, with the
/// multiplier `lambda` in `[0, 1)` found by bisection on the active
/// constraint.
pub fn multiplier_projection(m: &[f64], k: usize, gamma: f64) -> Vec<f64> {
    let rest: f64 = m.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, x)| x * x).sum();
    let radii = |lam: f64| -> Vec<f64> {
        m.iter()
            .enumerate()
            .map(|(j, x)| if j == k { x / (1.0 - lam) } else { x / (1.0 + lam * gamma) })
            .collect()
    };
    let mut r = if m[k] > 0.0 {
        let excess = |lam: f64| {
            let own = m[k] / (1.0 - lam);
            own * own - gamma * (rest / (1.0 + lam * gamma).powi(2) + 1.0)
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        if excess(lo) >= 0.0 {
            hi = 0.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        radii(hi)
    } else {
        // lambda = 1: own modulus is free, the others shrink by 1 + Gamma
        radii(1.0).into_iter().enumerate().map(|(j, x)| if j == k { 0.0 } else { x }).collect()
    };
    lift_own(&mut r, k, gamma);
    r
}

/// Per-user projection of the gains onto the SINR-feasible set.
pub fn solve_a_step(
    users: &[CVector],
    w: &CMatrix,
    gamma: &[f64],
    sigma_k: &[f64],
    settings: &SolverSettings,
) -> Result<AuxVars> {
    if gamma.len() != users.len() || sigma_k.len() != users.len() {
        return Err(Error::shape("one SINR target and noise level per user required"));
    }
    let gains = AuxVars::gains(users, w, sigma_k);
    let mut a = gains.clone();
    for k in 0..users.len() {
        let row: Vec<Complex64> = gains.row(k).iter().copied().collect();
        let proj = project_user(&row, k, gamma[k], settings)?;
        for (j, v) in proj.into_iter().enumerate() {
            a[(k, j)] = v;
        }
    }
    Ok(AuxVars { a })
}
