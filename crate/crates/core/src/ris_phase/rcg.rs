//! Riemannian conjugate gradient on the complex circle manifold
//! `{phi : |phi_n| = 1}`.
//!
//! Tangent vectors at `phi` satisfy `Re{z_n conj(phi_n)} = 0`; the metric is
//! `<x, y> = Re{x^H y}`. Retraction is entrywise normalization and vector
//! transport is projection onto the new tangent space.

use crate::model::PhaseVector;
use crate::CVector;

use super::coeffs::{phi_euclidean_gradient, phi_objective, PhiStepCoeffs};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcgOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
    pub armijo_shrink: f64,
    pub armijo_slope: f64,
    pub max_backtracks: usize,
}

impl Default for RcgOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            grad_tol: 1e-6,
            armijo_shrink: 0.5,
            armijo_slope: 1e-4,
            max_backtracks: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RcgResult {
    pub phi: PhaseVector,
    pub objective: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    /// The line search could not find a decrease; `phi` is the best iterate.
    pub line_search_failed: bool,
    /// Objective after every accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

pub fn project_tangent(phi: &CVector, z: &CVector) -> CVector {
    CVector::from_fn(phi.len(), |n, _| {
        let p = phi[n];
        z[n] - p * (z[n] * p.conj()).re
    })
}

fn inner(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).re
}

fn riemannian_gradient(phi: &CVector, c: &PhiStepCoeffs, rho: f64) -> CVector {
    project_tangent(phi, &phi_euclidean_gradient(phi, c, rho))
}

/// Minimizes [`phi_objective`] from `init`.
pub fn rcg_optimize(init: &PhaseVector, c: &PhiStepCoeffs, rho: f64, opts: &RcgOptions) -> RcgResult {
    let mut phi = init.as_vector().clone();
    let mut f = phi_objective(&phi, c, rho);
    let mut g = riemannian_gradient(&phi, c, rho);
    let mut d = -&g;
    let mut history = vec![f];
    let mut prev: Option<(CVector, CVector)> = None; // (step, gradient) for BB
    let mut failed = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let gnorm = g.norm();
        if gnorm < opts.grad_tol {
            break;
        }
        let mut slope = inner(&g, &d);
        if slope >= 0.0 {
            d = -&g;
            slope = -gnorm * gnorm;
        }
        let dmax = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut alpha = match &prev {
            Some((s, y)) => {
                let sy = inner(s, y).abs();
                if sy > 0.0 {
                    inner(s, s) / sy
                } else {
                    0.5 / dmax
                }
            }
            None => 0.5 / dmax,
        };
        // Cap the first trial so no phase moves by more than ~1 rad.
        alpha = alpha.min(1.0 / dmax);

        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let cand = PhaseVector::retract(&(&phi + &d * crate::Complex64::from(alpha)));
            let fc = phi_objective(cand.as_vector(), c, rho);
            if fc <= f + opts.armijo_slope * alpha * slope {
                accepted = Some((cand, fc));
                break;
            }
            alpha *= opts.armijo_shrink;
        }
        let Some((cand, fc)) = accepted else {
            failed = true;
            break;
        };
        iterations += 1;
        let new_phi = cand.as_vector().clone();
        let new_g = riemannian_gradient(&new_phi, c, rho);
        let g_old_t = project_tangent(&new_phi, &g);
        let d_old_t = project_tangent(&new_phi, &d);
        let beta = (inner(&new_g, &(&new_g - &g_old_t)) / (gnorm * gnorm)).max(0.0);
        prev = Some((
            project_tangent(&new_phi, &(&new_phi - &phi)),
            &new_g - &g_old_t,
        ));
        d = -&new_g + d_old_t * crate::Complex64::from(beta);
        let stalled = (f - fc).abs() <= 1e-15 * f.abs().max(1.0);
        phi = new_phi;
        f = fc;
        g = new_g;
        history.push(f);
        if stalled {
            break;
        }
    }

    RcgResult {
        phi: PhaseVector::retract(&phi),
        objective: f,
        iterations,
        grad_norm: g.norm(),
        line_search_failed: failed,
        history,
    }
}
