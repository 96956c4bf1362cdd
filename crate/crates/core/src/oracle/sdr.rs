//! Upper bound on the precoder subproblem from its semidefinite relaxation.
//!
//! Relaxing `w_j w_j^H` to PSD matrices `R_j` gives a convex problem whose
//! Lagrangian dual function is
//!
//! ```text
//! d(mu) = P max(0, max_j lambda_max(A_j(mu))) - sum_k mu_k sigma_k^2
//! A_j(mu) = C_1 - sum_k mu_k H_k + [j <= K] (1 + 1/Gamma_j) mu_j H_j
//! ```
//!
//! with `H_k = conj(h_k) h_k^T`. Every `mu >= 0` gives a valid bound by weak
//! duality; the bound is tightened by a nested ternary search over `mu`.

use crate::beamform_w::WStepContext;
use crate::error::{Error, Result};
use crate::{CMatrix, Complex64};

const ITERS: usize = 80;

pub fn sdr_w_oracle(ctx: &WStepContext) -> Result<f64> {
    let m = ctx.c1.nrows();
    let k = ctx.users.len();
    if m > 4 || k > 2 {
        return Err(Error::OracleRefused(format!(
            "SDR oracle limited to M <= 4, K <= 2 (got M={m}, K={k})"
        )));
    }
    let hk: Vec<CMatrix> = ctx
        .users
        .iter()
        .map(|h| h.conjugate() * h.transpose())
        .collect();
    let dual = |mu: &[f64]| -> f64 {
        let mut base = ctx.c1.clone();
        for (i, h) in hk.iter().enumerate() {
            base -= h * Complex64::from(mu[i]);
        }
        let mut lam = lambda_max(&base);
        for j in 0..k {
            let a = &base + &hk[j] * Complex64::from((1.0 + 1.0 / ctx.gamma[j]) * mu[j]);
            lam = lam.max(lambda_max(&a));
        }
        ctx.power * lam.max(0.0)
            - mu.iter().zip(&ctx.sigma_sq).map(|(u, s)| u * s).sum::<f64>()
    };
    let scale = (1.0 + lambda_max(&ctx.c1)) / hk.iter().map(|h| h.norm()).fold(f64::MIN_POSITIVE, f64::max);
    let best = match k {
        0 => dual(&[]),
        1 => minimize_1d(|u| dual(&[u]), scale),
        _ => minimize_1d(|u| minimize_1d(|v| dual(&[u, v]), scale), scale),
    };
    Ok(best)
}

fn lambda_max(a: &CMatrix) -> f64 {
    let herm = (a + a.adjoint()) * Complex64::from(0.5);
    herm.symmetric_eigen().eigenvalues.max()
}

/// Minimum of a convex function on `[0, inf)`: bracket by doubling, then
/// ternary search. Returns the smallest value seen (each is a valid bound).
fn minimize_1d<F: Fn(f64) -> f64>(f: F, scale: f64) -> f64 {
    let mut best = f(0.0);
    let mut hi = scale.max(1e-12);
    let mut prev = best;
    for _ in 0..200 {
        let v = f(hi);
        best = best.min(v);
        if v > prev {
            break;
        }
        prev = v;
        hi *= 2.0;
    }
    let (mut lo, mut up) = (0.0, hi);
    for _ in 0..ITERS {
        let a = lo + (up - lo) / 3.0;
        let b = up - (up - lo) / 3.0;
        let (fa, fb) = (f(a), f(b));
        best = best.min(fa).min(fb);
        if fa <= fb {
            up = b;
        } else {
            lo = a;
        }
    }
    best
}
