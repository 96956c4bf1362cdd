//! Quadratic models of the phase subproblem.
//!
//! With `B_t = G^T diag(h_{r,t})` the one-way target channel is
//! `g_t = h_{d,t} + B_t phi` and `vec(H_t) = g_t ⊗ g_t`. The radar term
//! `v_t^H C_{2,t} v_t` is convex in `v_t`, so linearizing it at `v_t^i`
//! gives a lower bound that is quadratic in `phi`:
//!
//! ```text
//! sum_t 2 Re{(v_t^i)^H C_{2,t} v_t} = Re{phi^H F_1 phi* + f_2^H phi} + c_2
//! ```
//!
//! The penalty `sum_{k,j} |a_{k,j} - h_k^T w_j|^2` is likewise written as
//! `phi^T Q phi* + Re{q^T phi} + c_3`. User gains are measured in units of
//! the user noise amplitude `sigma_k`.

use crate::error::{Error, Result};
use crate::model::vecops::{kron_identity_apply, unvec};
use crate::{CMatrix, CVector, Complex64};

/// `B_t = G^T diag(h_r)` (`M x N`).
pub fn build_bt(g: &CMatrix, h_r: &CVector) -> Result<CMatrix> {
    if g.nrows() != h_r.len() {
        return Err(Error::shape(format!(
            "G has {} rows, RIS channel has {} entries",
            g.nrows(),
            h_r.len()
        )));
    }
    let mut b = g.transpose();
    for (n, mut col) in b.column_iter_mut().enumerate() {
        col *= h_r[n];
    }
    Ok(b)
}

/// `v_t = (B ⊗ B) vec(phi phi^T) + vec(h_d h_d^T) + (h_d ⊗ B + B ⊗ h_d) phi`,
/// assembled literally from Kronecker products.
pub fn build_vt(b: &CMatrix, h_d: &CVector, phi: &CVector) -> Result<CVector> {
    if b.nrows() != h_d.len() || b.ncols() != phi.len() {
        return Err(Error::shape("B_t, h_d and phi sizes differ"));
    }
    let hd = CMatrix::from_column_slice(h_d.len(), 1, h_d.as_slice());
    let quad = b.kronecker(b) * phi.kronecker(phi);
    let direct = h_d.kronecker(h_d);
    let cross = (hd.kronecker(b) + b.kronecker(&hd)) * phi;
    Ok(quad + direct + cross)
}

/// `v_t` from the factored form `g ⊗ g`, `g = h_d + B phi`.
pub fn vt_factored(b: &CMatrix, h_d: &CVector, phi: &CVector) -> CVector {
    let g = h_d + b * phi;
    g.kronecker(&g)
}

/// `C_{2,t} x = (omega / sigma_r^2) (W* W^T ⊗ I) x = (omega / sigma_r^2) vec(X W W^H)`.
pub fn apply_c2t(x: &CVector, w: &CMatrix, omega: f64, sigma_r_sq: f64) -> Result<CVector> {
    let m = w.nrows();
    if x.len() != m * m {
        return Err(Error::shape(format!("expected length {}, got {}", m * m, x.len())));
    }
    let a = w.conjugate() * w.transpose();
    Ok(kron_identity_apply(&a, m, x)? * Complex64::from(omega / sigma_r_sq))
}

/// Coefficients of the MM lower bound on the radar term.
#[derive(Debug, Clone)]
pub struct MmCoeffs {
    pub f1: CMatrix,
    pub f2: CVector,
    pub c2: f64,
}

pub fn mm_phi_coeffs(
    v_i: &[CVector],
    b_t: &[CMatrix],
    h_d_t: &[CVector],
    w: &CMatrix,
    weights: &[f64],
    sigma_r_sq: f64,
) -> Result<MmCoeffs> {
    let t = v_i.len();
    if b_t.len() != t || h_d_t.len() != t || weights.len() != t {
        return Err(Error::shape("per-target inputs differ in length"));
    }
    let m = w.nrows();
    let n = b_t.first().map_or(0, |b| b.ncols());
    let mut f1 = CMatrix::zeros(n, n);
    let mut f2 = CVector::zeros(n);
    let mut c2 = 0.0;
    let two = Complex64::from(2.0);
    for i in 0..t {
        // y = C_2t v^i, Y = unvec(y); (v^i)^H C_2t v = g^T conj(Y) g
        let y = unvec(&apply_c2t(&v_i[i], w, weights[i], sigma_r_sq)?, m, m)?;
        let b = &b_t[i];
        let hd = &h_d_t[i];
        f1 += b.adjoint() * &y * b.conjugate() * two;
        f2 += b.adjoint() * (&y + y.transpose()) * hd.conjugate() * two;
        c2 += 2.0 * (hd.transpose() * y.conjugate() * hd)[0].re;
    }
    Ok(MmCoeffs { f1, f2, c2 })
}

/// `phi^H F_1 phi* + f_2^H phi` real part, plus `c_2`.
pub fn mm_value(c: &MmCoeffs, phi: &CVector) -> f64 {
    let quad = (phi.adjoint() * &c.f1 * phi.conjugate())[0].re;
    quad + c.f2.dotc(phi).re + c.c2
}

/// Penalty coefficients.
#[derive(Debug, Clone)]
pub struct PenaltyCoeffs {
    pub q_mat: CMatrix,
    pub q: CVector,
    pub c3: f64,
}

/// Expands `sum_{k,j} |a_{k,j} - h_k^T w_j / sigma_k|^2` in `phi`.
pub fn penalty_quadratic(
    w: &CMatrix,
    g: &CMatrix,
    h_d_k: &[CVector],
    h_r_k: &[CVector],
    sigma_k: &[f64],
    a: &CMatrix,
) -> Result<PenaltyCoeffs> {
    let k = h_d_k.len();
    if h_r_k.len() != k || sigma_k.len() != k || a.nrows() != k || a.ncols() != w.ncols() {
        return Err(Error::shape("penalty inputs differ in size"));
    }
    let n = g.nrows();
    let mut q_mat = CMatrix::zeros(n, n);
    let mut q = CVector::zeros(n);
    let mut c3 = 0.0;
    let gw = g * w; // column j is G w_j
    for kk in 0..k {
        let s = 1.0 / sigma_k[kk];
        let direct = h_d_k[kk].transpose() * w * Complex64::from(s);
        for j in 0..w.ncols() {
            // e = diag(h_r) G w_j / sigma, so h_k^T w_j / sigma = direct_j + phi^T e
            let e = h_r_k[kk].component_mul(&gw.column(j)) * Complex64::from(s);
            let d = a[(kk, j)] - direct[j];
            q_mat.ger(Complex64::from(1.0), &e, &e.conjugate(), Complex64::from(1.0));
            q -= &e * (d.conj() * 2.0);
            c3 += d.norm_sqr();
        }
    }
    Ok(PenaltyCoeffs { q_mat, q, c3 })
}

pub fn penalty_value(p: &PenaltyCoeffs, phi: &CVector) -> f64 {
    (phi.transpose() * &p.q_mat * phi.conjugate())[0].re + (p.q.transpose() * phi)[0].re + p.c3
}

/// Everything the phase solver needs at one expansion point. `scale`
/// divides the radar part so that it is of order one at the expansion point.
#[derive(Debug, Clone)]
pub struct PhiStepCoeffs {
    pub mm: MmCoeffs,
    pub penalty: PenaltyCoeffs,
    pub scale: f64,
}

impl PhiStepCoeffs {
    pub fn zeros(n: usize) -> Self {
        Self {
            mm: MmCoeffs {
                f1: CMatrix::zeros(n, n),
                f2: CVector::zeros(n),
                c2: 0.0,
            },
            penalty: PenaltyCoeffs {
                q_mat: CMatrix::zeros(n, n),
                q: CVector::zeros(n),
                c3: 0.0,
            },
            scale: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.mm.f2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `-Re{phi^H F_1 phi* + f_2^H phi} / scale + rho (phi^T Q phi* + Re{q^T phi} + c_3)`.
pub fn phi_objective(phi: &CVector, c: &PhiStepCoeffs, rho: f64) -> f64 {
    let radar = mm_value(&c.mm, phi) - c.mm.c2;
    -radar / c.scale + rho * penalty_value(&c.penalty, phi)
}

/// Euclidean gradient `2 d f / d phi*` of [`phi_objective`]:
/// `-(F_1 + F_1^T) phi* - f_2` (over `scale`) `+ rho (2 Q^T phi + q*)`.
pub fn phi_euclidean_gradient(phi: &CVector, c: &PhiStepCoeffs, rho: f64) -> CVector {
    let f1 = &c.mm.f1;
    let radar = (f1 * phi.conjugate() + f1.tr_mul(&phi.conjugate()) + &c.mm.f2)
        * Complex64::from(-1.0 / c.scale);
    let pen = (c.penalty.q_mat.tr_mul(phi) * Complex64::from(2.0) + c.penalty.q.conjugate())
        * Complex64::from(rho);
    radar + pen
}
