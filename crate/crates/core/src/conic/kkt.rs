//! Dense reduced KKT solves.
//!
//! The scaled system
//!
//! ```text
//! [ 0  A^T  G^T  ] [dx]   [bx]
//! [ A  0    0    ] [dy] = [by]
//! [ G  0   -W^2  ] [dz]   [bz]
//! ```
//!
//! is reduced to `(G^T W^{-2} G + A^T A) dx + A^T dy = r` plus a Schur
//! complement on the equality multipliers. Iterative refinement on the full
//! system absorbs the small static regularization.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::cones::{NtScaling, ScalingView};
use super::ConeProgram;

const MAX_REFINE: usize = 6;

pub(crate) struct Factor<'a> {
    prog: &'a ConeProgram,
    scaling: &'a NtScaling,
    chol: Cholesky<f64, Dyn>,
    schur: Option<Cholesky<f64, Dyn>>,
}

pub(crate) struct KktSolution {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub z: DVector<f64>,
}

/// Builds and factors the reduced system for the current scaling.
pub(crate) fn factor<'a>(
    prog: &'a ConeProgram,
    ata: &DMatrix<f64>,
    scaling: &'a NtScaling,
) -> Option<Factor<'a>> {
    let n = prog.num_vars();
    let mut h = ata.clone();
    for (view, o) in scaling.blocks() {
        match view {
            ScalingView::NonNeg(d) => {
                let gb = prog.g.rows(o, d.len());
                let mut scaled = gb.clone_owned();
                for (i, di) in d.iter().enumerate() {
                    scaled.row_mut(i).scale_mut(1.0 / di);
                }
                h.gemm_tr(1.0, &scaled, &scaled, 1.0);
            }
            ScalingView::Soc { beta, v } => {
                // W^{-1} G_b = (1/beta) (2 (Jv) (Jv)^T G_b - J G_b)
                let gb = prog.g.rows(o, v.len());
                let mut jv = DVector::from_column_slice(v);
                jv.rows_mut(1, v.len() - 1).neg_mut();
                let proj = gb.tr_mul(&jv);
                let mut wg = gb.clone_owned();
                wg.rows_mut(1, v.len() - 1).neg_mut();
                wg.scale_mut(-1.0);
                wg.ger(2.0, &jv, &proj, 1.0);
                wg.scale_mut(1.0 / beta);
                h.gemm_tr(1.0, &wg, &wg, 1.0);
            }
        }
    }
    let max_diag = (0..n).map(|i| h[(i, i)].abs()).fold(1.0f64, f64::max);
    if !max_diag.is_finite() || h.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut delta = 1e-13 * max_diag;
    let chol = loop {
        let mut reg = h.clone();
        for i in 0..n {
            reg[(i, i)] += delta;
        }
        if let Some(c) = Cholesky::new(reg) {
            break c;
        }
        delta *= 100.0;
        if delta > 1e-2 * max_diag {
            return None;
        }
    };
    let schur = if prog.num_eq() > 0 {
        let x = chol.solve(&prog.a.transpose());
        let s = &prog.a * x;
        let p = s.nrows();
        let max_s = (0..p).map(|i| s[(i, i)].abs()).fold(1.0f64, f64::max);
        if !max_s.is_finite() || s.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let mut d = 1e-13 * max_s;
        loop {
            let mut reg = s.clone();
            for i in 0..p {
                reg[(i, i)] += d;
            }
            if let Some(c) = Cholesky::new(reg) {
                break Some(c);
            }
            d *= 100.0;
            if d > 1e-2 * max_s {
                return None;
            }
        }
    } else {
        None
    };
    Some(Factor {
        prog,
        scaling,
        chol,
        schur,
    })
}

impl Factor<'_> {
    fn solve_once(&self, bx: &DVector<f64>, by: &DVector<f64>, bz: &DVector<f64>) -> KktSolution {
        let p = self.prog;
        let wbz = DVector::from_vec(self.scaling.apply_inv_sq(bz.as_slice()));
        let mut r1 = bx + p.g.tr_mul(&wbz);
        if p.num_eq() > 0 {
            r1 += p.a.tr_mul(by);
        }
        let (x, y) = match &self.schur {
            Some(schur) => {
                let t = &p.a * self.chol.solve(&r1) - by;
                let y = schur.solve(&t);
                let x = self.chol.solve(&(r1 - p.a.tr_mul(&y)));
                (x, y)
            }
            None => (self.chol.solve(&r1), DVector::zeros(0)),
        };
        let gx = &p.g * &x - bz;
        let z = DVector::from_vec(self.scaling.apply_inv_sq(gx.as_slice()));
        KktSolution { x, y, z }
    }

    fn residual(
        &self,
        sol: &KktSolution,
        bx: &DVector<f64>,
        by: &DVector<f64>,
        bz: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let p = self.prog;
        let mut ex = bx - p.g.tr_mul(&sol.z);
        if p.num_eq() > 0 {
            ex -= p.a.tr_mul(&sol.y);
        }
        let ey = by - &p.a * &sol.x;
        let w2z = DVector::from_vec(self.scaling.apply_sq(sol.z.as_slice()));
        let ez = bz - (&p.g * &sol.x - w2z);
        (ex, ey, ez)
    }

    /// Solves the full system with iterative refinement.
    pub fn solve(&self, bx: &DVector<f64>, by: &DVector<f64>, bz: &DVector<f64>) -> KktSolution {
        let mut sol = self.solve_once(bx, by, bz);
        let scale = 1.0 + bx.norm() + by.norm() + bz.norm();
        let (mut ex, mut ey, mut ez) = self.residual(&sol, bx, by, bz);
        let mut err = ex.norm() + ey.norm() + ez.norm();
        for _ in 0..MAX_REFINE {
            if err <= 1e-15 * scale {
                break;
            }
            let corr = self.solve_once(&ex, &ey, &ez);
            let cand = KktSolution {
                x: &sol.x + corr.x,
                y: &sol.y + corr.y,
                z: &sol.z + corr.z,
            };
            let (cx, cy, cz) = self.residual(&cand, bx, by, bz);
            let cerr = cx.norm() + cy.norm() + cz.norm();
            if cerr >= err {
                break;
            }
            sol = cand;
            (ex, ey, ez, err) = (cx, cy, cz, cerr);
        }
        sol
    }
}
