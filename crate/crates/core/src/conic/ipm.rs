//! Homogeneous self-dual interior-point method with Nesterov-Todd scaling and
//! Mehrotra predictor-corrector steps.

use nalgebra::DVector;

use super::cones::{ConeLayout, NtScaling};
use super::kkt::{self, Factor};
use super::{ConeProgram, ConeSolution, SolveStatus, SolverSettings};
use crate::error::Result;

const STEP_FRACTION: f64 = 0.99;

struct Iterate {
    x: DVector<f64>,
    y: DVector<f64>,
    z: DVector<f64>,
    s: DVector<f64>,
    tau: f64,
    kappa: f64,
}

struct Residuals {
    rx: DVector<f64>,
    ry: DVector<f64>,
    rz: DVector<f64>,
    rtau: f64,
}

struct Direction {
    x: DVector<f64>,
    y: DVector<f64>,
    z: DVector<f64>,
    s: DVector<f64>,
    tau: f64,
    kappa: f64,
}

pub fn solve(prog: &ConeProgram, settings: &SolverSettings) -> Result<ConeSolution> {
    prog.validate()?;
    Ok(Solver::new(prog).run(settings))
}

struct Solver<'a> {
    prog: &'a ConeProgram,
    layout: ConeLayout,
    ata: nalgebra::DMatrix<f64>,
    norm_b: f64,
    norm_c: f64,
    norm_h: f64,
}

impl<'a> Solver<'a> {
    fn new(prog: &'a ConeProgram) -> Self {
        Self {
            prog,
            layout: ConeLayout::new(&prog.cones),
            ata: prog.a.tr_mul(&prog.a),
            norm_b: prog.b.norm(),
            norm_c: prog.c.norm(),
            norm_h: prog.h.norm(),
        }
    }

    fn residuals(&self, it: &Iterate) -> Residuals {
        let p = self.prog;
        let rx = p.a.tr_mul(&it.y) + p.g.tr_mul(&it.z) + &p.c * it.tau;
        let ry = &p.a * &it.x - &p.b * it.tau;
        let rz = &p.g * &it.x + &it.s - &p.h * it.tau;
        let rtau = p.c.dot(&it.x) + p.b.dot(&it.y) + p.h.dot(&it.z) + it.kappa;
        Residuals { rx, ry, rz, rtau }
    }

    fn initial_point(&self) -> Option<Iterate> {
        let p = self.prog;
        let (n, neq, m) = (p.num_vars(), p.num_eq(), p.cone_dim());
        let e = self.layout.identity();
        let ident = NtScaling::new(&self.layout, &e, &e);
        let f = kkt::factor(p, &self.ata, &ident)?;
        let primal = f.solve(&DVector::zeros(n), &p.b, &p.h);
        let dual = f.solve(&(-&p.c), &DVector::zeros(neq), &DVector::zeros(m));
        let mut s = -primal.z;
        let mut z = dual.z;
        self.layout.shift_interior(s.as_mut_slice());
        self.layout.shift_interior(z.as_mut_slice());
        Some(Iterate {
            x: primal.x,
            y: dual.y,
            z,
            s,
            tau: 1.0,
            kappa: 1.0,
        })
    }

    fn run(&self, settings: &SolverSettings) -> ConeSolution {
        let tol = settings.tol;
        let nu = self.layout.degree as f64;
        let mut it = match self.initial_point() {
            Some(it) => it,
            None => return self.failed(),
        };
        let mut best: Option<(f64, ConeSolution)> = None;

        for iter in 0..=settings.max_iter {
            let r = self.residuals(&it);
            let p = self.prog;
            let tau = it.tau;
            let pres = (r.ry.norm() / tau / (1.0 + self.norm_b))
                .max(r.rz.norm() / tau / (1.0 + self.norm_h));
            let dres = r.rx.norm() / tau / (1.0 + self.norm_c);
            let gap = it.s.dot(&it.z) / (tau * tau);
            let pcost = p.c.dot(&it.x) / tau;
            let dcost = -(p.b.dot(&it.y) + p.h.dot(&it.z)) / tau;
            let relgap = if pcost < 0.0 {
                gap / -pcost
            } else if dcost > 0.0 {
                gap / dcost
            } else {
                f64::INFINITY
            };

            let scaled = |status| ConeSolution {
                x: &it.x / tau,
                s: &it.s / tau,
                y: &it.y / tau,
                z: &it.z / tau,
                status,
                primal_residual: pres,
                dual_residual: dres,
                gap,
                iterations: iter,
            };
            if !(pres.is_finite() && dres.is_finite() && gap.is_finite()) {
                break;
            }
            if pres < tol && dres < tol && (gap < tol || relgap < tol) {
                return scaled(SolveStatus::Optimal);
            }
            let merit = pres.max(dres).max(gap.min(relgap));
            if best.as_ref().is_none_or(|(m, _)| merit < *m) {
                best = Some((merit, scaled(SolveStatus::MaxIter)));
            }

            if it.kappa > it.tau {
                if let Some(sol) = self.certificate(&it, tol, iter) {
                    return sol;
                }
            }
            if iter == settings.max_iter {
                break;
            }

            let scaling = NtScaling::new(&self.layout, it.s.as_slice(), it.z.as_slice());
            let Some(f) = kkt::factor(p, &self.ata, &scaling) else {
                break;
            };
            let lambda = scaling.apply(it.z.as_slice());
            let mu = (it.s.dot(&it.z) + it.tau * it.kappa) / (nu + 1.0);
            let base = f.solve(&(-&p.c), &p.b, &p.h);

            // Predictor.
            let ll = self.layout.jordan_product(&lambda, &lambda);
            let rhs_s: Vec<f64> = ll.iter().map(|v| -v).collect();
            let rhs_k = -it.tau * it.kappa;
            let aff = self.direction(&f, &scaling, &it, &r, &base, &lambda, &rhs_s, rhs_k, 1.0);
            let alpha_aff = self.max_step(&it, &aff).min(1.0);
            let sigma = (1.0 - alpha_aff).powi(3);

            // Corrector.
            let ws = scaling.apply_inv(aff.s.as_slice());
            let wz = scaling.apply(aff.z.as_slice());
            let corr = self.layout.jordan_product(&ws, &wz);
            let e = self.layout.identity();
            let rhs_s: Vec<f64> = (0..ll.len())
                .map(|i| -ll[i] + sigma * mu * e[i] - corr[i])
                .collect();
            let rhs_k = -it.tau * it.kappa + sigma * mu - aff.tau * aff.kappa;
            let dir = self.direction(&f, &scaling, &it, &r, &base, &lambda, &rhs_s, rhs_k, 1.0 - sigma);
            let alpha = (STEP_FRACTION * self.max_step(&it, &dir)).min(1.0);
            if !(alpha.is_finite() && alpha > 0.0) {
                break;
            }

            it.x.axpy(alpha, &dir.x, 1.0);
            it.y.axpy(alpha, &dir.y, 1.0);
            it.z.axpy(alpha, &dir.z, 1.0);
            it.s.axpy(alpha, &dir.s, 1.0);
            it.tau += alpha * dir.tau;
            it.kappa += alpha * dir.kappa;
            if !(it.tau > 0.0 && it.kappa > 0.0) {
                break;
            }
        }
        best.map(|(_, s)| s).unwrap_or_else(|| self.failed())
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        f: &Factor<'_>,
        scaling: &NtScaling,
        it: &Iterate,
        r: &Residuals,
        base: &kkt::KktSolution,
        lambda: &[f64],
        rhs_s: &[f64],
        rhs_k: f64,
        d: f64,
    ) -> Direction {
        let p = self.prog;
        let xi = self.layout.jordan_div(lambda, rhs_s);
        let wxi = DVector::from_vec(scaling.apply(&xi));
        let bz = -(&r.rz * d) - &wxi;
        let one = f.solve(&(-(&r.rx * d)), &(-(&r.ry * d)), &bz);
        let num = -d * r.rtau - rhs_k / it.tau
            - (p.c.dot(&one.x) + p.b.dot(&one.y) + p.h.dot(&one.z));
        let den = p.c.dot(&base.x) + p.b.dot(&base.y) + p.h.dot(&base.z) - it.kappa / it.tau;
        let dtau = num / den;
        let dx = one.x + &base.x * dtau;
        let dy = one.y + &base.y * dtau;
        let dz = one.z + &base.z * dtau;
        let wdz = scaling.apply(dz.as_slice());
        let inner: Vec<f64> = xi.iter().zip(&wdz).map(|(a, b)| a - b).collect();
        let ds = DVector::from_vec(scaling.apply(&inner));
        let dkappa = (rhs_k - it.kappa * dtau) / it.tau;
        Direction {
            x: dx,
            y: dy,
            z: dz,
            s: ds,
            tau: dtau,
            kappa: dkappa,
        }
    }

    fn max_step(&self, it: &Iterate, d: &Direction) -> f64 {
        let mut a = self
            .layout
            .max_step(it.s.as_slice(), d.s.as_slice())
            .min(self.layout.max_step(it.z.as_slice(), d.z.as_slice()));
        if d.tau < 0.0 {
            a = a.min(-it.tau / d.tau);
        }
        if d.kappa < 0.0 {
            a = a.min(-it.kappa / d.kappa);
        }
        a
    }

    /// Checks for an approximate Farkas certificate of primal or dual
    /// infeasibility.
    fn certificate(&self, it: &Iterate, tol: f64, iter: usize) -> Option<ConeSolution> {
        let p = self.prog;
        let hz_by = p.h.dot(&it.z) + p.b.dot(&it.y);
        if hz_by < 0.0 {
            let res = (p.a.tr_mul(&it.y) + p.g.tr_mul(&it.z)).norm() / -hz_by;
            if res < tol * (1.0 + self.norm_c) {
                return Some(ConeSolution {
                    x: DVector::zeros(p.num_vars()),
                    s: DVector::zeros(p.cone_dim()),
                    y: &it.y / -hz_by,
                    z: &it.z / -hz_by,
                    status: SolveStatus::Infeasible,
                    primal_residual: f64::NAN,
                    dual_residual: res,
                    gap: f64::NAN,
                    iterations: iter,
                });
            }
        }
        let cx = p.c.dot(&it.x);
        if cx < 0.0 {
            let res = (&p.a * &it.x)
                .norm()
                .max((&p.g * &it.x + &it.s).norm())
                / -cx;
            if res < tol * (1.0 + self.norm_b.max(self.norm_h)) {
                return Some(ConeSolution {
                    x: &it.x / -cx,
                    s: &it.s / -cx,
                    y: DVector::zeros(p.num_eq()),
                    z: DVector::zeros(p.cone_dim()),
                    status: SolveStatus::Unbounded,
                    primal_residual: res,
                    dual_residual: f64::NAN,
                    gap: f64::NAN,
                    iterations: iter,
                });
            }
        }
        None
    }

    fn failed(&self) -> ConeSolution {
        let p = self.prog;
        ConeSolution {
            x: DVector::zeros(p.num_vars()),
            s: DVector::zeros(p.cone_dim()),
            y: DVector::zeros(p.num_eq()),
            z: DVector::zeros(p.cone_dim()),
            status: SolveStatus::MaxIter,
            primal_residual: f64::INFINITY,
            dual_residual: f64::INFINITY,
            gap: f64::INFINITY,
            iterations: 0,
        }
    }
}
