//! Embedded primal-dual interior-point solver for real second-order cone
//! programs in the standard form
//!
//! ```text
//! minimize    c^T x
//! subject to  A x = b
//!             G x + s = h,   s in K
//! ```
//!
//! where `K` is a product of nonnegative orthants and second-order cones.
//! Problems are small and dense, so the KKT system is factored densely.

mod cones;
pub mod dump;
mod ipm;
mod kkt;
pub mod lift;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cones::Cone;
pub use ipm::solve;
pub use lift::{ComplexAffine, ComplexBlock, ProgramBuilder, RealAffine, RealBlock};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ConeProgram {
    pub c: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub g: DMatrix<f64>,
    pub h: DVector<f64>,
    pub cones: Vec<Cone>,
}

impl ConeProgram {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_eq(&self) -> usize {
        self.b.len()
    }

    pub fn cone_dim(&self) -> usize {
        self.cones.iter().map(Cone::dim).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.c.len();
        if n == 0 {
            return Err(Error::shape("cone program has no variables"));
        }
        if self.a.ncols() != n || self.a.nrows() != self.b.len() {
            return Err(Error::shape(format!(
                "A is {}x{}, expected {}x{n}",
                self.a.nrows(),
                self.a.ncols(),
                self.b.len()
            )));
        }
        if self.g.ncols() != n || self.g.nrows() != self.h.len() {
            return Err(Error::shape(format!(
                "G is {}x{}, expected {}x{n}",
                self.g.nrows(),
                self.g.ncols(),
                self.h.len()
            )));
        }
        if self.cone_dim() != self.h.len() {
            return Err(Error::shape(format!(
                "cone dims sum to {}, h has {} rows",
                self.cone_dim(),
                self.h.len()
            )));
        }
        if self.cones.is_empty() {
            return Err(Error::shape("cone program has no cone constraints"));
        }
        if self.cones.iter().any(|c| c.dim() == 0) {
            return Err(Error::shape("empty cone block"));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !(finite(self.c.as_slice())
            && finite(self.a.as_slice())
            && finite(self.b.as_slice())
            && finite(self.g.as_slice())
            && finite(self.h.as_slice()))
        {
            return Err(Error::invalid("cone program data is not finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    /// The primal is infeasible; `y`, `z` hold a Farkas certificate.
    Infeasible,
    /// The dual is infeasible; `x`, `s` hold an improving ray.
    Unbounded,
    /// Iteration limit or numerical failure; fields hold the best iterate.
    MaxIter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConeSolution {
    pub x: DVector<f64>,
    pub s: DVector<f64>,
    /// Multipliers of the equality block.
    pub y: DVector<f64>,
    /// Multipliers of the cone block.
    pub z: DVector<f64>,
    pub status: SolveStatus,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
}

impl ConeSolution {
    pub fn objective(&self, prog: &ConeProgram) -> f64 {
        prog.c.dot(&self.x)
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Converts a non-optimal status into a step failure error.
    pub fn require_optimal(self, step: &str) -> Result<Self> {
        if self.is_optimal() {
            return Ok(self);
        }
        Err(Error::StepFailed {
            step: step.to_string(),
            status: self.status,
            pres: self.primal_residual,
            dres: self.dual_residual,
            gap: self.gap,
        })
    }
}
