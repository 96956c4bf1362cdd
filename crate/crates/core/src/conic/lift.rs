//! Assembling cone programs from (possibly complex) affine expressions.
//!
//! A complex variable block of length `n` occupies `2n` consecutive real
//! variables laid out as `[Re z; Im z]`. A complex expression inside a
//! second-order cone body contributes its real part followed by its
//! imaginary part, so `|z| <= t` becomes the 3-dimensional cone
//! `(t, Re z, Im z)`. Nonnegative rows are collected into a single orthant
//! placed before all second-order cones, which keep their insertion order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Cone, ConeProgram};
use crate::error::{Error, Result};

/// Contiguous block of real variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealBlock {
    pub start: usize,
    pub len: usize,
}

impl RealBlock {
    pub fn at(&self, i: usize) -> usize {
        assert!(i < self.len, "index {i} outside block of {}", self.len);
        self.start + i
    }
}

/// Complex variable block stored as `[Re; Im]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexBlock {
    pub start: usize,
    pub len: usize,
}

impl ComplexBlock {
    pub fn re(&self, i: usize) -> usize {
        assert!(i < self.len, "index {i} outside block of {}", self.len);
        self.start + i
    }

    pub fn im(&self, i: usize) -> usize {
        assert!(i < self.len, "index {i} outside block of {}", self.len);
        self.start + self.len + i
    }
}

/// `sum_i coef_i x_i + constant` over real variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RealAffine {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl RealAffine {
    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn var(idx: usize) -> Self {
        Self {
            terms: vec![(idx, 1.0)],
            constant: 0.0,
        }
    }

    pub fn term(mut self, idx: usize, coef: f64) -> Self {
        self.terms.push((idx, coef));
        self
    }

    pub fn push(&mut self, idx: usize, coef: f64) {
        self.terms.push((idx, coef));
    }
}

/// Complex-valued affine expression of the real variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComplexAffine {
    pub terms: Vec<(usize, Complex64)>,
    pub constant: Complex64,
}

impl ComplexAffine {
    pub fn constant(c: Complex64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    /// Adds `coef * z_i` for complex variable `z_i` of `block`.
    pub fn push_complex(&mut self, block: ComplexBlock, i: usize, coef: Complex64) {
        self.terms.push((block.re(i), coef));
        self.terms.push((block.im(i), coef * Complex64::i()));
    }

    /// Adds `coef * x` for a real variable `x`.
    pub fn push_real(&mut self, idx: usize, coef: Complex64) {
        self.terms.push((idx, coef));
    }

    pub fn re(&self) -> RealAffine {
        RealAffine {
            terms: self.terms.iter().map(|&(i, c)| (i, c.re)).collect(),
            constant: self.constant.re,
        }
    }

    pub fn im(&self) -> RealAffine {
        RealAffine {
            terms: self.terms.iter().map(|&(i, c)| (i, c.im)).collect(),
            constant: self.constant.im,
        }
    }
}

#[derive(Debug, Default, Clone)]
pub struct ProgramBuilder {
    num_vars: usize,
    objective: Vec<(usize, f64)>,
    eq: Vec<RealAffine>,
    nonneg: Vec<RealAffine>,
    socs: Vec<Vec<RealAffine>>,
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn real_block(&mut self, len: usize) -> RealBlock {
        let b = RealBlock {
            start: self.num_vars,
            len,
        };
        self.num_vars += len;
        b
    }

    pub fn complex_block(&mut self, len: usize) -> ComplexBlock {
        let b = ComplexBlock {
            start: self.num_vars,
            len,
        };
        self.num_vars += 2 * len;
        b
    }

    /// Adds `coef * x_idx` to the minimized objective.
    pub fn minimize_term(&mut self, idx: usize, coef: f64) {
        self.objective.push((idx, coef));
    }

    /// `expr = 0`.
    pub fn equal_zero(&mut self, expr: RealAffine) {
        self.eq.push(expr);
    }

    /// Real and imaginary parts of `expr` both zero.
    pub fn complex_equal_zero(&mut self, expr: &ComplexAffine) {
        self.eq.push(expr.re());
        self.eq.push(expr.im());
    }

    /// `expr >= 0`.
    pub fn nonneg(&mut self, expr: RealAffine) {
        self.nonneg.push(expr);
    }

    /// `||body|| <= head`.
    pub fn soc(&mut self, head: RealAffine, body: Vec<RealAffine>) {
        let mut rows = Vec::with_capacity(body.len() + 1);
        rows.push(head);
        rows.extend(body);
        self.socs.push(rows);
    }

    /// `||body|| <= head` with complex body entries lifted as `(Re, Im)`.
    pub fn complex_soc(&mut self, head: RealAffine, body: &[ComplexAffine]) {
        let lifted = body.iter().flat_map(|e| [e.re(), e.im()]).collect();
        self.soc(head, lifted);
    }

    pub fn build(&self) -> Result<ConeProgram> {
        let n = self.num_vars;
        let check = |e: &RealAffine| -> Result<()> {
            match e.terms.iter().find(|(i, _)| *i >= n) {
                Some(&(i, _)) => Err(Error::IndexOutOfRange { index: i, len: n }),
                None => Ok(()),
            }
        };
        let mut c = DVector::zeros(n);
        for &(i, v) in &self.objective {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            c[i] += v;
        }
        let mut a = DMatrix::zeros(self.eq.len(), n);
        let mut b = DVector::zeros(self.eq.len());
        for (r, e) in self.eq.iter().enumerate() {
            check(e)?;
            for &(i, v) in &e.terms {
                a[(r, i)] += v;
            }
            b[r] = -e.constant;
        }
        let m = self.nonneg.len() + self.socs.iter().map(Vec::len).sum::<usize>();
        let mut g = DMatrix::zeros(m, n);
        let mut h = DVector::zeros(m);
        let mut cones = Vec::new();
        let mut row = 0;
        // s = h - G x = expr
        let mut emit = |e: &RealAffine, row: usize| -> Result<()> {
            check(e)?;
            for &(i, v) in &e.terms {
                g[(row, i)] -= v;
            }
            h[row] = e.constant;
            Ok(())
        };
        if !self.nonneg.is_empty() {
            for e in &self.nonneg {
                emit(e, row)?;
                row += 1;
            }
            cones.push(Cone::NonNeg(self.nonneg.len()));
        }
        for s in &self.socs {
            for e in s {
                emit(e, row)?;
                row += 1;
            }
            cones.push(Cone::Soc(s.len()));
        }
        let prog = ConeProgram {
            c,
            a,
            b,
            g,
            h,
            cones,
        };
        prog.validate()?;
        Ok(prog)
    }
}

/// Builds `min ||z|| s.t. A z = b` over complex `z`, with the variable block
/// first and the epigraph variable last.
pub fn least_norm_program(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<ConeProgram> {
    if a.nrows() != b.len() {
        return Err(Error::shape(format!(
            "A has {} rows, b has {}",
            a.nrows(),
            b.len()
        )));
    }
    let mut pb = ProgramBuilder::new();
    let z = pb.complex_block(a.ncols());
    let t = pb.real_block(1);
    for r in 0..a.nrows() {
        let mut e = ComplexAffine::constant(-b[r]);
        for j in 0..a.ncols() {
            e.push_complex(z, j, a[(r, j)]);
        }
        pb.complex_equal_zero(&e);
    }
    let body: Vec<ComplexAffine> = (0..a.ncols())
        .map(|j| {
            let mut e = ComplexAffine::default();
            e.push_complex(z, j, Complex64::new(1.0, 0.0));
            e
        })
        .collect();
    pb.complex_soc(RealAffine::var(t.at(0)), &body);
    pb.minimize_term(t.at(0), 1.0);
    pb.build()
}

impl RealAffine {
    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = c;
        self
    }

    pub fn scaled(self, f: f64) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(i, c)| (i, c * f)).collect(),
            constant: self.constant * f,
        }
    }
}
