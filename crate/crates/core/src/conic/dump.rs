//! Plain-text dump of a [`ConeProgram`] for cross-checking with external
//! solvers.
//!
//! Format (whitespace separated, `#` starts a comment line):
//!
//! ```text
//! conic 1
//! dims <n> <p> <m>
//! cones <count> <kind> <dim> <kind> <dim> ...     kind is `l` or `q`
//! c <n values>
//! b <p values>
//! h <m values>
//! A <nnz> then nnz triples `row col value`
//! G <nnz> then nnz triples `row col value`
//! ```
//!
//! Values are written with shortest round-trip precision, so parsing a dump
//! reproduces the program bit for bit.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use super::{Cone, ConeProgram};
use crate::error::{Error, Result};

pub fn write_program(prog: &ConeProgram) -> String {
    let mut out = String::new();
    let (n, p, m) = (prog.num_vars(), prog.num_eq(), prog.cone_dim());
    let _ = writeln!(out, "conic 1");
    let _ = writeln!(out, "dims {n} {p} {m}");
    let _ = write!(out, "cones {}", prog.cones.len());
    for c in &prog.cones {
        match c {
            Cone::NonNeg(d) => { let _ = write!(out, " l {d}"); }
            Cone::Soc(d) => { let _ = write!(out, " q {d}"); }
        }
    }
    out.push('\n');
    for (tag, v) in [("c", &prog.c), ("b", &prog.b), ("h", &prog.h)] {
        out.push_str(tag);
        for x in v.iter() {
            let _ = write!(out, " {x:?}");
        }
        out.push('\n');
    }
    for (tag, mat) in [("A", &prog.a), ("G", &prog.g)] {
        let nz: Vec<_> = (0..mat.ncols())
            .flat_map(|j| (0..mat.nrows()).map(move |i| (i, j)))
            .filter(|&(i, j)| mat[(i, j)] != 0.0)
            .collect();
        let _ = writeln!(out, "{tag} {}", nz.len());
        for (i, j) in nz {
            let _ = writeln!(out, "{i} {j} {:?}", mat[(i, j)]);
        }
    }
    out
}

pub fn parse_program(text: &str) -> Result<ConeProgram> {
    let mut toks = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace);
    let mut next = |what: &str| -> Result<&str> {
        toks.next()
            .ok_or_else(|| Error::invalid(format!("dump truncated: expected {what}")))
    };
    fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
        s.parse()
            .map_err(|_| Error::invalid(format!("bad {what} '{s}' in dump")))
    }
    let expect = |got: &str, want: &str| -> Result<()> {
        if got == want {
            Ok(())
        } else {
            Err(Error::invalid(format!("expected '{want}', found '{got}'")))
        }
    };

    expect(next("header")?, "conic")?;
    expect(next("version")?, "1")?;
    expect(next("dims")?, "dims")?;
    let n: usize = num(next("n")?, "n")?;
    let p: usize = num(next("p")?, "p")?;
    let m: usize = num(next("m")?, "m")?;
    expect(next("cones")?, "cones")?;
    let count: usize = num(next("cone count")?, "cone count")?;
    let mut cones = Vec::with_capacity(count);
    for _ in 0..count {
        let kind = next("cone kind")?;
        let d: usize = num(next("cone dim")?, "cone dim")?;
        cones.push(match kind {
            "l" => Cone::NonNeg(d),
            "q" => Cone::Soc(d),
            other => return Err(Error::invalid(format!("unknown cone kind '{other}'"))),
        });
    }
    let mut vector = |tag: &str, len: usize| -> Result<DVector<f64>> {
        expect(next(tag)?, tag)?;
        let mut v = DVector::zeros(len);
        for i in 0..len {
            v[i] = num(next(tag)?, tag)?;
        }
        Ok(v)
    };
    let c = vector("c", n)?;
    let b = vector("b", p)?;
    let h = vector("h", m)?;
    let mut matrix = |tag: &str, rows: usize| -> Result<DMatrix<f64>> {
        expect(next(tag)?, tag)?;
        let nnz: usize = num(next(tag)?, tag)?;
        let mut mat = DMatrix::zeros(rows, n);
        for _ in 0..nnz {
            let i: usize = num(next("row")?, "row")?;
            let j: usize = num(next("col")?, "col")?;
            let v: f64 = num(next("value")?, "value")?;
            if i >= rows || j >= n {
                return Err(Error::invalid(format!("{tag} entry ({i},{j}) out of range")));
            }
            mat[(i, j)] = v;
        }
        Ok(mat)
    };
    let a = matrix("A", p)?;
    let g = matrix("G", m)?;
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
