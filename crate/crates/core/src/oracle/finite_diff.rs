//! Central finite differences on the real parameterization of `C^N`.

use crate::error::{Error, Result};
use crate::{CVector, Complex64};

/// Gradient of a real function of a complex vector with respect to
/// `(Re z, Im z)`, returned as `[d/dRe z_0 .. d/dRe z_{N-1}, d/dIm z_0 ..]`.
pub fn finite_diff_gradient<F>(f: F, point: &CVector, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&CVector) -> f64,
{
    if !(1e-7..=1e-5).contains(&h) {
        return Err(Error::invalid(format!("step {h} outside [1e-7, 1e-5]")));
    }
    let n = point.len();
    let mut out = vec![0.0; 2 * n];
    for part in 0..2 {
        let dir = if part == 0 { Complex64::ONE } else { Complex64::I };
        for i in 0..n {
            let mut p = point.clone();
            p[i] += dir * h;
            let fp = f(&p);
            p[i] -= dir * (2.0 * h);
            let fm = f(&p);
            out[part * n + i] = (fp - fm) / (2.0 * h);
        }
    }
    Ok(out)
}

/// `[x; y]` to `x + j y`.
pub fn pack_complex(g: &[f64]) -> CVector {
    let n = g.len() / 2;
    CVector::from_fn(n, |i, _| Complex64::new(g[i], g[n + i]))
}
