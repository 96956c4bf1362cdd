//! Column-major vectorization helpers.
//!
//! `vec` stacks columns, so `vec(A X B) = (B^T kron A) vec(X)` and
//! `Tr(A^H B) = vec(A)^H vec(B)`.

use crate::error::{Error, Result};
use crate::{CMatrix, CVector};

pub fn vec(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

pub fn unvec(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::shape(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(CMatrix::from_column_slice(rows, cols, v.as_slice()))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `A ⊗ b` for a column vector `b`, as a matrix.
pub fn kron_mv(a: &CMatrix, b: &CVector) -> CMatrix {
    a.kronecker(b)
}

/// `a ⊗ B` for a column vector `a`.
pub fn kron_vm(a: &CVector, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `(A ⊗ I_p) x` without forming the Kronecker product:
/// equals `vec(X A^T)` with `X = unvec(x, p, cols(A))`.
pub fn kron_identity_apply(a: &CMatrix, p: usize, x: &CVector) -> Result<CVector> {
    let xm = unvec(x, p, a.ncols())?;
    Ok(vec(&(xm * a.transpose())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
        DMatrix::from_fn(r, c, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn vec_identity() {
        let i = CMatrix::identity(2, 2);
        let v = vec(&i);
        let want = [1.0, 0.0, 0.0, 1.0];
        for (x, w) in v.iter().zip(want) {
            assert_eq!(*x, Complex64::new(w, 0.0));
        }
    }

    #[test]
    fn unvec_inverts_vec_and_checks_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = rand_mat(&mut rng, 3, 5);
        assert_eq!(unvec(&vec(&a), 3, 5).unwrap(), a);
        assert!(unvec(&vec(&a), 4, 4).is_err());
    }

    #[test]
    fn vec_of_product_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = rand_mat(&mut rng, 3, 4);
        let x = rand_mat(&mut rng, 4, 2);
        let b = rand_mat(&mut rng, 2, 5);
        let lhs = vec(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vec(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn trace_quadratic_as_kronecker_form() {
        // Tr(W^H C W) = vec(W^H)^H (C^T ⊗ I) vec(W^H), W 3x4.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = rand_mat(&mut rng, 3, 4);
        let r = rand_mat(&mut rng, 3, 3);
        let c = &r * r.adjoint();
        let direct = (w.adjoint() * &c * &w).trace();
        let wt = vec(&w.adjoint());
        let big = kron(&c.transpose(), &CMatrix::identity(4, 4));
        let via_kron = (wt.adjoint() * big * &wt)[(0, 0)];
        assert!((direct - via_kron).norm() < 1e-12 * direct.norm().max(1.0));
        let fast = kron_identity_apply(&c.transpose(), 4, &wt).unwrap();
        assert!(((wt.adjoint() * fast)[(0, 0)] - direct).norm() < 1e-12);
    }
}
