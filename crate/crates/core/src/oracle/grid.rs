//! Exhaustive search over a uniform phase grid.

use crate::error::{Error, Result};
use crate::model::PhaseVector;

pub const MAX_GRID_ELEMENTS: usize = 3;

/// Evaluates `objective` at every point of the `step_deg` phase grid in
/// `[0, 360)^N` and returns the minimizer.
pub fn grid_search_phi<F>(objective: F, n: usize, step_deg: f64) -> Result<(PhaseVector, f64)>
where
    F: Fn(&PhaseVector) -> f64,
{
    if n == 0 || n > MAX_GRID_ELEMENTS {
        return Err(Error::OracleRefused(format!(
            "grid search supports 1..={MAX_GRID_ELEMENTS} elements, got {n}"
        )));
    }
    if !(step_deg > 0.0 && step_deg <= 180.0) {
        return Err(Error::invalid(format!("grid step {step_deg} out of range")));
    }
    let per_axis = (360.0 / step_deg).round() as usize;
    let step = step_deg.to_radians();
    let total = per_axis.pow(n as u32);
    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    let mut angles = vec![0.0; n];
    for idx in 0..total {
        let mut rem = idx;
        for a in angles.iter_mut() {
            *a = (rem % per_axis) as f64 * step;
            rem /= per_axis;
        }
        let v = objective(&PhaseVector::from_angles(&angles));
        if v < best_val {
            best_val = v;
            best_idx = idx;
        }
    }
    let mut rem = best_idx;
    for a in angles.iter_mut() {
        *a = (rem % per_axis) as f64 * step;
        rem /= per_axis;
    }
    Ok((PhaseVector::from_angles(&angles), best_val))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_element_alignment() {
        // minimize -Re{conj(f) phi}: optimum phi = f / |f|
        let target = 1.234f64;
        let (phi, val) = grid_search_phi(
            |p| -(p.as_vector()[0] * crate::Complex64::from_polar(1.0, -target)).re,
            1,
            0.5,
        )
        .unwrap();
        let got = phi.angles()[0];
        assert!((got - target).abs() <= 0.5f64.to_radians());
        assert!(val <= -((0.25f64).to_radians().cos()));
    }

    #[test]
    fn constant_objective() {
        let (_, v) = grid_search_phi(|_| 3.5, 2, 10.0).unwrap();
        assert_eq!(v, 3.5);
    }

    #[test]
    fn refuses_large_problems() {
        assert!(matches!(grid_search_phi(|_| 0.0, 4, 10.0), Err(Error::OracleRefused(_))));
    }
}
