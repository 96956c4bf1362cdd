//! Planar deployment geometry.
//!
//! Both arrays are uniform linear arrays laid along the y axis with
//! half-wavelength spacing. The BS sits at the origin with broadside along
//! +x; the RIS sits at `(d_bs_ris, 0)` with broadside along -x, facing the BS.
//! An angle is measured from the array broadside, positive toward +y, so the
//! array response to a point depends only on the y component of the unit
//! direction vector (the sine of that angle).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ScenarioConfig;
use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub bs_position: Point,
    pub ris_position: Point,
    pub user_positions: Vec<Point>,
    pub target_positions: Vec<Point>,
}

const GEOM_TOL: f64 = 1e-9;

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Sine of the broadside angle from `from` toward `to`; `None` when the points
/// coincide.
pub fn direction_sine(from: Point, to: Point) -> Option<f64> {
    let d = distance(from, to);
    if d > 0.0 {
        Some((to[1] - from[1]) / d)
    } else {
        None
    }
}

impl Geometry {
    /// Places targets on the circle of radius `d_bs_target` around the BS at
    /// the configured azimuths and draws users uniformly on the circle of
    /// radius `d_ris_user` around the RIS.
    pub fn place<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Self {
        let bs = [0.0, 0.0];
        let ris = [config.d_bs_ris, 0.0];
        let target_positions = config
            .target_azimuths_deg
            .iter()
            .map(|az| {
                let th = az.to_radians();
                [config.d_bs_target * th.cos(), config.d_bs_target * th.sin()]
            })
            .collect();
        let user_positions = (0..config.users)
            .map(|_| {
                let psi = rng.random::<f64>() * std::f64::consts::TAU;
                [
                    ris[0] + config.d_ris_user * psi.cos(),
                    ris[1] + config.d_ris_user * psi.sin(),
                ]
            })
            .collect();
        Self {
            bs_position: bs,
            ris_position: ris,
            user_positions,
            target_positions,
        }
    }

    /// Checks counts and the configured link distances.
    pub fn validate(&self, config: &ScenarioConfig) -> Result<()> {
        if self.user_positions.len() != config.users {
            return Err(Error::invalid(format!(
                "geometry has {} users, config {}",
                self.user_positions.len(),
                config.users
            )));
        }
        if self.target_positions.len() != config.targets() {
            return Err(Error::invalid(format!(
                "geometry has {} targets, config {}",
                self.target_positions.len(),
                config.targets()
            )));
        }
        let check = |what: &str, got: f64, want: f64| {
            if (got - want).abs() > GEOM_TOL * want.max(1.0) {
                Err(Error::invalid(format!("{what} distance {got} != configured {want}")))
            } else {
                Ok(())
            }
        };
        check(
            "BS-RIS",
            distance(self.bs_position, self.ris_position),
            config.d_bs_ris,
        )?;
        for &u in &self.user_positions {
            check("RIS-user", distance(self.ris_position, u), config.d_ris_user)?;
            if distance(self.bs_position, u) <= 0.0 {
                return Err(Error::invalid("user coincides with the BS"));
            }
        }
        for &t in &self.target_positions {
            check("BS-target", distance(self.bs_position, t), config.d_bs_target)?;
            if distance(self.ris_position, t) <= 0.0 {
                return Err(Error::invalid("target coincides with the RIS"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn placement_honours_distances() {
        let cfg = ScenarioConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Geometry::place(&cfg, &mut rng);
        g.validate(&cfg).unwrap();
        // Target at 0 degrees lies on the BS-RIS axis.
        let t0 = g.target_positions[1];
        assert!((t0[0] - 30.0).abs() < 1e-12 && t0[1].abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_moved_ris() {
        let cfg = ScenarioConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut g = Geometry::place(&cfg, &mut rng);
        g.ris_position[0] += 1.0;
        assert!(g.validate(&cfg).is_err());
    }

    #[test]
    fn direction_sine_signs() {
        assert_eq!(direction_sine([0.0, 0.0], [1.0, 0.0]), Some(0.0));
        assert!((direction_sine([0.0, 0.0], [1.0, 1.0]).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(direction_sine([1.0, 1.0], [1.0, 1.0]), None);
    }
}
