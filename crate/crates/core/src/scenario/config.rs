use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::from_db;

/// Physical and algorithmic parameters of one scenario.
///
/// Defaults reproduce the reference deployment: a 16-antenna BS, a 36-element
/// RIS, four users, three targets at -30/0/30 degrees, 35 W, 5 dB SINR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// BS antenna count `M` (transmit = receive).
    pub antennas: usize,
    /// RIS element count `N`.
    pub ris_elements: usize,
    /// Single-antenna user count `K`.
    pub users: usize,
    /// Target azimuths in degrees from BS broadside; the target count `T` is
    /// the length of this list.
    pub target_azimuths_deg: Vec<f64>,
    /// Per-target weights `omega_t`, same length as `target_azimuths_deg`.
    pub weights: Vec<f64>,
    /// Total transmit power `P` in watts.
    pub power_w: f64,
    pub d_bs_target: f64,
    pub d_bs_ris: f64,
    pub d_ris_user: f64,
    pub alpha_br: f64,
    pub alpha_rt: f64,
    pub alpha_ru: f64,
    pub alpha_bt: f64,
    pub alpha_bu: f64,
    /// Rician factor of the RIS-user links (dB).
    pub beta_ru_db: f64,
    /// Rician factor of the BS-RIS and BS-user links (dB).
    pub beta_other_db: f64,
    /// Reference path-loss power gain at 1 m (dB).
    pub pl0_db: f64,
    /// Radar receiver noise power (W).
    pub sigma_r_sq: f64,
    /// User noise power (W), common to all users.
    pub sigma_k_sq: f64,
    /// Common SINR target `Gamma` (dB).
    pub gamma_db: f64,
    pub rng_seed: u64,
    pub solver: SolverConfig,
}

/// Iteration limits and tolerances of the alternating optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Initial penalty coefficient.
    pub rho_init: f64,
    /// Penalty shrink factor; `rho <- rho / c` with `0 < c < 1`.
    pub shrink: f64,
    /// Threshold on the stopping indicator `zeta`.
    pub epsilon: f64,
    /// Relative change of the penalized objective that ends an inner round.
    pub inner_tol: f64,
    pub max_inner_rounds: usize,
    /// Penalty increases per phase step.
    pub max_penalty_rounds: usize,
    pub max_outer_iters: usize,
    /// Number of consecutive outer iterations inspected for convergence.
    pub conv_window: usize,
    /// Relative objective change regarded as converged.
    pub conv_rel_tol: f64,
    pub rcg_max_iter: usize,
    pub rcg_grad_tol: f64,
    pub conic_tol: f64,
    pub conic_max_iter: usize,
    /// Also start the joint design from phases tuned for the radar alone,
    /// keeping whichever start ends higher.
    pub radar_warm_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rho_init: 1e-3,
            shrink: 0.5,
            epsilon: 1e-4,
            inner_tol: 1e-5,
            max_inner_rounds: 30,
            max_penalty_rounds: 80,
            max_outer_iters: 100,
            conv_window: 3,
            conv_rel_tol: 1e-3,
            rcg_max_iter: 200,
            rcg_grad_tol: 1e-6,
            conic_tol: 1e-8,
            conic_max_iter: 100,
            radar_warm_start: true,
        }
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            antennas: 16,
            ris_elements: 36,
            users: 4,
            target_azimuths_deg: vec![-30.0, 0.0, 30.0],
            weights: vec![1.0, 1.0, 1.0],
            power_w: 35.0,
            d_bs_target: 30.0,
            d_bs_ris: 35.0,
            d_ris_user: 3.0,
            alpha_br: 2.3,
            alpha_rt: 2.3,
            alpha_ru: 2.3,
            alpha_bt: 2.7,
            alpha_bu: 3.3,
            beta_ru_db: 3.0,
            beta_other_db: 0.0,
            pl0_db: -30.0,
            // -80 dBm
            sigma_r_sq: 1e-11,
            sigma_k_sq: 1e-11,
            gamma_db: 5.0,
            rng_seed: 1,
            solver: SolverConfig::default(),
        }
    }
}

impl ScenarioConfig {
    /// Reduced-size scenario (M=8, N=16, K=2, T=2) used for quick experiments.
    pub fn desk() -> Self {
        Self {
            antennas: 8,
            ris_elements: 16,
            users: 2,
            target_azimuths_deg: vec![-30.0, 0.0],
            weights: vec![1.0, 1.0],
            ..Self::default()
        }
    }

    pub fn targets(&self) -> usize {
        self.target_azimuths_deg.len()
    }

    /// Number of precoder columns, `K + M`.
    pub fn streams(&self) -> usize {
        self.users + self.antennas
    }

    pub fn gamma_linear(&self) -> f64 {
        from_db(self.gamma_db)
    }

    pub fn pl0(&self) -> f64 {
        from_db(self.pl0_db)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.antennas == 0 || self.ris_elements == 0 || self.users == 0 {
            return bad("antennas, ris_elements and users must be >= 1".into());
        }
        if self.target_azimuths_deg.is_empty() {
            return bad("at least one target azimuth is required".into());
        }
        if self.weights.len() != self.targets() {
            return bad(format!(
                "weights has {} entries but there are {} targets",
                self.weights.len(),
                self.targets()
            ));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return bad("weights must be finite and nonnegative".into());
        }
        if !self.weights.iter().any(|w| *w > 0.0) {
            return bad("at least one weight must be positive".into());
        }
        for &az in &self.target_azimuths_deg {
            if !(az > -90.0 && az < 90.0) {
                return bad(format!("target azimuth {az} outside (-90, 90)"));
            }
        }
        let positive = [
            ("power_w", self.power_w),
            ("d_bs_target", self.d_bs_target),
            ("d_bs_ris", self.d_bs_ris),
            ("d_ris_user", self.d_ris_user),
            ("sigma_r_sq", self.sigma_r_sq),
            ("sigma_k_sq", self.sigma_k_sq),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        let finite = [
            ("alpha_br", self.alpha_br),
            ("alpha_rt", self.alpha_rt),
            ("alpha_ru", self.alpha_ru),
            ("alpha_bt", self.alpha_bt),
            ("alpha_bu", self.alpha_bu),
            ("pl0_db", self.pl0_db),
            ("gamma_db", self.gamma_db),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        // +inf is the pure line-of-sight limit.
        if self.beta_ru_db.is_nan() || self.beta_other_db.is_nan() {
            return bad("Rician factors must not be NaN".into());
        }
        self.solver.validate()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Short stable fingerprint of every field, used to tag result rows.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::Config(format!(
                "shrink must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        let positive = [
            ("rho_init", self.rho_init),
            ("epsilon", self.epsilon),
            ("inner_tol", self.inner_tol),
            ("conv_rel_tol", self.conv_rel_tol),
            ("rcg_grad_tol", self.rcg_grad_tol),
            ("conic_tol", self.conic_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_outer_iters == 0 || self.conv_window == 0 || self.conic_max_iter == 0 {
            return Err(Error::Config(
                "iteration limits and the convergence window must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_match_reference_setup() {
        let cfg = ScenarioConfig::default();
        cfg.validate().unwrap();
        assert_eq!((cfg.antennas, cfg.users, cfg.targets()), (16, 4, 3));
        assert_eq!(cfg.power_w, 35.0);
        assert!((cfg.gamma_linear() - 10f64.powf(0.5)).abs() < 1e-15);
        assert!((cfg.pl0() - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn rejects_bad_shrink_and_weights() {
        let mut cfg = ScenarioConfig::default();
        cfg.solver.shrink = 1.0;
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::default();
        cfg.weights = vec![0.0, 0.0, 0.0];
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::default();
        cfg.weights.pop();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn toml_partial_override_keeps_defaults() {
        let cfg = ScenarioConfig::from_toml_str(
            "antennas = 8\ngamma_db = 3.0\n[solver]\nepsilon = 1e-5\n",
        )
        .unwrap();
        assert_eq!(cfg.antennas, 8);
        assert_eq!(cfg.gamma_db, 3.0);
        assert_eq!(cfg.solver.epsilon, 1e-5);
        assert_eq!(cfg.ris_elements, 36);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = ScenarioConfig::from_toml_str("antennas = 8\nbogus = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn toml_roundtrip_and_hash_stability() {
        let cfg = ScenarioConfig::desk();
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash(), back.hash());
        let mut other = cfg.clone();
        other.rng_seed += 1;
        assert_ne!(cfg.hash(), other.hash());
    }
}
