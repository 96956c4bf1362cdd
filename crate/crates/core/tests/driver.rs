use ris_isac_core::beamform_w::build_c1;
use ris_isac_core::driver::without_users;
use ris_isac_core::model::EffectiveChannels;
use ris_isac_core::scenario::realize;
use ris_isac_core::{run_baseline, Error, PhaseVector, RunStatus, ScenarioConfig, Scheme};

fn small(seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        antennas: 4,
        ris_elements: 8,
        users: 2,
        target_azimuths_deg: vec![-30.0, 20.0],
        weights: vec![1.0, 1.0],
        rng_seed: seed,
        ..ScenarioConfig::default()
    }
}

#[test]
fn runs_are_deterministic() {
    let cfg = small(3);
    let (_, ch) = realize(&cfg).unwrap();
    let a = run_baseline(&ch, &cfg, Scheme::Proposed).unwrap();
    let b = run_baseline(&ch, &cfg, Scheme::Proposed).unwrap();
    assert_eq!(a.metrics, b.metrics);
    assert_eq!(a.phi, b.phi);
    let strip = |t: &ris_isac_core::RunTrace| t.entries.iter().map(|e| (e.iter, e.sum_snr, e.zeta)).collect::<Vec<_>>();
    assert_eq!(strip(&a.trace), strip(&b.trace));
}

#[test]
fn proposed_meets_constraints() {
    for seed in 1..=3 {
        let cfg = small(seed);
        let (_, ch) = realize(&cfg).unwrap();
        let out = run_baseline(&ch, &cfg, Scheme::Proposed).unwrap();
        let gamma = cfg.gamma_linear();
        assert!(out.metrics.sinr.iter().all(|&s| s >= gamma * (1.0 - 1e-4)), "{:?}", out.metrics.sinr_db);
        assert!(out.metrics.power <= cfg.power_w + 1e-8);
        assert!(out.phi.max_modulus_error() < 1e-12);
        assert!(out.trace.iterations() <= cfg.solver.max_outer_iters);
        assert!(!matches!(out.trace.status, RunStatus::Failed { .. }));
    }
}

#[test]
fn infeasible_scenario_is_reported() {
    let cfg = ScenarioConfig {
        antennas: 2,
        users: 3,
        gamma_db: 60.0,
        power_w: 1e-6,
        ..small(1)
    };
    let (_, ch) = realize(&cfg).unwrap();
    for scheme in [Scheme::Proposed, Scheme::NoRis, Scheme::RandomRis] {
        match run_baseline(&ch, &cfg, scheme) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("{scheme}: expected infeasible, got {:?}", other.map(|o| o.metrics)),
        }
    }
}

#[test]
fn no_ris_keeps_phases_and_increases_monotonically() {
    let cfg = small(2);
    let (_, ch) = realize(&cfg).unwrap();
    let out = run_baseline(&ch, &cfg, Scheme::NoRis).unwrap();
    assert_eq!(out.phi, PhaseVector::ones(cfg.ris_elements));
    let snr: Vec<f64> = out.trace.entries.iter().map(|e| e.sum_snr).collect();
    for w in snr.windows(2) {
        assert!(w[1] >= w[0] * (1.0 - 1e-6), "{snr:?}");
    }
}

#[test]
fn radar_only_without_ris_reaches_top_eigenvalue() {
    let cfg = ScenarioConfig {
        target_azimuths_deg: vec![10.0],
        weights: vec![1.0],
        ..small(4)
    };
    let (_, ch) = realize(&cfg).unwrap();
    let out = run_baseline(&ch, &cfg, Scheme::RadarOnlyNoRis).unwrap();
    let bare = without_users(&ch.without_ris());
    let eff = EffectiveChannels::compute(&bare, &PhaseVector::ones(cfg.ris_elements)).unwrap();
    let c1 = build_c1(&eff.targets, &cfg.weights, cfg.sigma_r_sq).unwrap();
    let best = cfg.power_w * c1.symmetric_eigen().eigenvalues.max();
    assert!((out.metrics.sum_snr - best).abs() <= 1e-3 * best, "{} vs {best}", out.metrics.sum_snr);
}

#[test]
fn radar_only_dominates_joint_design() {
    let cfg = small(5);
    let (_, ch) = realize(&cfg).unwrap();
    let joint = run_baseline(&ch, &cfg, Scheme::Proposed).unwrap();
    let radar = run_baseline(&ch, &cfg, Scheme::RadarOnly).unwrap();
    assert!(radar.metrics.sum_snr >= joint.metrics.sum_snr * (1.0 - 1e-9));
    assert!(radar.metrics.sinr.is_empty());
}

#[test]
fn scheme_names_round_trip() {
    for s in Scheme::ALL {
        assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        assert_eq!(s.to_string(), s.name());
    }
    assert!(matches!("bogus".parse::<Scheme>(), Err(Error::InvalidArgument(_))));
}
