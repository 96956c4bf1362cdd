use super::*;
use crate::model::vecops::{kron, vec};
use crate::oracle::instances::{
    random_beamformer, random_channels, random_cmatrix, random_cvector, random_phase, random_psd,
};
use crate::scenario::realize;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Feasible precoder: minimum-power communication columns plus the remaining
/// power on one radar column orthogonal to every user channel.
fn feasible_start(users: &[CVector], gamma: f64, sigma_sq: f64, power: f64, m: usize) -> CMatrix {
    let k = users.len();
    let wc = min_power_comm(users, &vec![gamma; k], &vec![sigma_sq; k], &SolverSettings::default())
        .unwrap()
        .expect("feasible");
    let mut w = CMatrix::zeros(m, k + m);
    for j in 0..k {
        w.set_column(j, &wc.column(j));
    }
    let q = orthonormal_basis(&users.iter().map(|h| h.conjugate()).collect::<Vec<_>>(), m);
    let mut d = CVector::from_element(m, Complex64::new(1.0, 0.5));
    d -= &q * (q.adjoint() * &d);
    let rest = (power - wc.norm_squared()).max(0.0) * 0.999;
    w.set_column(k, &(d.unscale(d.norm()) * Complex64::from(rest.sqrt())));
    w
}

fn context(seed: u64, m: usize, k: usize, gamma: f64) -> WStepContext {
    let mut r = rng(seed);
    let c1 = random_psd(&mut r, m, 2);
    let users: Vec<CVector> = (0..k).map(|_| random_cvector(&mut r, m)).collect();
    let w = feasible_start(&users, gamma, 1.0, 10.0, m);
    WStepContext {
        c1,
        users,
        gamma: vec![gamma; k],
        sigma_sq: vec![1.0; k],
        power: 10.0,
        w_i: BeamformerMatrix::new(w, k).unwrap(),
        settings: SolverSettings::default(),
    }
}

#[test]
fn c1_identity_and_rank() {
    let c1 = build_c1(&[CMatrix::identity(3, 3)], &[1.0], 1.0).unwrap();
    assert!((c1 - CMatrix::identity(3, 3)).norm() < 1e-15);

    let mut r = rng(1);
    let ch = random_channels(&mut r, 6, 4, 2, 3, 0.5);
    let phi = random_phase(&mut r, 4);
    let eff = EffectiveChannels::compute(&ch, &phi).unwrap();
    let c1 = build_c1(&eff.targets, &[1.0, 2.0, 0.5], 0.1).unwrap();
    let eig = c1.clone().symmetric_eigen().eigenvalues;
    let top = eig.max();
    let significant = eig.iter().filter(|e| **e > 1e-10 * top).count();
    assert!(significant <= 3);
    assert!(eig.min() > -1e-10 * top);
    assert!((&c1 - c1.adjoint()).norm() < 1e-12 * c1.norm());
}

#[test]
fn c1_quadratic_form_matches_objective() {
    let mut r = rng(2);
    let ch = random_channels(&mut r, 5, 4, 2, 2, 0.7);
    let phi = random_phase(&mut r, 4);
    let mut config = ScenarioConfig::desk();
    config.antennas = 5;
    config.ris_elements = 4;
    config.sigma_r_sq = 0.3;
    config.weights = vec![1.5, 0.5];
    let eff = EffectiveChannels::compute(&ch, &phi).unwrap();
    let c1 = build_c1(&eff.targets, &config.weights, config.sigma_r_sq).unwrap();
    let w = random_beamformer(&mut r, 5, 2, 3.0);
    let direct = model::weighted_sum_snr(&w, &phi, &ch, &config).unwrap();
    let quad = radar_objective(&c1, w.matrix());
    assert!((direct - quad).abs() < 1e-10 * direct);

    // Second difference along D equals 2 Tr(D^H C_1 D).
    let d = random_cmatrix(&mut r, 5, 7);
    let f = |x: &CMatrix| radar_objective(&c1, x);
    let eps = 1e-3;
    let e = Complex64::from(eps);
    let fd = (f(&(w.matrix() + &d * e)) + f(&(w.matrix() - &d * e)) - 2.0 * f(w.matrix())) / (eps * eps);
    let exact = 2.0 * radar_objective(&c1, &d);
    assert!((fd - exact).abs() < 1e-6 * exact);
}

#[test]
fn surrogate_touch_and_minorization() {
    let mut r = rng(3);
    for _ in 0..20 {
        let c1 = random_psd(&mut r, 4, 3);
        let wi = random_cmatrix(&mut r, 4, 6);
        let touch = mm_surrogate_w(&wi, &wi, &c1).unwrap();
        let val = radar_objective(&c1, &wi);
        assert!((touch - val).abs() < 1e-10 * val.max(1.0));
        for _ in 0..50 {
            let w = random_cmatrix(&mut r, 4, 6) * Complex64::from(2.0);
            assert!(mm_surrogate_w(&w, &wi, &c1).unwrap() <= radar_objective(&c1, &w) + 1e-10);
        }
    }
    let zero = CMatrix::zeros(3, 3);
    let w = random_cmatrix(&mut r, 3, 4);
    assert_eq!(mm_surrogate_w(&w, &w, &zero).unwrap(), 0.0);
}

#[test]
fn surrogate_matches_kronecker_form() {
    // 2 Re{vec(W_i^H)^H (C_1^T kron I) vec(W^H)} - Tr(W_i^H C_1 W_i)
    let mut r = rng(4);
    let c1 = random_psd(&mut r, 3, 2);
    let wi = random_cmatrix(&mut r, 3, 5);
    let w = random_cmatrix(&mut r, 3, 5);
    let big = kron(&c1.transpose(), &CMatrix::identity(5, 5));
    let lin = (vec(&wi.adjoint()).adjoint() * big * vec(&w.adjoint()))[0].re;
    let expect = 2.0 * lin - radar_objective(&c1, &wi);
    let got = mm_surrogate_w(&w, &wi, &c1).unwrap();
    assert!((got - expect).abs() < 1e-10 * expect.abs().max(1.0));
}

#[test]
fn rotate_columns_cases() {
    let h = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let w = CMatrix::from_row_slice(
        2,
        3,
        &[
            Complex64::new(-2.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(1.0, 0.0),
        ],
    );
    let bw = BeamformerMatrix::new(w.clone(), 1).unwrap();
    let out = rotate_columns(&bw, &[h.clone()]).unwrap();
    assert_eq!(out.matrix().column(0), (w.column(0) * Complex64::from(-1.0)));
    assert_eq!((h.transpose() * out.matrix().column(0))[0], Complex64::new(2.0, 0.0));
    assert_eq!(out.matrix().columns(1, 2), w.columns(1, 2));
    // Already real positive: unchanged.
    assert_eq!(rotate_columns(&out, &[h.clone()]).unwrap(), out);
    // Zero inner product: unchanged.
    let zero_w = BeamformerMatrix::new(CMatrix::zeros(2, 3), 1).unwrap();
    assert_eq!(rotate_columns(&zero_w, &[h]).unwrap(), zero_w);
}

#[test]
fn rotate_columns_preserves_metrics() {
    let mut r = rng(5);
    let ch = random_channels(&mut r, 4, 3, 2, 2, 1.0);
    let phi = random_phase(&mut r, 3);
    let config = {
        let mut c = ScenarioConfig::desk();
        c.antennas = 4;
        c.ris_elements = 3;
        c.sigma_k_sq = 0.1;
        c.sigma_r_sq = 0.1;
        c
    };
    let eff = EffectiveChannels::compute(&ch, &phi).unwrap();
    for _ in 0..20 {
        let w = random_beamformer(&mut r, 4, 2, 5.0);
        let out = rotate_columns(&w, &eff.users).unwrap();
        let a = model::metrics(&w, &phi, &ch, &config).unwrap();
        let b = model::metrics(&out, &phi, &ch, &config).unwrap();
        assert!((a.sum_snr - b.sum_snr).abs() < 1e-12 * a.sum_snr);
        assert!((a.power - b.power).abs() < 1e-12 * a.power);
        for (x, y) in a.sinr.iter().zip(&b.sinr) {
            assert!((x - y).abs() < 1e-12 * x.max(1e-300));
        }
        for (k, h) in eff.users.iter().enumerate() {
            let g = (h.transpose() * out.matrix().column(k))[0];
            assert!(g.re >= 0.0 && g.im.abs() < 1e-12 * g.norm());
        }
    }
}

#[test]
fn no_users_gives_ball_solution() {
    let mut r = rng(6);
    let c1 = random_psd(&mut r, 4, 2);
    let wi = random_beamformer(&mut r, 4, 0, 2.0);
    let ctx = WStepContext {
        c1: c1.clone(),
        users: vec![],
        gamma: vec![],
        sigma_sq: vec![],
        power: 3.0,
        w_i: wi.clone(),
        settings: SolverSettings::default(),
    };
    let u = &c1 * wi.matrix();
    let expect = &u * Complex64::from(3f64.sqrt() / u.norm());
    for form in [WFormulation::Reduced, WFormulation::Full] {
        let w = solve_w_step_with(&ctx, form).unwrap();
        assert!((w.matrix() - &expect).norm() < 1e-6 * expect.norm(), "{form:?}");
    }
}

#[test]
fn vanishing_targets_reproduce_ball_solution() {
    // Real data with h_k^T C_1 w_k > 0, so the phase restriction is inactive
    // at the unconstrained maximizer.
    let m = 4;
    let c1 = CMatrix::from_fn(m, m, |i, j| Complex64::from(if i == j { 2.0 } else { 0.3 }));
    let users = vec![
        CVector::from_fn(m, |i, _| Complex64::from(1.0 + i as f64)),
        CVector::from_fn(m, |i, _| Complex64::from(if i % 2 == 0 { 1.0 } else { 0.2 })),
    ];
    let wi = CMatrix::from_fn(m, m + 2, |i, j| Complex64::from(0.2 + 0.05 * (i + j) as f64));
    let ctx = WStepContext {
        c1: c1.clone(),
        users,
        gamma: vec![1e-8; 2],
        sigma_sq: vec![1.0; 2],
        power: 4.0,
        w_i: BeamformerMatrix::new(wi.clone(), 2).unwrap(),
        settings: SolverSettings::default(),
    };
    let u = &c1 * &wi;
    let expect = &u * Complex64::from(2.0 / u.norm());
    let w = solve_w_step(&ctx).unwrap();
    assert!((w.matrix() - &expect).norm() < 1e-3 * expect.norm());
}

#[test]
fn w_step_is_feasible_and_monotone() {
    for seed in 0..8 {
        let ctx = context(seed, 6, 2, 3.0);
        let before = ctx.objective(ctx.w_i.matrix());
        let w = solve_w_step(&ctx).unwrap();
        assert!(ctx.is_feasible(w.matrix(), 1e-6), "seed {seed}");
        assert!(ctx.objective(w.matrix()) >= before - 1e-8 * before, "seed {seed}");
        let full = solve_w_step_with(&ctx, WFormulation::Full).unwrap();
        let (a, b) = (ctx.objective(w.matrix()), ctx.objective(full.matrix()));
        assert!((a - b).abs() < 1e-6 * a, "seed {seed}: reduced {a} full {b}");
    }
}

#[test]
fn w_step_meets_sinr_on_reference_scenario() {
    let config = ScenarioConfig::default();
    let (_, ch) = realize(&config).unwrap();
    let phi = PhaseVector::ones(config.ris_elements);
    let eff = EffectiveChannels::compute(&ch, &phi).unwrap();
    let w0 = feasible_start(&eff.users, config.gamma_linear(), config.sigma_k_sq, config.power_w, config.antennas);
    let ctx = WStepContext::from_scenario(&ch, &phi, &config, BeamformerMatrix::new(w0, config.users).unwrap()).unwrap();
    let before = ctx.objective(ctx.w_i.matrix());
    let w = solve_w_step(&ctx).unwrap();
    for k in 0..config.users {
        let s = model::sinr_from_channel(w.matrix(), &eff.users[k], k, config.sigma_k_sq);
        assert!(s >= config.gamma_linear() * (1.0 - 1e-6), "user {k}: {s}");
    }
    assert!(w.power() <= config.power_w * (1.0 + 1e-9));
    assert!(ctx.objective(w.matrix()) >= before);
}

#[test]
fn min_power_is_tight() {
    let mut r = rng(7);
    let users: Vec<CVector> = (0..3).map(|_| random_cvector(&mut r, 5)).collect();
    let gamma = vec![2.0; 3];
    let sig = vec![0.5; 3];
    let w = min_power_comm(&users, &gamma, &sig, &SolverSettings::default()).unwrap().unwrap();
    let sinr = |w: &CMatrix, k| model::sinr_from_channel(w, &users[k], k, sig[k]);
    for k in 0..3 {
        assert!(sinr(&w, k) >= 2.0 * (1.0 - 1e-6));
    }
    let shrunk = &w * Complex64::from(0.99);
    assert!((0..3).any(|k| sinr(&shrunk, k) < 2.0));

    // Two users with identical channels cannot both reach SINR 2.
    let same = vec![users[0].clone(), users[0].clone()];
    assert!(min_power_comm(&same, &[2.0, 2.0], &[0.5, 0.5], &SolverSettings::default())
        .unwrap()
        .is_none());
}
