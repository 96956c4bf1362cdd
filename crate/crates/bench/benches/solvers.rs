use criterion::{criterion_group, criterion_main, Criterion};
use ris_isac_bench::Fixture;
use ris_isac_core::beamform_w::solve_w_step;
use ris_isac_core::ris_phase::{rcg_optimize, PenaltyState, RcgOptions};
use ris_isac_core::{alternating_optimize, ScenarioConfig};

fn w_step(c: &mut Criterion) {
    for (name, fx) in [("desk", Fixture::desk()), ("reference", Fixture::reference())] {
        let ctx = fx.w_step();
        c.bench_function(&format!("w_step/{name}"), |b| b.iter(|| solve_w_step(&ctx).unwrap()));
    }
}

fn phase_step(c: &mut Criterion) {
    for (name, fx) in [("desk", Fixture::desk()), ("reference", Fixture::reference())] {
        let coeffs = fx.phi_coeffs();
        let opts = RcgOptions::default();
        c.bench_function(&format!("rcg/{name}"), |b| b.iter(|| rcg_optimize(&fx.phi, &coeffs, 1e-2, &opts)));
        let step = fx.phi_step();
        let v = fx.phi.as_vector();
        c.bench_function(&format!("a_step/{name}"), |b| b.iter(|| step.a_step(v).unwrap()));
        let state = PenaltyState::new(&fx.config.solver);
        c.bench_function(&format!("penalty_loop/{name}"), |b| {
            b.iter(|| step.penalty_loop(&fx.phi, state.clone()).unwrap())
        });
    }
}

fn full_run(c: &mut Criterion) {
    let fx = Fixture::new(ScenarioConfig {
        ris_elements: 8,
        ..ScenarioConfig::desk()
    });
    let mut g = c.benchmark_group("alternating");
    g.sample_size(10);
    g.bench_function("desk_n8", |b| b.iter(|| alternating_optimize(&fx.channels, &fx.config).unwrap()));
    g.finish();
}

criterion_group!(benches, w_step, phase_step, full_run);
criterion_main!(benches);
