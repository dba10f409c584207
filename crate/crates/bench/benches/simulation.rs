use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hetwsn_core::{
    deploy, rng, run_single, ExperimentConfig, ProtocolKind, RoundSetup, Simulation,
};

fn setup(cfg: &ExperimentConfig) -> RoundSetup {
    RoundSetup {
        protocol: cfg.protocol,
        p_opt: cfg.p_opt,
        het: cfg.network.het,
        reset_trigger: cfg.reset_trigger,
        radio: cfg.radio,
        bs_pos: cfg.network.bs_pos,
    }
}

fn bench_rounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("first_100_rounds");
    for protocol in ProtocolKind::ALL {
        let mut cfg = ExperimentConfig::scenario(1).unwrap();
        cfg.protocol = protocol;
        cfg.network.rng_seed = 7;
        let nodes = deploy(&cfg.network).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(protocol), &nodes, |b, nodes| {
            b.iter(|| {
                let mut sim = Simulation::new(nodes.clone(), setup(&cfg), rng::election_rng(7));
                black_box(sim.run(100).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_full_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("full_run_scenario_1");
    group.sample_size(10);
    for protocol in ProtocolKind::ALL {
        let mut cfg = ExperimentConfig::scenario(1).unwrap();
        cfg.protocol = protocol;
        group.bench_function(BenchmarkId::from_parameter(protocol), |b| {
            b.iter(|| black_box(run_single(&cfg, 11).unwrap().summary.fnd))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_rounds, bench_full_run);
criterion_main!(benches);
