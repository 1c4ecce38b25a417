use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iesplan_core::analysis::sweep_carbon_tax;
use iesplan_core::io::read_scenarios;
use iesplan_core::milp::exec::Execution;
use iesplan_core::model::ModelConfig;
use iesplan_core::presets;
use iesplan_core::scengen::{estimate_targets, hmm_generate, HmmOptions};
use iesplan_core::solve::SolverConfig;
use iesplan_core::{EvRecord, FcKind, Scenario, ScenarioSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn scenario_generation(c: &mut Criterion) {
    let hist = read_scenarios(&data("history_load.csv"), Some(&data("history_ev.csv"))).unwrap();
    let targets = estimate_targets(&hist, true);
    let mut group = c.benchmark_group("hmm_generate");
    group.sample_size(10);
    for (name, execution) in MODES {
        let opts = HmmOptions { execution, ..HmmOptions::default() };
        group.bench_with_input(BenchmarkId::new(name, 100), &opts, |b, opts| {
            b.iter(|| hmm_generate(&targets, 100, 7, opts).unwrap())
        });
    }
    group.finish();
}

fn small_set(n: usize) -> ScenarioSet {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let scenarios = (0..n)
        .map(|_| Scenario {
            elec_load: (0..6).map(|_| rng.gen_range(200.0..400.0)).collect(),
            heat_load: (0..6).map(|_| rng.gen_range(10.0..80.0)).collect(),
            pv_avail: (0..6).map(|t| if (2..5).contains(&t) { rng.gen_range(0.0..200.0) } else { 0.0 }).collect(),
            evs: vec![EvRecord { arrive_hour: 0, depart_hour: 5, initial_soc: rng.gen_range(0.6..0.85) }],
        })
        .collect();
    ScenarioSet { hours: 6, scenarios }
}

fn carbon_tax_sweep(c: &mut Criterion) {
    let mut case = presets::case();
    case.catalog.fuel_cells.retain(|f| matches!(f.id, FcKind::PemGas | FcKind::Sofc));
    case.catalog.ev_fleet.n_ev = 1;
    case.tariffs = presets::tariffs(6, 40.0);
    let set = small_set(20);
    let taxes = [40.0, 100.0, 400.0, 700.0, 1000.0];
    let mut group = c.benchmark_group("sweep_carbon_tax");
    group.sample_size(10);
    for (name, execution) in MODES {
        let solver = SolverConfig { execution, ..SolverConfig::default() };
        group.bench_with_input(BenchmarkId::new(name, taxes.len()), &solver, |b, solver| {
            b.iter(|| sweep_carbon_tax(&case, &set, &ModelConfig::default(), solver, &taxes).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scenario_generation, carbon_tax_sweep);
criterion_main!(benches);
