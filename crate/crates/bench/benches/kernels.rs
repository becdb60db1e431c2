use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sagrover_core::grover::{durr_hoyer_min, MinFindConfig, OracleMode};
use sagrover_core::qubo::{fix_variables, random_instance, Assignment, PartialAssignment};
use sagrover_core::statevector::{Gate, StateVector};
use sagrover_core::{synthesize_cost_circuit, QuboModel};

fn evaluate(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_dense");
    for n in [25usize, 100, 625] {
        let model = random_instance(n, 1.0, 5, 1).unwrap();
        let a = Assignment::random(n, &mut ChaCha8Rng::seed_from_u64(2));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| model.evaluate(black_box(&a)).unwrap())
        });
    }
    group.finish();
}

fn gates(c: &mut Criterion) {
    let mut group = c.benchmark_group("hadamard_layer");
    for m in [10usize, 16, 20] {
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            let mut sv = StateVector::new(m).unwrap();
            b.iter(|| {
                for k in 0..m {
                    sv.apply(&Gate::H(k)).unwrap();
                }
            })
        });
    }
    group.finish();
}

fn min_finding(c: &mut Criterion) {
    let mut group = c.benchmark_group("durr_hoyer");
    group.sample_size(20);
    for q in [6usize, 10, 14] {
        let model = random_instance(q, 0.5, 8, 3).unwrap();
        let p = PartialAssignment::from_fixed(q, Default::default()).unwrap();
        let reduced = fix_variables(&model, &p).unwrap();
        group.bench_with_input(BenchmarkId::new("semantic", q), &q, |b, _| {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            b.iter(|| durr_hoyer_min(&reduced, OracleMode::Semantic, &mut rng, &MinFindConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn synthesis(c: &mut Criterion) {
    let model = QuboModel::five_variable_example();
    let p = PartialAssignment::from_fixed(5, [(0, false), (3, true)].into()).unwrap();
    let reduced = fix_variables(&model, &p).unwrap();
    c.bench_function("synthesize_triangle", |b| b.iter(|| synthesize_cost_circuit(black_box(&reduced)).unwrap()));
}

criterion_group!(benches, evaluate, gates, min_finding, synthesis);
criterion_main!(benches);
