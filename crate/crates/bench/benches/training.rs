use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use boostcolony::acar::run_acar;
use boostcolony::boosting::{adaboost_train, train_stump, WeightVector};
use boostcolony::derive_stream;
use boostcolony_bench::{colony, dataset, world, SEED};

fn stumps(c: &mut Criterion) {
    let mut group = c.benchmark_group("train_stump");
    for n in [100, 400, 1600] {
        let data = dataset(n, 10);
        let w = WeightVector::uniform(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, data| {
            b.iter(|| train_stump(black_box(data), black_box(&w)).unwrap())
        });
    }
    group.finish();
}

fn adaboost(c: &mut Criterion) {
    let data = dataset(200, 10);
    c.bench_function("adaboost_train/200x10/100", |b| {
        b.iter(|| adaboost_train(black_box(&data), 100).unwrap())
    });
}

fn acar(c: &mut Criterion) {
    let world = world(4);
    let cfg = colony(30, 20);
    let mut stream = 0;
    c.bench_function("run_acar/k4/30x20", |b| {
        b.iter(|| {
            stream += 1;
            run_acar(&world, &cfg, &mut derive_stream(SEED, stream)).unwrap()
        })
    });
}

criterion_group!(benches, stumps, adaboost, acar);
criterion_main!(benches);
