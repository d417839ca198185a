use std::hint::black_box;
use std::thread::available_parallelism;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lgs_core::checker::{check_all, explore, ExploreOptions};
use lgs_core::models::{assemble_system, assemble_with_fault, FaultSpec, TimingTable};
use lgs_core::props::{compile_property, suite};
use lgs_core::ta::System;

fn worker_counts() -> Vec<usize> {
    let n = available_parallelism().map_or(1, |n| n.get());
    let mut counts = vec![1, 2, n.max(4)];
    counts.dedup();
    counts
}

fn exploration(c: &mut Criterion) {
    let t = TimingTable::nominal();
    let fault: FaultSpec = "gear:MovingHighDown@10".parse().unwrap();
    let models = [
        (
            "nominal",
            System::new(&assemble_system(&t).unwrap()).unwrap(),
        ),
        (
            "faulted",
            System::new(&assemble_with_fault(&t, Some(&fault)).unwrap()).unwrap(),
        ),
    ];
    let mut group = c.benchmark_group("explore");
    group.sample_size(20);
    for (name, sys) in &models {
        for workers in worker_counts() {
            let opts = ExploreOptions {
                workers,
                ..ExploreOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(*name, workers), &opts, |b, opts| {
                b.iter(|| black_box(explore(sys, *opts)).len())
            });
        }
    }
    group.finish();
}

fn full_suite(c: &mut Criterion) {
    let base = System::new(&assemble_system(&TimingTable::nominal()).unwrap()).unwrap();
    let qs: Vec<_> = suite()
        .properties()
        .map(|p| compile_property(p, &base).unwrap())
        .collect();
    let mut group = c.benchmark_group("check_suite");
    group.sample_size(10);
    for workers in worker_counts() {
        let opts = ExploreOptions {
            workers,
            ..ExploreOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(workers), &opts, |b, opts| {
            b.iter(|| {
                let mut sys = base.clone();
                black_box(check_all(&mut sys, &qs, *opts).1.len())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, exploration, full_suite);
criterion_main!(benches);
