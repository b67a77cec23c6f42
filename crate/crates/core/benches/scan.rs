use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lattice_cavity::atomic_mirror::SiteCoupling;
use lattice_cavity::cavity_network::{CavityConfig, DeterminantMode};
use lattice_cavity::parallel::Execution;
use lattice_cavity::resonances::scan_det_map_with;

fn det_map(c: &mut Criterion) {
    let cfg = CavityConfig::new(0.99, 0.99, SiteCoupling(-9e-4), 1000, 0.0).unwrap();
    let mut group = c.benchmark_group("det_map_600x600");
    group.sample_size(20);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    scan_det_map_with(
                        black_box(&cfg),
                        [-0.5, 0.5],
                        [0.0, TAU],
                        600,
                        600,
                        DeterminantMode::Full,
                        exec,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, det_map);
criterion_main!(benches);
