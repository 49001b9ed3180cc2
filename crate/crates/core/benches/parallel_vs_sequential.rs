use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use periodlab_core::autoforms::SpectralParam;
use periodlab_core::transfer::{build_transfer_matrix_with, scan_critical_line, AssemblyConfig};
use periodlab_core::{Complex64, Execution};

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn matrix_assembly(c: &mut Criterion) {
    let s = SpectralParam::from_s(Complex64::new(0.5, 9.5));
    let mut group = c.benchmark_group("matrix_assembly");
    for n in [32usize, 64] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| build_transfer_matrix_with(black_box(s), n, AssemblyConfig::default(), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn critical_line_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("critical_line_scan");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 28), |b| {
            b.iter(|| scan_critical_line(9.3, 9.8, 0.05, 28, -1.0, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, matrix_assembly, critical_line_scan);
criterion_main!(benches);
