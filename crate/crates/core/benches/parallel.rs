//! Sequential vs rayon execution of the bulk kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use chebgf::chebyshev::ChebKind;
use chebgf::denominator::build_w_with;
use chebgf::genfun::{numerator_l_with, GenSpec};
use chebgf::kibble::{kibble_series_oracle_with, CorrMatrix, OracleConfig};
use chebgf::par::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn denominators(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_w");
    g.sample_size(10);
    for n in [3, 4] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| b.iter(|| build_w_with(n, exec).unwrap()));
        }
    }
    g.finish();
}

fn numerators(c: &mut Criterion) {
    let mut g = c.benchmark_group("numerator_l");
    g.sample_size(10);
    for (k, n) in [(2, 1), (2, 2)] {
        let spec = GenSpec::unshifted(k, n).unwrap();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, spec.label()), &spec, |b, s| {
                b.iter(|| numerator_l_with(s, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("kibble_oracle");
    g.sample_size(10);
    let k = CorrMatrix::parse("12=0.3,13=-0.2,23=0.25").unwrap();
    let xs = [0.4, -0.3, 0.7];
    for cutoff in [20, 30] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, cutoff), &cutoff, |b, &cut| {
                b.iter(|| kibble_series_oracle_with(ChebKind::U, &xs, &k, OracleConfig::boxed(cut), exec).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, denominators, numerators, oracle);
criterion_main!(benches);
