use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fluct_core::distributions::occupation_pdf_exact_with;
use fluct_core::fluctuation::covariance_matrix_with;
use fluct_core::identities::run_all_with;
use fluct_core::monte_carlo::{empirical_stats_with, SamplerConfig};
use fluct_core::{Execution, SystemParams};

const POLICIES: [(&str, Execution); 2] =
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn exact_pdf(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_pdf_n256_t10");
    group.sample_size(10);
    let params = SystemParams::new(256, 2560).unwrap();
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| occupation_pdf_exact_with(&params, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo_n50_m100_200k");
    group.sample_size(10);
    let config = SamplerConfig::new(SystemParams::new(50, 100).unwrap(), 200_000, 7)
        .unwrap()
        .with_level_cutoff(10);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| empirical_stats_with(&config, exec))
        });
    }
    group.finish();
}

fn covariance(c: &mut Criterion) {
    let mut group = c.benchmark_group("covariance_m2000");
    group.sample_size(20);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| covariance_matrix_with(100, 3.0, 2000, exec).unwrap())
        });
    }
    group.finish();
}

fn identities(c: &mut Criterion) {
    let mut group = c.benchmark_group("identity_suite");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_all_with(exec))
        });
    }
    group.finish();
}

criterion_group!(benches, exact_pdf, monte_carlo, covariance, identities);
criterion_main!(benches);
