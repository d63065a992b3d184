//! Sequential vs rayon execution of a few suites. On a single-core machine
//! the two should be within noise of each other.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fockcheck::exec::Execution;
use fockcheck::suites::{run_suite, Overrides, Suite, SuiteConfig};

fn config(suite: Suite, exec: Execution) -> SuiteConfig {
    let mut c = SuiteConfig::new(suite);
    c.exec = exec;
    // One α keeps each iteration around a second.
    c.overrides = Overrides {
        alpha: Some(1.0),
        ..Overrides::default()
    };
    c
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    for suite in [Suite::Thm1, Suite::Thm2, Suite::Nulla] {
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(suite.as_str(), name), &exec, |b, &exec| {
                let cfg = config(suite, exec);
                b.iter(|| black_box(run_suite(&cfg).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
