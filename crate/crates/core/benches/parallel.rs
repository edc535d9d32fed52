use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geotomo::bodies::{direction, make_counterexample_body, ConvexBody};
use geotomo::par;
use geotomo::sections::build_profile;

fn profile_grid(body: &ConvexBody, angles: &[f64], parallel: bool) -> Vec<f64> {
    let work = |&beta: &f64| {
        build_profile(body, &direction(body.n, beta), -0.5, 1e-9)
            .map(|s| s.a0)
            .unwrap_or(f64::NAN)
    };
    if parallel {
        #[cfg(feature = "parallel")]
        return par::map_parallel(angles, work);
    }
    par::map_sequential(angles, work)
}

fn bench(c: &mut Criterion) {
    let body = make_counterexample_body(5, -0.5, 30.0).expect("body");
    let mut group = c.benchmark_group("section profiles over angles");
    group.sample_size(10);
    for size in [8usize, 32] {
        let angles: Vec<f64> = (0..size)
            .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / (size - 1) as f64)
            .collect();
        group.bench_with_input(BenchmarkId::new("sequential", size), &angles, |b, a| {
            b.iter(|| profile_grid(&body, a, false))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", size), &angles, |b, a| {
            b.iter(|| profile_grid(&body, a, true))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
