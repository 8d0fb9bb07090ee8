use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use cyclewalk::engine::{make_trajectory, CatchEngine, TrajectoryKind};
use cyclewalk::spectral::{nstep_wrapped, wrap};
use cyclewalk::{bounds, StepLaw};

fn laws() -> Vec<(&'static str, StepLaw)> {
    vec![
        ("heavy_tailed", StepLaw::heavy_tailed(1.0).unwrap()),
        ("power_law", StepLaw::power_law(1.0, 2.5).unwrap()),
        ("lazy", StepLaw::lazy()),
    ]
}

fn bench_wrap(c: &mut Criterion) {
    let mut g = c.benchmark_group("wrap");
    for (name, law) in laws() {
        for n in [100usize, 1000] {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| b.iter(|| wrap(&law, black_box(n)).unwrap()));
        }
    }
    g.finish();
}

fn bench_nstep(c: &mut Criterion) {
    let mut g = c.benchmark_group("nstep_wrapped");
    let law = StepLaw::heavy_tailed(1.0).unwrap();
    for n in [31usize, 100, 1000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| nstep_wrapped(&law, black_box(n), n as u64).unwrap())
        });
    }
    g.finish();
}

fn bench_forward(c: &mut Criterion) {
    let mut g = c.benchmark_group("catch_forward");
    g.sample_size(20);
    let law = StepLaw::heavy_tailed(1.0).unwrap();
    for n in [100usize, 1000] {
        let t = make_trajectory(&TrajectoryKind::Sweep { start: 0, direction: 1 }, n).unwrap();
        let mut engine = CatchEngine::new(&law, n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| b.iter(|| engine.forward(t).average));
    }
    g.finish();
}

fn bench_sandwich(c: &mut Criterion) {
    let mut g = c.benchmark_group("sandwich");
    g.sample_size(10);
    let law = StepLaw::power_law(1.0, 2.5).unwrap();
    g.bench_function("N=500", |b| b.iter(|| bounds::sandwich(&law, black_box(500)).unwrap().lower));
    g.finish();
}

criterion_group!(benches, bench_wrap, bench_nstep, bench_forward, bench_sandwich);
criterion_main!(benches);
