use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lrsda_core::coarray::so_eca;
use lrsda_core::doa::estimate_doas;
use lrsda_core::experiment::{best_lr_sda, uniform_angles, DoaPipeline};
use lrsda_core::geometry::{build_lr_sda, select_delta};
use lrsda_core::reconstruction::lcm_arith_sequence;
use lrsda_core::signal::{analytic_soc, combine_cumulants};

fn bench_coarray_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("so_eca");
    for n in [9u32, 19, 28, 60] {
        let (params, _) = best_lr_sda(n).unwrap();
        let array = build_lr_sda(&params).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &array, |b, array| {
            b.iter(|| so_eca(array))
        });
    }
    group.finish();
}

fn bench_delta_search(c: &mut Criterion) {
    c.bench_function("select_delta_14_14", |b| {
        b.iter(|| select_delta(14, 14, 6).unwrap())
    });
}

fn bench_music_pipeline(c: &mut Criterion) {
    let (params, _) = best_lr_sda(11).unwrap();
    let array = build_lr_sda(&params).unwrap();
    let angles = uniform_angles(20, -60.0, 60.0);
    let injected = combine_cumulants(&analytic_soc(&array, &angles, 1.0, 1.0));
    c.bench_function("music_20_sources_exact", |b| {
        b.iter(|| estimate_doas(&injected, &array, 20, 0.05).unwrap())
    });

    let pipeline = DoaPipeline::new(array, angles, 0.0, 2_000);
    c.bench_function("trial_20_sources_2000_snapshots", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            pipeline.run_trial(seed).unwrap()
        })
    });
}

fn bench_sequence_lcm(c: &mut Criterion) {
    c.bench_function("lcm_arith_sequence_long", |b| {
        b.iter(|| lcm_arith_sequence(7, 30, 64).unwrap())
    });
}

criterion_group!(
    benches,
    bench_coarray_enumeration,
    bench_delta_search,
    bench_music_pipeline,
    bench_sequence_lcm
);
criterion_main!(benches);
