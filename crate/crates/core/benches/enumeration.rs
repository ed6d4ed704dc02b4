use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ifslab::attractor::{box_count_dim, chaos_game};
use ifslab::dimension::{jsr_bracket, partition_function};
use ifslab::gallery::{pu_distinct_count, Manifest};
use ifslab::{rng, Tolerance};
use rayon::ThreadPool;

fn pools() -> Vec<(&'static str, ThreadPool)> {
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    vec![
        ("sequential", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()),
    ]
}

fn word_sweeps(c: &mut Criterion) {
    let mut r = rng::seeded(1);
    let mats: Vec<_> = (0..3).map(|_| rng::gaussian_matrix(&mut r, 4).scale(0.3)).collect();
    let mut group = c.benchmark_group("word_sweeps");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::new("partition_function_n9", label), |b| {
            b.iter(|| pool.install(|| partition_function(&mats, 2.5, 9).unwrap()))
        });
        group.bench_function(BenchmarkId::new("jsr_bracket_n9", label), |b| {
            b.iter(|| pool.install(|| jsr_bracket(&mats, 9).unwrap()))
        });
        group.bench_function(BenchmarkId::new("distinct_count_n20", label), |b| {
            b.iter(|| pool.install(|| pu_distinct_count(20).unwrap()))
        });
    }
    group.finish();
}

fn box_counting(c: &mut Criterion) {
    let case = Manifest::bundled().build("example2").unwrap();
    let cloud = chaos_game(&case.ifs, 300_000, 100, 0, &Tolerance::default()).unwrap();
    let mut group = c.benchmark_group("box_counting");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::new("levels_0_to_9", label), |b| {
            b.iter(|| pool.install(|| box_count_dim(&cloud, 0, 9).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, word_sweeps, box_counting);
criterion_main!(benches);
