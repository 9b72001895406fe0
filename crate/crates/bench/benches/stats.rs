use capstream_bench::scores;
use capstream_core::metrics::{friedman_test, rm_anova, wilcoxon_signed_rank, RankMatrix};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn friedman_and_anova(c: &mut Criterion) {
    let m = RankMatrix::new(scores(24, 4, 1)).unwrap();
    c.bench_function("friedman_24x4", |b| b.iter(|| black_box(friedman_test(black_box(&m)))));
    c.bench_function("rm_anova_24x4", |b| b.iter(|| black_box(rm_anova(black_box(&m)).unwrap())));
}

fn wilcoxon(c: &mut Criterion) {
    let mut group = c.benchmark_group("wilcoxon");
    for n in [8usize, 12, 40] {
        let rows = scores(n, 2, n as u64);
        let x: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &(x, y), |b, (x, y)| {
            b.iter(|| black_box(wilcoxon_signed_rank(x, y).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, friedman_and_anova, wilcoxon);
criterion_main!(benches);
