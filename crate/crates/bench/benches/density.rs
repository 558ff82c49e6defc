use criterion::{criterion_group, criterion_main, Criterion};
use octgaps_core::distribution::{self, cdf, cdf_many, pdf, region_volume, Method};
use octgaps_core::Region;
use std::hint::black_box;

fn density(c: &mut Criterion) {
    let grid: Vec<f64> = (0..1000).map(|i| 1.0 + i as f64 * 0.02).collect();
    c.bench_function("pdf_1000_points", |b| b.iter(|| grid.iter().map(|&t| pdf(black_box(t))).sum::<f64>()));
    c.bench_function("cdf_single", |b| b.iter(|| cdf(black_box(5.0))));
    c.bench_function("cdf_many_1000", |b| b.iter(|| cdf_many(black_box(&grid)).len()));
    c.bench_function("total_mass", |b| b.iter(|| distribution::total_mass(black_box(1e6)).integral));
}

fn volumes(c: &mut Criterion) {
    let mut g = c.benchmark_group("volume_quadrature");
    g.sample_size(10);
    for r in [Region::BD, Region::HF] {
        g.bench_function(r.name(), |b| b.iter(|| region_volume(black_box(r), Method::Quadrature).value));
    }
    g.finish();
}

criterion_group!(benches, density, volumes);
criterion_main!(benches);
