use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use cube_spectral::radial::{levels_to_radial, radial_laplacian, radial_to_levels};
use cube_spectral::{fwht, heat, random_function, RadialFunction, SpectralBand, TargetSpace};

fn walsh(c: &mut Criterion) {
    let mut g = c.benchmark_group("fwht");
    g.sample_size(20);
    for n in [10usize, 16, 20] {
        let f = random_function(n, SpectralBand::full(n), TargetSpace::Scalar, 0, 0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| fwht(black_box(f))));
    }
    g.finish();
}

fn heat_flow(c: &mut Criterion) {
    let mut g = c.benchmark_group("heat");
    g.sample_size(20);
    for n in [10usize, 16] {
        let f = random_function(n, SpectralBand::full(n), TargetSpace::Scalar, 0, 0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| heat(black_box(f), 0.5).unwrap()));
    }
    g.finish();
}

fn radial(c: &mut Criterion) {
    let mut g = c.benchmark_group("radial");
    for n in [100usize, 1000, 6400] {
        let f = RadialFunction::chebyshev_witness(n, 8).unwrap();
        let s = radial_to_levels(&f);
        g.bench_with_input(BenchmarkId::new("to_levels", n), &f, |b, f| b.iter(|| radial_to_levels(black_box(f))));
        g.bench_with_input(BenchmarkId::new("to_radial", n), &s, |b, s| b.iter(|| levels_to_radial(black_box(s))));
        g.bench_with_input(BenchmarkId::new("laplacian", n), &f, |b, f| b.iter(|| radial_laplacian(black_box(f))));
    }
    g.finish();
}

criterion_group!(benches, walsh, heat_flow, radial);
criterion_main!(benches);
