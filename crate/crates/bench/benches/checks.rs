use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cube_spectral::{run_check, BoundId, CheckSpec, Exponent, TargetSpace, TheoremId};

fn checks(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_check");
    g.sample_size(10);
    let vector = TargetSpace::lq(Exponent::Infinity, 3).unwrap();
    let specs = [
        CheckSpec::bound(BoundId::MarkovD2, 8, 4).with_p(Exponent::Infinity).with_target(vector),
        CheckSpec::bound(BoundId::HeatLowerGeneral, 8, 4).with_p(3.0),
        CheckSpec::bound(BoundId::MomentScalar, 8, 4).with_p(3.0).with_q(2.0),
        CheckSpec::new(TheoremId::HeatEquiv, 8, 8),
    ];
    for spec in specs {
        let spec = spec.with_trials(200);
        g.bench_with_input(BenchmarkId::from_parameter(spec.theorem), &spec, |b, s| {
            b.iter(|| run_check(s).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, checks);
criterion_main!(benches);
