use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use hcn_gauss::simulate::substream;
use hcn_gauss::{
    interference_realization, monte_carlo, Construction, FadingModel, PathLossModel, Scenario, SimConfig, TierConfig,
};

fn scenario(fading: FadingModel) -> Scenario {
    Scenario::new(
        [(4.0, 0.1), (1.0, 1.0), (0.25, 5.0)]
            .into_iter()
            .map(|(p, l)| TierConfig::homogeneous(p, l, PathLossModel::inverse_one_plus_power(4.0), fading))
            .collect(),
    )
}

fn bench(c: &mut Criterion) {
    let radius = 30.0;
    let points = 6.1 * std::f64::consts::PI * radius * radius;
    let mut group = c.benchmark_group("realization");
    group.throughput(Throughput::Elements(points as u64));
    for (name, fading) in [
        ("rayleigh", FadingModel::RayleighPower { mean_power: 1.0 }),
        ("nakagami", FadingModel::NakagamiPower { m: 2.0, mean_power: 1.0 }),
    ] {
        let s = scenario(fading);
        let cfg = SimConfig { radius, replications: 1, seed: 1, construction: Construction::PoissonField };
        group.bench_function(name, |b| {
            b.iter_batched(
                || substream(7, 0, 0),
                |mut rng| interference_realization(black_box(&s), &cfg, &mut rng).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();

    let s = scenario(FadingModel::RayleighPower { mean_power: 1.0 });
    let cfg = SimConfig { radius: 10.0, replications: 200, seed: 3, construction: Construction::PoissonField };
    c.bench_function("monte_carlo/200_reps_radius_10", |b| b.iter(|| monte_carlo(black_box(&s), &cfg).unwrap()));
}

criterion_group!(benches, bench);
criterion_main!(benches);
