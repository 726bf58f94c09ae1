use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hcn_gauss::analytics::{laplace_transform, tier_integral_quadrature, xi_coefficient};
use hcn_gauss::{FadingModel, PathLossModel, RadialIntensity, Scenario, TierConfig};

fn rayleigh_tier(power: f64, lambda: f64) -> TierConfig {
    TierConfig::homogeneous(
        power,
        lambda,
        PathLossModel::inverse_one_plus_power(4.0),
        FadingModel::RayleighPower { mean_power: 1.0 },
    )
}

fn three_tiers() -> Scenario {
    Scenario::new(vec![rayleigh_tier(4.0, 0.1), rayleigh_tier(1.0, 1.0), rayleigh_tier(0.25, 5.0)])
}

fn bench(c: &mut Criterion) {
    let s = three_tiers();
    c.bench_function("xi/three_tiers_closed_form", |b| b.iter(|| xi_coefficient(black_box(&s)).unwrap()));

    let mut rician = s.clone();
    for t in &mut rician.tiers {
        t.pathloss = PathLossModel::shifted_inverse_power(3.3);
        t.fading = FadingModel::RicianPower { k_factor: 4.0, mean_power: 1.0 };
        t.intensity = RadialIntensity::power_radial(2.0, 1.7);
    }
    c.bench_function("xi/three_tiers_quadrature", |b| b.iter(|| xi_coefficient(black_box(&rician)).unwrap()));

    let tier = &rician.tiers[0];
    c.bench_function("tier_integral/quadrature_m2", |b| {
        b.iter(|| tier_integral_quadrature(black_box(tier), 2).unwrap())
    });

    let svals = [0.1, 1.0, 10.0];
    c.bench_function("laplace/three_points", |b| b.iter(|| laplace_transform(black_box(&s), &svals).unwrap()));
}

criterion_group!(benches, bench);
criterion_main!(benches);
