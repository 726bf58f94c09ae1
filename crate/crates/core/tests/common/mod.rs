#![allow(dead_code)]

use hcn_gauss::{FadingModel, PathLossFamily, PathLossModel, RadialIntensity, Scenario, TierConfig};
use proptest::prelude::*;

pub fn rayleigh() -> FadingModel {
    FadingModel::RayleighPower { mean_power: 1.0 }
}

pub fn planar(power: f64, lambda: f64, alpha: f64) -> TierConfig {
    TierConfig::homogeneous(power, lambda, PathLossModel::inverse_one_plus_power(alpha), rayleigh())
}

pub fn figure1(kappa: f64) -> Scenario {
    Scenario::new(vec![planar(4.0, 0.1 * kappa, 4.0), planar(1.0, kappa, 4.0), planar(0.25, 5.0 * kappa, 4.0)])
}

pub fn fading() -> impl Strategy<Value = FadingModel> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|gain| FadingModel::Deterministic { gain }),
        (0.2f64..5.0).prop_map(|mean_power| FadingModel::RayleighPower { mean_power }),
        (0.5f64..6.0, 0.2f64..5.0).prop_map(|(m, mean_power)| FadingModel::NakagamiPower { m, mean_power }),
        (0.0f64..8.0, 0.2f64..5.0).prop_map(|(k_factor, mean_power)| FadingModel::RicianPower { k_factor, mean_power }),
    ]
}

pub fn family() -> impl Strategy<Value = PathLossFamily> {
    prop_oneof![
        Just(PathLossFamily::InverseOnePlusPower),
        Just(PathLossFamily::MinOneInversePower),
        Just(PathLossFamily::ShiftedInversePower),
    ]
}

/// Tiers satisfying every admissibility condition.
pub fn tier() -> impl Strategy<Value = TierConfig> {
    (family(), 2.3f64..6.0, 0.1f64..10.0, 0.01f64..5.0, fading(), any::<bool>(), 0.3f64..3.0, 0.0f64..1.0).prop_map(
        |(family, alpha, power, lambda, fading, planar, c, frac)| {
            let intensity = if planar {
                RadialIntensity::Homogeneous2D
            } else {
                // exponent strictly inside (0, alpha - 0.2)
                RadialIntensity::power_radial(c, 0.5 + frac * (alpha - 0.7))
            };
            TierConfig { power, lambda, intensity, pathloss: PathLossModel::new(family, alpha), fading }
        },
    )
}

pub fn scenario() -> impl Strategy<Value = Scenario> {
    prop::collection::vec(tier(), 1..5).prop_map(Scenario::new)
}

/// Homogeneous planar scenario with arbitrary fading and path loss.
pub fn planar_scenario() -> impl Strategy<Value = Scenario> {
    prop::collection::vec(tier(), 1..5).prop_map(|mut tiers| {
        for t in &mut tiers {
            t.intensity = RadialIntensity::Homogeneous2D;
        }
        Scenario::new(tiers)
    })
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
