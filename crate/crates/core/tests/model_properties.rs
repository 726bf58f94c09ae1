mod common;

use common::*;
use hcn_gauss::{fading_moments, path_loss_eval, radial_measure, PathLossModel, RadialIntensity, Scenario};
use proptest::prelude::*;

proptest! {
    #[test]
    fn path_loss_is_bounded_and_non_increasing(f in family(), alpha in 2.05f64..8.0, a in 0.0f64..50.0, b in 0.0f64..50.0) {
        let g = PathLossModel::new(f, alpha);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (gl, gh) = (path_loss_eval(&g, lo).unwrap(), path_loss_eval(&g, hi).unwrap());
        prop_assert!(gh <= gl);
        prop_assert!(gl <= path_loss_eval(&g, 0.0).unwrap());
        prop_assert!(gh >= 0.0);
    }

    #[test]
    fn fading_moments_obey_jensen(f in fading()) {
        let m = fading_moments(&f).unwrap();
        let tol = 1e-12;
        prop_assert!(m.m2 >= m.m1 * m.m1 * (1.0 - tol));
        prop_assert!(m.m3 >= m.m2.powf(1.5) * (1.0 - tol));
        prop_assert!(m.m3 * m.m1 >= m.m2 * m.m2 * (1.0 - tol));
    }

    #[test]
    fn radial_measure_is_monotone_and_linear(lambda in 0.0f64..10.0, c in 0.1f64..5.0, p in 0.2f64..4.0,
                                              n1 in 0.0f64..30.0, dn in 0.0f64..30.0, k in 0.0f64..7.0) {
        for mu in [RadialIntensity::Homogeneous2D, RadialIntensity::power_radial(c, p)] {
            let a = radial_measure(&mu, lambda, n1).unwrap();
            let b = radial_measure(&mu, lambda, n1 + dn).unwrap();
            prop_assert!(b >= a);
            let scaled = radial_measure(&mu, k * lambda, n1).unwrap();
            prop_assert!((scaled - k * a).abs() <= 1e-12 * scaled.abs().max(1e-300));
        }
        prop_assert!((radial_measure(&RadialIntensity::Homogeneous2D, lambda, n1).unwrap()
            - lambda * std::f64::consts::PI * n1 * n1).abs() <= 1e-12 * (1.0 + lambda * n1 * n1));
    }

    #[test]
    fn scenario_json_round_trips(s in scenario()) {
        let text = s.canonical_json();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.canonical_json(), text);
        prop_assert_eq!(back.fingerprint(), s.fingerprint());
    }

    #[test]
    fn generated_scenarios_validate(s in scenario()) {
        prop_assert!(s.validate().is_pass(), "{}", s.validate());
    }
}

#[test]
fn negative_distance_is_rejected() {
    let err = path_loss_eval(&PathLossModel::inverse_one_plus_power(4.0), -1.0).unwrap_err();
    assert_eq!(err.category(), "domain");
    assert_eq!(radial_measure(&RadialIntensity::Homogeneous2D, 1.0, -0.5).unwrap_err().category(), "domain");
}

#[test]
fn fingerprint_depends_on_seed_and_content() {
    let s = figure1(1.0);
    assert_ne!(s.fingerprint_with_seed(1), s.fingerprint_with_seed(2));
    assert_ne!(s.fingerprint(), figure1(2.0).fingerprint());
    assert_eq!(s.fingerprint().len(), 64);
}

#[test]
fn invalid_scenarios_list_every_violation() {
    let mut s = figure1(1.0);
    s.tiers[0].pathloss.alpha = 2.0;
    s.tiers[2].power = -1.0;
    let report = s.validate();
    assert!(!report.is_pass());
    let text = report.to_string();
    assert!(text.contains("alpha > 2 required"), "{text}");
    assert!(text.contains("tier 2"), "{text}");
    assert!(s.validated().is_err());
    let empty = Scenario::new(vec![planar(1.0, 0.0, 4.0)]);
    assert!(empty.validate().to_string().contains("lambda > 0"));
}
