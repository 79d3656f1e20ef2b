mod common;

use cgvm_core::units::{omega_from_um, C};
use cgvm_core::{phase_mismatch, poling_period, OpticalAxis, PdcConfig, PdcType};
use common::*;
use proptest::prelude::*;

fn axis() -> impl Strategy<Value = OpticalAxis> {
    prop_oneof![
        Just(OpticalAxis::Ordinary),
        Just(OpticalAxis::Extraordinary)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn index_matches_published_polynomial(ax in axis(), lambda in 0.5f64..4.0, t in 0.0f64..200.0) {
        let c = mgo_ln();
        let n = c.refractive_index(ax, lambda, t).unwrap();
        let direct = gayer_index(ax == OpticalAxis::Extraordinary, lambda, t);
        prop_assert!((n - direct).abs() < 1e-12);
        prop_assert!(n > 1.0);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences(ax in axis(), lambda in 0.56f64..3.9, t in 0.0f64..200.0) {
        let c = mgo_ln();
        let w = omega_from_um(lambda);
        let a = c.wave_dispersion(ax, w, t).unwrap();
        let (d1, d2) = central_derivatives(|x| gayer_k(ax == OpticalAxis::Extraordinary, x, t), w, 2e-3 * w);
        prop_assert!(rel(a.k1, d1) < 1e-6);
        prop_assert!((a.k2 - d2).abs() / a.k2.abs().max(1e-26) < 1e-5);
        // group index is c·k′
        let m = c.group_index(ax, lambda, t).unwrap();
        prop_assert!(rel(m, C * d1) < 1e-6);
    }

    #[test]
    fn index_is_continuous_in_temperature(ax in axis(), lambda in 0.5f64..4.0, t in 0.0f64..199.0) {
        let c = mgo_ln();
        let n0 = c.refractive_index(ax, lambda, t).unwrap();
        let n1 = c.refractive_index(ax, lambda, t + 0.01).unwrap();
        prop_assert!((n1 - n0).abs() < 1e-5);
    }

    #[test]
    fn wavevector_round_trips_to_index(ax in axis(), lambda in 0.5f64..4.0, t in 0.0f64..200.0) {
        let c = mgo_ln();
        let w = omega_from_um(lambda);
        let k = c.wavevector(ax, w, t).unwrap();
        let n = c.refractive_index(ax, cgvm_core::units::um_from_omega(w), t).unwrap();
        prop_assert!((k * C / w - n).abs() < 1e-12);
    }

    #[test]
    fn mismatch_is_symmetric(w1 in -4e13f64..4e13, w2 in -4e13f64..4e13) {
        let cfg = cgvm_config();
        let a = phase_mismatch(&cfg, w1, w2).unwrap();
        let b = phase_mismatch(&cfg, w2, w1).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn qpm_round_trip(lambda_p in 0.6f64..1.3, t in 0.0f64..150.0, l_mm in 1.0f64..100.0) {
        let cfg = PdcConfig::new(mgo_ln(), PdcType::TypeI, OpticalAxis::Extraordinary, OpticalAxis::Ordinary,
            lambda_p, t, l_mm * 1e-3).unwrap();
        prop_assert!(poling_period(&cfg).unwrap() > 0.0);
        prop_assert!(phase_mismatch(&cfg, 0.0, 0.0).unwrap().abs() < 1e-6);
        // a period override equal to the computed value is a near-identity
        let p = poling_period(&cfg).unwrap();
        let fixed = cfg.with_poling_period_um(p).unwrap();
        prop_assert!(phase_mismatch(&fixed, 0.0, 0.0).unwrap().abs() < 1e-6);
    }
}
