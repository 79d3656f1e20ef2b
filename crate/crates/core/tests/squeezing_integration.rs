mod common;

use std::f64::consts::E;
use std::sync::OnceLock;

use cgvm_core::squeezing::{squeezing_spectrum_with, VALIDITY_LIMIT_DB};
use cgvm_core::*;
use common::*;
use proptest::prelude::*;

const N: usize = 128;

struct Shape {
    decomp: SchmidtDecomposition,
    eta: f64,
}

/// Coarse cGVM-design shape; identities below hold for any decomposition.
fn shape() -> &'static Shape {
    static SHAPE: OnceLock<Shape> = OnceLock::new();
    SHAPE.get_or_init(|| {
        let grid = default_grid(&cgvm_config(), &cgvm_pump())
            .unwrap()
            .with_n(N)
            .unwrap();
        let jsa = compute_jsa(&cgvm_config(), &cgvm_pump(), &grid).unwrap();
        let decomp = schmidt_decompose(&jsa).unwrap();
        let eta = jsa_efficiency(&jsa, &decomp);
        Shape { decomp, eta }
    })
}

fn assemble(length_m: f64, power_w: f64) -> SqueezingResult {
    let cfg = cgvm_config().with_length_m(length_m).unwrap();
    let pump = cgvm_pump().with_mean_power_w(power_w).unwrap();
    SqueezingResult::assemble(&cfg, &pump, &shape().decomp, shape().eta).unwrap()
}

#[test]
fn chain_identities() {
    let r = assemble(0.08, 0.012);
    let log_e = E.log10();
    assert!(rel(r.s0_db(), 20.0 * log_e * (r.eta_pdc * r.peak_power).sqrt()) < 1e-12);
    let s = &r.singular_values;
    for n in 0..10 {
        for m in 0..10 {
            if r.r[m] > 0.0 && s[m] > 0.0 {
                assert!(rel(r.r[n] / r.r[m], s[n] / s[m]) < 1e-12 || r.r[n] == 0.0);
            }
        }
        assert!(rel(r.r[n], 2.0 * r.gain.sqrt() * s[n]) < 1e-12 || r.r[n] == 0.0);
        assert!(rel(r.s_db[n], 20.0 * r.r[n] * log_e) < 1e-12 || r.r[n] == 0.0);
    }
    let lhs = r.gain * s.iter().map(|x| x * x).sum::<f64>();
    let rhs: f64 = r.r.iter().map(|x| (x / 2.0).powi(2)).sum();
    assert!(rel(lhs, rhs) < 1e-12);
    assert!(r
        .r
        .iter()
        .chain(&r.s_db)
        .chain(&r.mean_photons)
        .all(|&x| x >= 0.0));
    assert_eq!(r.schmidt_number, shape().decomp.schmidt_number);
}

#[test]
fn pinned_shape_gives_exact_root_length_growth() {
    let base = assemble(0.01, 0.012);
    for k in [2.0, 4.0, 8.0] {
        let r = assemble(0.01 * k, 0.012);
        assert!(rel(r.s0_db() / base.s0_db(), k.sqrt()) < 1e-12);
    }
}

#[test]
fn validity_flag_tracks_threshold() {
    for p in [1e-3, 5e-3, 0.012, 0.02, 0.05, 0.2] {
        let r = assemble(0.08, p);
        assert_eq!(r.exceeds_validity, r.s0_db() > VALIDITY_LIMIT_DB, "P = {p}");
    }
    assert!(!assemble(0.08, 1e-3).exceeds_validity);
    assert!(assemble(0.08, 0.2).exceeds_validity);
}

#[test]
fn single_length_scan_equals_spectrum() {
    let spec = GridSpec::with_n(N);
    let cfg = walkoff_config();
    let pump = walkoff_pump();
    let scan = length_scan(&cfg, &pump, &[cfg.length_m()], &spec).unwrap();
    let direct = squeezing_spectrum_with(&cfg, &pump, &spec).unwrap();
    assert_eq!(scan.len(), 1);
    assert_eq!(scan[0].0, cfg.length_m());
    assert_eq!(scan[0].1, direct);
}

#[test]
fn scan_preserves_input_order() {
    let spec = GridSpec::with_n(64);
    let lengths = [0.02, 0.004, 0.01, 0.002];
    let scan = length_scan(&walkoff_config(), &walkoff_pump(), &lengths, &spec).unwrap();
    let got: Vec<f64> = scan
        .iter()
        .map(|(l, r)| {
            assert_eq!(*l, r.length_m);
            *l
        })
        .collect();
    assert_eq!(got, lengths);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrupled_power_doubles_squeezing(p in 1e-4f64..0.1) {
        let a = assemble(0.08, p);
        let b = assemble(0.08, 4.0 * p);
        for n in 0..a.r.len() {
            prop_assert_eq!(b.r[n], 2.0 * a.r[n]);
            prop_assert_eq!(b.s_db[n], 2.0 * a.s_db[n]);
        }
    }

    #[test]
    fn beam_waist_is_positive(l in 1e-4f64..0.5, t in 0.0f64..100.0) {
        let cfg = cgvm_config().with_length_m(l).unwrap().with_temperature_c(t).unwrap();
        let w = beam_waist(&cfg).unwrap();
        prop_assert!(w.is_finite() && w > 0.0);
    }
}
