#![allow(dead_code)]

use std::sync::Arc;

use cgvm_core::{CrystalModel, OpticalAxis, PdcConfig, PdcType, PumpPulse};

pub const ROOM_T: f64 = 24.5;

pub fn mgo_ln() -> Arc<CrystalModel> {
    Arc::new(CrystalModel::mgo_ln())
}

/// 740 nm e-pump, 1480 nm o-signal, 5 mm, room temperature.
pub fn walkoff_config() -> PdcConfig {
    PdcConfig::new(
        mgo_ln(),
        PdcType::TypeI,
        OpticalAxis::Extraordinary,
        OpticalAxis::Ordinary,
        0.740,
        ROOM_T,
        5e-3,
    )
    .unwrap()
}

pub fn walkoff_pump() -> PumpPulse {
    PumpPulse::new(0.740, 4.0, 12e-3, 100e6).unwrap()
}

/// cGVM design: 775 nm pump, 11 °C, 80 mm.
pub fn cgvm_config() -> PdcConfig {
    PdcConfig::new(
        mgo_ln(),
        PdcType::TypeI,
        OpticalAxis::Extraordinary,
        OpticalAxis::Ordinary,
        0.775,
        11.0,
        80e-3,
    )
    .unwrap()
}

pub fn cgvm_pump() -> PumpPulse {
    PumpPulse::new(0.775, 4.0, 12e-3, 100e6).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Published MgO:LN polynomial written out directly, λ in µm, T in °C.
pub fn gayer_index(extraordinary: bool, lambda: f64, t: f64) -> f64 {
    let (a, b) = if extraordinary {
        (
            [5.756, 0.0983, 0.2020, 189.32, 12.52, 1.32e-2],
            [2.860e-6, 4.700e-8, 6.113e-8, 1.516e-4],
        )
    } else {
        (
            [5.653, 0.1185, 0.2091, 89.61, 10.85, 1.97e-2],
            [7.941e-7, 3.134e-8, -4.641e-9, -2.188e-6],
        )
    };
    let f = (t - 24.5) * (t + 570.82);
    let l2 = lambda * lambda;
    (a[0]
        + b[0] * f
        + (a[1] + b[1] * f) / (l2 - (a[2] + b[2] * f).powi(2))
        + (a[3] + b[3] * f) / (l2 - a[4] * a[4])
        - a[5] * l2)
        .sqrt()
}

/// k(ω) in rad/m from the direct polynomial.
pub fn gayer_k(extraordinary: bool, omega: f64, t: f64) -> f64 {
    let c = 299_792_458.0;
    let lambda_um = 2.0 * std::f64::consts::PI * c / omega * 1e6;
    gayer_index(extraordinary, lambda_um, t) * omega / c
}

/// Sixth-order central differences of `f` at `x` with step `h`:
/// (first, second) derivative.
pub fn central_derivatives(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let v: Vec<f64> = (-3..=3).map(|i| f(x + i as f64 * h)).collect();
    let d1 = (-v[0] + 9.0 * v[1] - 45.0 * v[2] + 45.0 * v[4] - 9.0 * v[5] + v[6]) / (60.0 * h);
    let d2 = (2.0 * v[0] - 27.0 * v[1] + 270.0 * v[2] - 490.0 * v[3] + 270.0 * v[4] - 27.0 * v[5]
        + 2.0 * v[6])
        / (180.0 * h * h);
    (d1, d2)
}
