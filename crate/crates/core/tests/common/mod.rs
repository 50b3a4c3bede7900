#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use qubit_feedback::{CMat2, FeedbackSpec, PlanarModel, SystemParams};

pub fn rate() -> impl Strategy<Value = f64> {
    1e-3..=1.0f64
}

pub fn params() -> impl Strategy<Value = SystemParams<f64>> {
    (rate(), rate()).prop_map(|(a, b)| SystemParams::new(a, b).unwrap())
}

/// Random SU(2) element `[[a, -b*], [b, a*]]` from a point on S³.
pub fn su2() -> impl Strategy<Value = FeedbackSpec<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
        .prop_map(|(a, b, c, d)| {
            let n = (a * a + b * b + c * c + d * d).sqrt();
            let p = Complex64::new(a / n, b / n);
            let q = Complex64::new(c / n, d / n);
            FeedbackSpec::new(CMat2::new(p, -q.conj(), q, p.conj())).unwrap()
        })
}

pub fn feedback() -> impl Strategy<Value = FeedbackSpec<f64>> {
    prop_oneof![(0.0..std::f64::consts::PI).prop_map(FeedbackSpec::from_beta), su2()]
}

/// Planar models from the β family (always `f1 = 0`), or no feedback.
pub fn planar_model() -> impl Strategy<Value = PlanarModel<f64>> {
    (params(), prop::option::of(0.0..std::f64::consts::PI)).prop_map(|(p, beta)| match beta {
        Some(b) => PlanarModel::new(p, &FeedbackSpec::from_beta(b).raw()).unwrap(),
        None => PlanarModel::without_feedback(p),
    })
}

pub fn sample_model(beta: Option<f64>) -> PlanarModel<f64> {
    let p = SystemParams::new(0.4, 0.3).unwrap();
    match beta {
        Some(b) => PlanarModel::new(p, &FeedbackSpec::from_beta(b).raw()).unwrap(),
        None => PlanarModel::without_feedback(p),
    }
}
