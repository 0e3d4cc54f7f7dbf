//! Shared fixtures for the criterion benches.

use harmonorm::{make_extremal, make_harmonic_koebe, Complex, FamilyParams, HarmonicMap};

/// Maps exercised by the benches, labelled.
pub fn fixtures() -> Vec<(&'static str, HarmonicMap)> {
    let extremal = |lambda, r| make_extremal(FamilyParams::new(lambda, r).unwrap()).unwrap();
    vec![
        ("harmonic_koebe", make_harmonic_koebe()),
        ("extremal_1_0.9", extremal(1.0, 0.9)),
        ("extremal_6_1", extremal(6.0, 1.0)),
    ]
}

/// Deterministic sample points spread over the disk.
pub fn sample_points(n: usize) -> Vec<Complex> {
    (0..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            Complex::from_polar(0.95 * t.sqrt(), 2.399_963 * k as f64)
        })
        .collect()
}
