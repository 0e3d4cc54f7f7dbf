//! Analytic and harmonic Schwarzian derivatives, hyperbolic derivatives of
//! self-maps, and the weighted magnitude `|S_f(z)| (1 - |z|²)²`.

use num_complex::Complex64 as Complex;

use crate::catalog::{AnalyticMap, HarmonicMap};
use crate::error::{Error, Result};
use crate::jets::{Jet2, Jet3};

/// Below this value of `1 - |ω|²` the harmonic Schwarzian is treated as
/// singular and evaluation fails.
pub const SENSE_MARGIN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchwarzianSample {
    pub z: Complex,
    pub value: Complex,
    /// `|value| · (1 - |z|²)²`
    pub scaled: f64,
}

fn check_disk(z: Complex) -> Result<()> {
    if z.norm_sqr() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain(z))
    }
}

/// `Sf = f'''/f' - (3/2)(f''/f')²`.
pub fn schwarzian_analytic(j: &Jet3) -> Result<Complex> {
    schwarzian_from_derivative(&j.derivative())
}

/// Schwarzian from the jet of `f'`.
pub fn schwarzian_from_derivative(d: &Jet2) -> Result<Complex> {
    if d.f0.norm() == 0.0 {
        return Err(Error::NotLocallyUnivalent(d.at));
    }
    let p = d.f1 / d.f0;
    Ok(d.f2 / d.f0 - 1.5 * p * p)
}

/// Harmonic Schwarzian of a sense-preserving `f = h + conj(g)`:
///
/// `S_f = Sh + conj(ω)/(1-|ω|²) · (h''/h' · ω' - ω'') - (3/2) (ω' conj(ω)/(1-|ω|²))²`
///
/// with the jet of `ω` obtained by dividing the jets of `g'` and `h'`.
pub fn schwarzian_harmonic(f: &HarmonicMap, z: Complex) -> Result<SchwarzianSample> {
    check_disk(z)?;
    let (hd, gd) = f.derivative_jets(z)?;
    if hd.f0.norm() == 0.0 {
        return Err(Error::NotLocallyUnivalent(z));
    }
    let w = gd.div(&hd)?;
    let gap = 1.0 - w.f0.norm_sqr();
    if gap < SENSE_MARGIN {
        return Err(Error::NotSensePreserving { z, modulus: w.f0.norm() });
    }
    let sh = schwarzian_from_derivative(&hd)?;
    let pre = hd.f1 / hd.f0;
    let k = w.f0.conj() / gap;
    let t = w.f1 * k;
    let value = sh + k * (pre * w.f1 - w.f2) - 1.5 * t * t;
    if !value.is_finite() {
        return Err(Error::NonFinite(z));
    }
    let weight = 1.0 - z.norm_sqr();
    Ok(SchwarzianSample { z, value, scaled: value.norm() * weight * weight })
}

/// `|S_f(z)| (1 - |z|²)²`.
pub fn scaled_schwarzian(f: &HarmonicMap, z: Complex) -> Result<f64> {
    Ok(schwarzian_harmonic(f, z)?.scaled)
}

/// `ω*(z) = ω'(z)(1 - |z|²)/(1 - |ω(z)|²)` from `ω(z)` and `ω'(z)`.
pub fn hyperbolic_derivative_from(z: Complex, w: Complex, w1: Complex) -> Result<Complex> {
    check_disk(z)?;
    if w.norm_sqr() >= 1.0 {
        return Err(Error::OutOfDomain(w));
    }
    Ok(w1 * (1.0 - z.norm_sqr()) / (1.0 - w.norm_sqr()))
}

/// Hyperbolic derivative of an analytic self-map of the disk.
pub fn hyperbolic_derivative(omega: &AnalyticMap, z: Complex) -> Result<Complex> {
    check_disk(z)?;
    let j = omega.jet(z)?;
    hyperbolic_derivative_from(z, j.f0, j.f1)
}

/// Hyperbolic derivative of the dilatation of `f`.
pub fn dilatation_hyperbolic_derivative(f: &HarmonicMap, z: Complex) -> Result<Complex> {
    check_disk(z)?;
    let w = f.dilatation(z)?;
    hyperbolic_derivative_from(z, w.f0, w.f1)
}
