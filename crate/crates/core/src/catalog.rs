//! Analytic and harmonic maps of the unit disk, with closed-form jets.
//!
//! An [`AnalyticMap`] is a small expression tree. Leaves are the named maps
//! (Möbius transformations, disk automorphisms, generalized Koebe functions,
//! lens maps, the Koebe and strip maps); interior nodes are linear
//! combinations, products, quotients, real powers, compositions and
//! primitives. Every node evaluates to a [`Jet3`] by jet arithmetic and to a
//! [`Series`] by truncated power-series arithmetic, so the two routes can be
//! checked against each other.
//!
//! A [`HarmonicMap`] is a pair `(h, g)` standing for `f = h + conj(g)`.

use num_complex::Complex64 as Complex;

use crate::error::{Error, Result};
use crate::jets::{Jet2, Jet3, Series};
use crate::quadrature;

/// Tolerance for the normalization flags `h(0) = g(0) = 0`, `h'(0) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn one() -> Complex {
    c(1.0, 0.0)
}

fn zero() -> Complex {
    c(0.0, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticMap {
    Identity,
    Constant(Complex),
    /// `(a z + b) / (c z + d)`, `ad - bc ≠ 0`.
    Mobius {
        a: Complex,
        b: Complex,
        c: Complex,
        d: Complex,
    },
    /// `σ_α(z) = (α + z) / (1 + conj(α) z)`.
    Automorphism { alpha: Complex },
    /// `((1+z)/(1-z))^a - 1) / (2a)`.
    GeneralizedKoebe { a: f64 },
    /// `(ℓ^R - 1) / (ℓ^R + 1)` with `ℓ = (1+z)/(1-z)`.
    Lens { r: f64 },
    /// `z / (1-z)^2`.
    AnalyticKoebe,
    /// `½ log((1+z)/(1-z))`.
    Strip,
    /// Coefficients in increasing degree.
    Polynomial(Vec<Complex>),
    /// Principal real power of a map with values in the right half-plane.
    Power { base: Box<AnalyticMap>, exponent: f64 },
    Combination {
        terms: Vec<(Complex, AnalyticMap)>,
        constant: Complex,
    },
    Product(Box<AnalyticMap>, Box<AnalyticMap>),
    Quotient(Box<AnalyticMap>, Box<AnalyticMap>),
    Compose {
        outer: Box<AnalyticMap>,
        inner: Box<AnalyticMap>,
    },
    /// `z ↦ ∫_0^z F`, valued by Gauss–Legendre quadrature along `[0, z]`.
    Primitive(Box<AnalyticMap>),
    /// Values from `value`, derivatives from `derivative`. The two must
    /// describe the same function; used where a closed form loses accuracy
    /// once differentiated.
    Split {
        value: Box<AnalyticMap>,
        derivative: Box<AnalyticMap>,
    },
}

/// Jet of `ℓ(z) = (1+z)/(1-z)`.
fn half_plane_jet(z: Complex) -> Result<Jet3> {
    let id = Jet3::identity(z);
    id.add_const(one()).div(&(-id).add_const(one()))
}

fn half_plane_series(n: usize) -> Result<Series> {
    let z = Series::identity(n);
    Series::constant(n, one())
        .add(&z)
        .div(&Series::constant(n, one()).sub(&z))
}

fn polynomial_jet(coeffs: &[Complex], z: Complex) -> Jet3 {
    let id = Jet3::identity(z);
    let mut acc = Jet3::constant(z, zero());
    for &a in coeffs.iter().rev() {
        acc = (acc * id).add_const(a);
    }
    acc
}

impl AnalyticMap {
    pub fn mobius(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        if (a * d - b * c).norm() == 0.0 {
            return Err(Error::InvalidParameter("Möbius map needs ad - bc ≠ 0".into()));
        }
        Ok(AnalyticMap::Mobius { a, b, c, d })
    }

    pub fn automorphism(alpha: Complex) -> Result<Self> {
        if alpha.norm() >= 1.0 {
            return Err(Error::OutOfDomain(alpha));
        }
        Ok(AnalyticMap::Automorphism { alpha })
    }

    /// Linear polynomial `c0 + c1 z`.
    pub fn linear(c0: Complex, c1: Complex) -> Self {
        AnalyticMap::Polynomial(vec![c0, c1])
    }

    pub fn power(base: AnalyticMap, exponent: f64) -> Self {
        AnalyticMap::Power { base: Box::new(base), exponent }
    }

    pub fn product(x: AnalyticMap, y: AnalyticMap) -> Self {
        AnalyticMap::Product(Box::new(x), Box::new(y))
    }

    pub fn quotient(x: AnalyticMap, y: AnalyticMap) -> Self {
        AnalyticMap::Quotient(Box::new(x), Box::new(y))
    }

    pub fn compose(outer: AnalyticMap, inner: AnalyticMap) -> Self {
        AnalyticMap::Compose { outer: Box::new(outer), inner: Box::new(inner) }
    }

    pub fn primitive(f: AnalyticMap) -> Self {
        AnalyticMap::Primitive(Box::new(f))
    }

    /// `scale · self + offset`.
    pub fn affine(self, scale: Complex, offset: Complex) -> Self {
        AnalyticMap::Combination { terms: vec![(scale, self)], constant: offset }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AnalyticMap::Identity => "identity",
            AnalyticMap::Mobius { .. } => "mobius",
            AnalyticMap::Automorphism { .. } => "automorphism",
            AnalyticMap::GeneralizedKoebe { .. } => "generalized_koebe",
            AnalyticMap::Lens { .. } => "lens",
            AnalyticMap::AnalyticKoebe => "analytic_koebe",
            AnalyticMap::Strip => "strip",
            _ => "derived",
        }
    }

    /// Value and first three derivatives at `z`.
    pub fn jet(&self, z: Complex) -> Result<Jet3> {
        let j = match self {
            AnalyticMap::Identity => Jet3::identity(z),
            AnalyticMap::Constant(k) => Jet3::constant(z, *k),
            AnalyticMap::Mobius { a, b, c, d } => mobius_jet(*a, *b, *c, *d, z)?,
            AnalyticMap::Automorphism { alpha } => mobius_jet(one(), *alpha, alpha.conj(), one(), z)?,
            AnalyticMap::GeneralizedKoebe { a } => {
                let w = half_plane_jet(z)?.powf(*a)?;
                w.add_const(-one()).scale(c(0.5 / a, 0.0))
            }
            AnalyticMap::Lens { r } => {
                let w = half_plane_jet(z)?.powf(*r)?;
                w.add_const(-one()).div(&w.add_const(one()))?
            }
            AnalyticMap::AnalyticKoebe => {
                let u = one() - z;
                let u2 = u * u;
                Jet3::new(
                    z,
                    z / u2,
                    (one() + z) / (u2 * u),
                    (4.0 + 2.0 * z) / (u2 * u2),
                    (18.0 + 6.0 * z) / (u2 * u2 * u),
                )
            }
            AnalyticMap::Strip => {
                let ell = (one() + z) / (one() - z);
                if ell.re <= 0.0 || !ell.is_finite() {
                    return Err(Error::BranchViolation(ell));
                }
                let q = one() - z * z;
                Jet3::new(
                    z,
                    0.5 * ell.ln(),
                    1.0 / q,
                    2.0 * z / (q * q),
                    (2.0 + 6.0 * z * z) / (q * q * q),
                )
            }
            AnalyticMap::Polynomial(coeffs) => polynomial_jet(coeffs, z),
            AnalyticMap::Power { base, exponent } => base.jet(z)?.powf(*exponent)?,
            AnalyticMap::Combination { terms, constant } => {
                let mut acc = Jet3::constant(z, *constant);
                for (k, map) in terms {
                    acc = acc + map.jet(z)?.scale(*k);
                }
                acc
            }
            AnalyticMap::Product(x, y) => x.jet(z)? * y.jet(z)?,
            AnalyticMap::Quotient(x, y) => {
                let den = y.jet(z)?;
                x.jet(z)?.div(&den)?
            }
            AnalyticMap::Compose { outer, inner } => {
                let gi = inner.jet(z)?;
                let fo = outer.jet(gi.f0)?;
                Jet3::compose(&fo, &gi)?
            }
            AnalyticMap::Primitive(f) => {
                let d = f.jet(z)?;
                let v = primitive_value(f, z)?;
                Jet3::new(z, v, d.f0, d.f1, d.f2)
            }
            AnalyticMap::Split { value, derivative } => {
                let d = derivative.jet(z)?;
                Jet3::new(z, value.value(z)?, d.f0, d.f1, d.f2)
            }
        };
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::NonFinite(z))
        }
    }

    /// Jet of the derivative `f'` at `z`. Avoids computing values that the
    /// derivative does not depend on, so primitives never hit quadrature here.
    pub fn derivative_jet(&self, z: Complex) -> Result<Jet2> {
        let j = match self {
            AnalyticMap::Constant(_) => Jet2::constant(z, zero()),
            AnalyticMap::Combination { terms, .. } => {
                let mut acc = Jet2::constant(z, zero());
                for (k, map) in terms {
                    acc = acc + map.derivative_jet(z)?.scale(*k);
                }
                acc
            }
            AnalyticMap::Compose { outer, inner } => {
                let gi = inner.jet(z)?;
                let fo = outer.derivative_jet(gi.f0)?;
                Jet2::compose(&fo, &gi.truncate())? * gi.derivative()
            }
            AnalyticMap::Primitive(f) | AnalyticMap::Split { derivative: f, .. } => {
                f.jet(z)?.truncate()
            }
            _ => self.jet(z)?.derivative(),
        };
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::NonFinite(z))
        }
    }

    pub fn value(&self, z: Complex) -> Result<Complex> {
        match self {
            AnalyticMap::Primitive(f) => primitive_value(f, z),
            AnalyticMap::Split { value, .. } => value.value(z),
            AnalyticMap::Combination { terms, constant } => {
                let mut acc = *constant;
                for (k, map) in terms {
                    acc += k * map.value(z)?;
                }
                Ok(acc)
            }
            AnalyticMap::Compose { outer, inner } => outer.value(inner.value(z)?),
            _ => Ok(self.jet(z)?.f0),
        }
    }

    /// First `order + 1` Taylor coefficients at the origin.
    pub fn series(&self, order: usize) -> Result<Series> {
        let n = order;
        let s = match self {
            AnalyticMap::Identity => Series::identity(n),
            AnalyticMap::Constant(k) => Series::constant(n, *k),
            AnalyticMap::Mobius { a, b, c, d } => {
                Series::from_coeffs(n, &[*b, *a]).div(&Series::from_coeffs(n, &[*d, *c]))?
            }
            AnalyticMap::Automorphism { alpha } => Series::from_coeffs(n, &[*alpha, one()])
                .div(&Series::from_coeffs(n, &[one(), alpha.conj()]))?,
            AnalyticMap::GeneralizedKoebe { a } => {
                let w = half_plane_series(n)?.powf(*a)?;
                w.sub(&Series::constant(n, one())).scale(c(0.5 / a, 0.0))
            }
            AnalyticMap::Lens { r } => {
                let w = half_plane_series(n)?.powf(*r)?;
                w.sub(&Series::constant(n, one()))
                    .div(&w.add(&Series::constant(n, one())))?
            }
            AnalyticMap::AnalyticKoebe => {
                let u = Series::from_coeffs(n, &[one(), -one()]);
                Series::identity(n).div(&u.mul(&u))?
            }
            AnalyticMap::Strip => half_plane_series(n)?.ln()?.scale(c(0.5, 0.0)),
            AnalyticMap::Polynomial(coeffs) => Series::from_coeffs(n, coeffs),
            AnalyticMap::Power { base, exponent } => base.series(n)?.powf(*exponent)?,
            AnalyticMap::Combination { terms, constant } => {
                let mut acc = Series::constant(n, *constant);
                for (k, map) in terms {
                    acc = acc.add(&map.series(n)?.scale(*k));
                }
                acc
            }
            AnalyticMap::Product(x, y) => x.series(n)?.mul(&y.series(n)?),
            AnalyticMap::Quotient(x, y) => x.series(n)?.div(&y.series(n)?)?,
            AnalyticMap::Compose { outer, inner } => {
                Series::compose(&outer.series(n)?, &inner.series(n)?)?
            }
            AnalyticMap::Primitive(f) => f.series(n)?.integrate(),
            AnalyticMap::Split { value, .. } => value.series(n)?,
        };
        Ok(s)
    }
}

/// Free-function form of [`AnalyticMap::series`].
pub fn series_coeffs(map: &AnalyticMap, order: usize) -> Result<Series> {
    map.series(order)
}

fn mobius_jet(a: Complex, b: Complex, cc: Complex, d: Complex, z: Complex) -> Result<Jet3> {
    let den = cc * z + d;
    if den.norm() == 0.0 {
        return Err(Error::DivisionByZero(den));
    }
    let det = a * d - b * cc;
    let r = 1.0 / den;
    let r2 = r * r;
    Ok(Jet3::new(
        z,
        (a * z + b) * r,
        det * r2,
        -2.0 * cc * det * r2 * r,
        6.0 * cc * cc * det * r2 * r2,
    ))
}

fn primitive_value(f: &AnalyticMap, z: Complex) -> Result<Complex> {
    if z.norm() == 0.0 {
        return Ok(zero());
    }
    quadrature::segment(zero(), z, |t| f.value(t))
}

/// `φ_a`, the generalized Koebe function.
pub fn make_phi_a(a: f64) -> Result<AnalyticMap> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("generalized Koebe needs a > 0, got {a}")));
    }
    Ok(AnalyticMap::GeneralizedKoebe { a })
}

/// `φ_a' = (1+z)^(a-1) (1-z)^(-a-1)` as a closed-form tree.
pub fn phi_a_derivative(a: f64) -> Result<AnalyticMap> {
    make_phi_a(a)?;
    Ok(AnalyticMap::product(
        AnalyticMap::power(AnalyticMap::linear(one(), one()), a - 1.0),
        AnalyticMap::power(AnalyticMap::linear(one(), -one()), -a - 1.0),
    ))
}

/// Lens map `ℓ_R`; exactly the identity at `R = 1`.
pub fn make_lens(r: f64) -> Result<AnalyticMap> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidParameter(format!("lens map needs 0 < R ≤ 1, got {r}")));
    }
    if r == 1.0 {
        Ok(AnalyticMap::Identity)
    } else {
        Ok(AnalyticMap::Lens { r })
    }
}

/// A sense-preserving harmonic map `f = h + conj(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicMap {
    pub h: AnalyticMap,
    pub g: AnalyticMap,
    /// `h(0) = g(0) = 0` and `h'(0) = 1`.
    pub normalized: bool,
    /// Cached dilatation `ω(0) = g'(0)/h'(0)`.
    pub omega0: Complex,
}

impl HarmonicMap {
    pub fn new(h: AnalyticMap, g: AnalyticMap) -> Result<Self> {
        let o = zero();
        let hd = h.derivative_jet(o)?;
        let gd = g.derivative_jet(o)?;
        if hd.f0.norm() == 0.0 {
            return Err(Error::NotLocallyUnivalent(o));
        }
        let omega0 = gd.f0 / hd.f0;
        if omega0.norm() >= 1.0 {
            return Err(Error::NotSensePreserving { z: o, modulus: omega0.norm() });
        }
        let normalized = h.value(o)?.norm() < NORMALIZATION_TOL
            && g.value(o)?.norm() < NORMALIZATION_TOL
            && (hd.f0 - one()).norm() < NORMALIZATION_TOL;
        Ok(HarmonicMap { h, g, normalized, omega0 })
    }

    /// `g ≡ 0`.
    pub fn analytic(h: AnalyticMap) -> Result<Self> {
        HarmonicMap::new(h, AnalyticMap::Constant(zero()))
    }

    /// `f(z) = h(z) + conj(g(z))`.
    pub fn value(&self, z: Complex) -> Result<Complex> {
        Ok(self.h.value(z)? + self.g.value(z)?.conj())
    }

    /// Jets of `h'` and `g'` at `z`.
    pub fn derivative_jets(&self, z: Complex) -> Result<(Jet2, Jet2)> {
        Ok((self.h.derivative_jet(z)?, self.g.derivative_jet(z)?))
    }

    /// Jet of the dilatation `ω = g'/h'` at `z`.
    pub fn dilatation(&self, z: Complex) -> Result<Jet2> {
        let (hd, gd) = self.derivative_jets(z)?;
        if hd.f0.norm() == 0.0 {
            return Err(Error::NotLocallyUnivalent(z));
        }
        gd.div(&hd)
    }
}

/// Harmonic Koebe function: the shear of `z/(1-z)^2` with dilatation `z`,
/// `h = (z - z²/2 + z³/6)/(1-z)³`, `g = (z²/2 + z³/6)/(1-z)³`.
pub fn make_harmonic_koebe() -> HarmonicMap {
    let den = AnalyticMap::Polynomial(vec![one(), c(-3.0, 0.0), c(3.0, 0.0), -one()]);
    let h = AnalyticMap::quotient(
        AnalyticMap::Polynomial(vec![zero(), one(), c(-0.5, 0.0), c(1.0 / 6.0, 0.0)]),
        den.clone(),
    );
    let g = AnalyticMap::quotient(
        AnalyticMap::Polynomial(vec![zero(), zero(), c(0.5, 0.0), c(1.0 / 6.0, 0.0)]),
        den,
    );
    // h' = (1+z)/(1-z)^4 vanishes at -1; the quotient rule cancels there
    let pole = AnalyticMap::power(AnalyticMap::Polynomial(vec![one(), -one()]), -4.0);
    let hp = AnalyticMap::product(AnalyticMap::Polynomial(vec![one(), one()]), pole);
    let gp = AnalyticMap::product(AnalyticMap::Identity, hp.clone());
    HarmonicMap::new(
        AnalyticMap::Split { value: Box::new(h), derivative: Box::new(hp) },
        AnalyticMap::Split { value: Box::new(g), derivative: Box::new(gp) },
    )
    .expect("harmonic Koebe function is normalized at the origin")
}

/// `f_r = z + ½ r conj(z)²`.
pub fn make_f_r(r: f64) -> Result<HarmonicMap> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("f_r needs 0 ≤ r ≤ 1, got {r}")));
    }
    let g = if r == 0.0 {
        AnalyticMap::Constant(zero())
    } else {
        AnalyticMap::Polynomial(vec![zero(), zero(), c(0.5 * r, 0.0)])
    };
    HarmonicMap::new(AnalyticMap::Identity, g)
}

/// Parameters `(λ, R, a)` of the extremal construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub lambda: f64,
    pub r: f64,
    pub a: f64,
}

impl FamilyParams {
    /// `a = sqrt(λ/2 + 1 + R²/2) - R/2`.
    pub fn new(lambda: f64, r: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("λ must be ≥ 0, got {lambda}")));
        }
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!("R must lie in [0, 1], got {r}")));
        }
        let a = (lambda / 2.0 + 1.0 + r * r / 2.0).sqrt() - r / 2.0;
        if lambda > 0.0 && a + r <= 1.0 {
            return Err(Error::ConsistencyError(format!("a + R = {} ≤ 1", a + r)));
        }
        Ok(FamilyParams { lambda, r, a })
    }

    /// `√(λ/2 + 1 + R²/2)`, the value of `½ h₀''(0)`.
    pub fn half_order(&self) -> f64 {
        (self.lambda / 2.0 + 1.0 + self.r * self.r / 2.0).sqrt()
    }
}

/// Extremal map `f₀ = h₀ + conj(g₀)` solving `h₀ - g₀ = φ_a`, `g₀'/h₀' = ℓ_R`,
/// with `h₀(0) = g₀(0) = 0`. Derivatives are closed form:
/// `h₀' = φ_a' / (1 - ℓ_R)` and `g₀' = ℓ_R h₀'`.
pub fn make_extremal(p: FamilyParams) -> Result<HarmonicMap> {
    if p.lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "extremal construction needs λ > 0, got {}",
            p.lambda
        )));
    }
    let lens = if p.r == 0.0 { AnalyticMap::Constant(zero()) } else { make_lens(p.r)? };
    let one_minus_lens = lens.clone().affine(-one(), one());
    let hp = AnalyticMap::quotient(phi_a_derivative(p.a)?, one_minus_lens);
    let gp = AnalyticMap::product(lens, hp.clone());
    HarmonicMap::new(AnalyticMap::primitive(hp), AnalyticMap::primitive(gp))
}

/// Koebe transform `K_ζ(f) = (f∘σ_ζ - f(ζ)) / ((1-|ζ|²) h'(ζ))`.
pub fn koebe_transform(f: &HarmonicMap, zeta: Complex) -> Result<HarmonicMap> {
    if zeta.norm() >= 1.0 {
        return Err(Error::OutOfDomain(zeta));
    }
    if zeta == zero() {
        return Ok(f.clone());
    }
    let w = f.dilatation(zeta)?;
    if w.f0.norm() >= 1.0 {
        return Err(Error::NotSensePreserving { z: zeta, modulus: w.f0.norm() });
    }
    let hz = f.h.jet(zeta)?;
    let gz = f.g.value(zeta)?;
    let scale = (1.0 - zeta.norm_sqr()) * hz.f1;
    let sigma = AnalyticMap::automorphism(zeta)?;
    let h = AnalyticMap::compose(f.h.clone(), sigma.clone()).affine(1.0 / scale, -hz.f0 / scale);
    let sc = scale.conj();
    let g = AnalyticMap::compose(f.g.clone(), sigma).affine(1.0 / sc, -gz / sc);
    HarmonicMap::new(h, g)
}

/// Affine change `A_ε(f) = (f - conj(ε f)) / (1 - conj(ε) g'(0))`:
/// `H = (h - conj(ε) g)/D`, `G = (g - ε h)/conj(D)`, `D = 1 - conj(ε) g'(0)`.
pub fn affine_change(f: &HarmonicMap, eps: Complex) -> Result<HarmonicMap> {
    if eps.norm() >= 1.0 {
        return Err(Error::OutOfDomain(eps));
    }
    if eps == zero() {
        return Ok(f.clone());
    }
    let g1 = f.g.derivative_jet(zero())?.f0;
    let d = one() - eps.conj() * g1;
    if d.norm() == 0.0 {
        return Err(Error::DivisionByZero(d));
    }
    let h = AnalyticMap::Combination {
        terms: vec![(1.0 / d, f.h.clone()), (-eps.conj() / d, f.g.clone())],
        constant: zero(),
    };
    let dc = d.conj();
    let g = AnalyticMap::Combination {
        terms: vec![(1.0 / dc, f.g.clone()), (-eps / dc, f.h.clone())],
        constant: zero(),
    };
    HarmonicMap::new(h, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::fd_oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_disk(rng: &mut ChaCha8Rng, rmax: f64) -> Complex {
        let r = rmax * rng.gen::<f64>().sqrt();
        let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        Complex::from_polar(r, t)
    }

    fn close(a: Complex, b: Complex, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn phi_a_normalization_and_second_derivative() {
        for lambda in [0.5, 1.5, 6.0, 9.5] {
            let a = (1.0 + lambda / 2.0f64).sqrt();
            let j = make_phi_a(a).unwrap().jet(zero()).unwrap();
            assert!(j.f0.norm() < 1e-15);
            assert!((j.f1 - one()).norm() < 1e-15);
            assert!((0.5 * j.f2.norm() - a).abs() < 1e-14);
        }
        assert!(make_phi_a(0.0).is_err());
        assert!(make_phi_a(-1.0).is_err());
    }

    #[test]
    fn phi_two_is_the_koebe_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phi = make_phi_a(2.0).unwrap();
        for _ in 0..10 {
            let z = random_disk(&mut rng, 0.95);
            let expected = z / ((one() - z) * (one() - z));
            assert!(close(phi.value(z).unwrap(), expected, 1e-12));
        }
    }

    #[test]
    fn phi_a_jet_matches_high_precision_oracle() {
        // mpmath, 40 digits, numerical differentiation of the closed form
        let j = make_phi_a(1.7).unwrap().jet(c(0.2, -0.3)).unwrap();
        let expected = [
            c(-0.0083911502472135822474, -0.47191860148371494973),
            c(0.74089068333072953211, -1.6127905971850651357),
            c(1.0308166431612656553, -6.377939691886702101),
            c(-5.0894629108175008361, -29.18016411694256984),
        ];
        for (g, e) in [j.f0, j.f1, j.f2, j.f3].iter().zip(expected) {
            assert!(close(*g, e, 1e-13), "{g} vs {e}");
        }
    }

    #[test]
    fn lens_jet_matches_high_precision_oracle() {
        let j = make_lens(0.6).unwrap().jet(c(0.25, 0.5)).unwrap();
        let expected = [
            c(0.13031607949928447529, 0.29434762257533279676),
            c(0.52533574357370400127, 0.071834999640154155569),
            c(0.046225514189144351135, 0.31664717701273680976),
            c(0.12885362519240698414, 0.36089845996799588001),
        ];
        for (g, e) in [j.f0, j.f1, j.f2, j.f3].iter().zip(expected) {
            assert!(close(*g, e, 1e-13), "{g} vs {e}");
        }
    }

    #[test]
    fn lens_basics() {
        assert_eq!(make_lens(1.0).unwrap(), AnalyticMap::Identity);
        for r in [0.1, 0.5, 0.9] {
            let lens = make_lens(r).unwrap();
            let j = lens.jet(zero()).unwrap();
            assert!(j.f0.norm() < 1e-16);
            assert!((j.f1 - c(r, 0.0)).norm() < 1e-15);
            let fd = fd_oracle(&lens, zero(), 1e-3).unwrap();
            assert!((fd.f1 - c(r, 0.0)).norm() < 1e-9);
        }
        assert!(make_lens(0.0).is_err());
        assert!(make_lens(1.5).is_err());
    }

    #[test]
    fn fd_oracle_identity_and_koebe() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let z = random_disk(&mut rng, 0.9);
            let fd = fd_oracle(&AnalyticMap::Identity, z, 1e-3).unwrap();
            assert!((fd.f1 - one()).norm() < 1e-8);
        }
        let fd = fd_oracle(&make_phi_a(2.0).unwrap(), zero(), 1e-3).unwrap();
        assert!((fd.f2 - c(4.0, 0.0)).norm() < 1e-6);
    }

    fn catalog_maps() -> Vec<AnalyticMap> {
        let hk = make_harmonic_koebe();
        let ext = make_extremal(FamilyParams::new(1.0, 0.9).unwrap()).unwrap();
        vec![
            AnalyticMap::Identity,
            AnalyticMap::mobius(c(1.0, 0.5), c(0.2, 0.0), c(0.3, -0.1), c(2.0, 0.0)).unwrap(),
            AnalyticMap::automorphism(c(0.3, 0.4)).unwrap(),
            make_phi_a(1.3).unwrap(),
            make_phi_a(2.6).unwrap(),
            make_lens(0.4).unwrap(),
            AnalyticMap::AnalyticKoebe,
            AnalyticMap::Strip,
            phi_a_derivative(1.8).unwrap(),
            hk.h,
            hk.g,
            ext.h,
            ext.g,
        ]
    }

    #[test]
    fn jets_agree_with_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for map in catalog_maps() {
            for _ in 0..100 {
                let z = random_disk(&mut rng, 0.6);
                let j = map.jet(z).unwrap();
                let fd = fd_oracle(&map, z, 2e-3).unwrap();
                let rel = |a: Complex, b: Complex| (a - b).norm() / b.norm().max(1.0);
                assert!(rel(fd.f1, j.f1) < 1e-6, "{map:?} f1 at {z}");
                assert!(rel(fd.f2, j.f2) < 1e-6, "{map:?} f2 at {z}");
                assert!(rel(fd.f3, j.f3) < 1e-4, "{map:?} f3 at {z}");
            }
        }
    }

    #[test]
    fn derivative_jet_matches_full_jet() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = make_extremal(FamilyParams::new(6.0, 1.0).unwrap()).unwrap();
        let k = koebe_transform(&f, c(0.3, -0.2)).unwrap();
        for map in catalog_maps().into_iter().chain([k.h, k.g]) {
            for _ in 0..5 {
                let z = random_disk(&mut rng, 0.7);
                let full = map.jet(z).unwrap().derivative();
                let d = map.derivative_jet(z).unwrap();
                assert!(close(d.f0, full.f0, 1e-12));
                assert!(close(d.f1, full.f1, 1e-12));
                assert!(close(d.f2, full.f2, 1e-11));
            }
        }
    }

    #[test]
    fn series_agrees_with_jets_at_origin() {
        for map in catalog_maps() {
            let s = map.series(6).unwrap();
            let j = map.jet(zero()).unwrap();
            assert!(close(s.coeffs[0], j.f0, 1e-12), "{map:?}");
            assert!(close(s.coeffs[1], j.f1, 1e-12), "{map:?}");
            assert!(close(s.coeffs[2] * 2.0, j.f2, 1e-12), "{map:?}");
            assert!(close(s.coeffs[3] * 6.0, j.f3, 1e-12), "{map:?}");
        }
    }

    #[test]
    fn phi_two_series_is_koebe() {
        let s = series_coeffs(&make_phi_a(2.0).unwrap(), 16).unwrap();
        for (n, a) in s.coeffs.iter().enumerate() {
            assert!((a - c(n as f64, 0.0)).norm() < 1e-10, "n={n}: {a}");
        }
    }

    #[test]
    fn harmonic_koebe_coefficients_and_dilatation() {
        let k = make_harmonic_koebe();
        assert!(k.normalized);
        let j = k.h.jet(zero()).unwrap();
        assert_eq!(j.f2 / 2.0, c(2.5, 0.0));
        let s = k.h.series(8).unwrap();
        assert!((s.coeffs[3] - c(14.0 / 3.0, 0.0)).norm() < 1e-13);
        let z = c(0.3, 0.2);
        assert!((k.dilatation(z).unwrap().f0 - z).norm() < 1e-14);
        // h - g is the Koebe function
        let diff = k.h.value(z).unwrap() - k.g.value(z).unwrap();
        assert!((diff - z / ((one() - z) * (one() - z))).norm() < 1e-14);
    }

    #[test]
    fn harmonic_koebe_derivatives_near_minus_one() {
        let k = make_harmonic_koebe();
        for eps in [1e-3, 1e-5, 1e-7] {
            let z = c(eps - 1.0, 0.0);
            let u = one() - z;
            let d = k.h.derivative_jet(z).unwrap();
            let exact = (one() + z) / u.powi(4);
            assert!((d.f0 - exact).norm() <= 1e-13 * exact.norm());
            assert!((k.dilatation(z).unwrap().f0 - z).norm() < 1e-15);
        }
        let v = c(0.2, -0.4);
        assert!(close(k.h.jet(v).unwrap().f1, k.h.derivative_jet(v).unwrap().f0, 1e-14));
    }

    #[test]
    fn f_r_structure() {
        let f = make_f_r(1.0).unwrap();
        assert!(f.normalized);
        let z = c(0.1, -0.4);
        assert!((f.dilatation(z).unwrap().f0 - z).norm() < 1e-15);
        let f0 = make_f_r(0.0).unwrap();
        let gj = f0.g.jet(z).unwrap();
        assert_eq!([gj.f0, gj.f1, gj.f2, gj.f3], [zero(); 4]);
        let fh = make_f_r(0.35).unwrap();
        assert!((fh.dilatation(z).unwrap().f0 - 0.35 * z).norm() < 1e-15);
        assert!(make_f_r(1.2).is_err());
        assert!(make_f_r(-0.1).is_err());
    }

    #[test]
    fn family_params_invariants() {
        for (lambda, r) in [(1.0, 0.9), (1.5, 1.0), (6.0, 1.0), (9.5, 1.0), (0.2, 0.7)] {
            let p = FamilyParams::new(lambda, r).unwrap();
            let a = (lambda / 2.0 + 1.0 + r * r / 2.0).sqrt() - r / 2.0;
            assert!((p.a - a).abs() < 1e-12);
            assert!(p.a + p.r > 1.0);
        }
        assert_eq!(FamilyParams::new(9.5, 1.0).unwrap().a, 2.0);
        assert_eq!(FamilyParams::new(1.5, 1.0).unwrap().a, 1.0);
        assert!((FamilyParams::new(1.0, 0.9).unwrap().a - 0.930217374184226094701765807921).abs() < 1e-15);
        assert!(FamilyParams::new(-1.0, 0.5).is_err());
        assert!(FamilyParams::new(1.0, 1.1).is_err());
    }

    #[test]
    fn extremal_at_nineteen_halves_is_harmonic_koebe() {
        let f0 = make_extremal(FamilyParams::new(9.5, 1.0).unwrap()).unwrap();
        let k = make_harmonic_koebe();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let z = random_disk(&mut rng, 0.9);
            let (h0, g0) = f0.derivative_jets(z).unwrap();
            let (hk, gk) = k.derivative_jets(z).unwrap();
            for (x, y) in [(h0.f0, hk.f0), (h0.f1, hk.f1), (h0.f2, hk.f2), (g0.f0, gk.f0)] {
                assert!(close(x, y, 1e-10), "{x} vs {y} at {z}");
            }
            assert!(close(f0.value(z).unwrap(), k.value(z).unwrap(), 1e-10));
        }
    }

    #[test]
    fn extremal_normalization_and_second_coefficient() {
        for (lambda, r) in [(1.0, 0.9), (1.5, 1.0), (6.0, 1.0), (0.4, 0.3)] {
            let p = FamilyParams::new(lambda, r).unwrap();
            let f = make_extremal(p).unwrap();
            assert!(f.normalized);
            assert!(f.omega0.norm() < 1e-15);
            let hd = f.h.derivative_jet(zero()).unwrap();
            assert!((hd.f1 - c(2.0 * p.a + r, 0.0)).norm() < 1e-13);
        }
        assert!(make_extremal(FamilyParams::new(0.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn extremal_value_by_quadrature() {
        // mpmath quadrature of h₀' along [0, 0.5i] for λ = 1, R = 0.9
        let f = make_extremal(FamilyParams::new(1.0, 0.9).unwrap()).unwrap();
        let v = f.h.value(c(0.0, 0.5)).unwrap();
        assert!(close(v, c(-0.24774580081547539929, 0.33963311856319577011), 1e-13));
    }

    #[test]
    fn koebe_transform_normalizes() {
        let f = make_extremal(FamilyParams::new(1.0, 0.9).unwrap()).unwrap();
        assert_eq!(koebe_transform(&f, zero()).unwrap(), f);
        for zeta in [c(0.3, 0.1), c(-0.5, 0.4), c(0.0, -0.8)] {
            let k = koebe_transform(&f, zeta).unwrap();
            assert!(k.normalized, "{zeta}");
        }
        assert!(matches!(koebe_transform(&f, c(1.0, 0.0)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn koebe_sweep_of_phi_a_reaches_order() {
        let a = 1.8;
        let f = HarmonicMap::analytic(make_phi_a(a).unwrap()).unwrap();
        let mut best: f64 = 0.0;
        for i in 0..24 {
            for j in 0..16 {
                let zeta = Complex::from_polar(0.95 * i as f64 / 24.0, j as f64 * std::f64::consts::PI / 8.0);
                let k = koebe_transform(&f, zeta).unwrap();
                let a2 = 0.5 * k.h.derivative_jet(zero()).unwrap().f1.norm();
                assert!(a2 <= a + 1e-9);
                best = best.max(a2);
            }
        }
        assert!((best - a).abs() < 1e-4);
    }

    #[test]
    fn affine_change_normalizes_and_rotates_dilatation() {
        let f = make_extremal(FamilyParams::new(1.0, 0.9).unwrap()).unwrap();
        assert_eq!(affine_change(&f, zero()).unwrap(), f);
        let alpha = c(0.3, -0.45);
        let fa = affine_change(&f, -alpha).unwrap();
        assert!((fa.h.derivative_jet(zero()).unwrap().f0 - one()).norm() < 1e-15);
        let sigma = AnalyticMap::automorphism(alpha).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let z = random_disk(&mut rng, 0.9);
            let w = f.dilatation(z).unwrap().f0;
            let wa = fa.dilatation(z).unwrap().f0;
            assert!((wa - sigma.value(w).unwrap()).norm() < 1e-12);
        }
        assert!(matches!(affine_change(&f, c(0.0, 1.0)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn koebe_then_affine_kills_dilatation_at_origin() {
        let f = make_extremal(FamilyParams::new(6.0, 1.0).unwrap()).unwrap();
        for zeta in [c(0.4, 0.2), c(-0.6, -0.3)] {
            let k = koebe_transform(&f, zeta).unwrap();
            let g = affine_change(&k, k.omega0).unwrap();
            assert!(g.omega0.norm() < 1e-12);
            assert!(g.normalized);
        }
    }

    #[test]
    fn second_coefficient_of_g_equals_dilatation_derivative() {
        let maps = [
            make_extremal(FamilyParams::new(1.0, 0.9).unwrap()).unwrap(),
            make_harmonic_koebe(),
            make_f_r(0.6).unwrap(),
        ];
        for f in maps {
            let g2 = f.g.derivative_jet(zero()).unwrap().f1;
            let w1 = f.dilatation(zero()).unwrap().f1;
            assert!((g2 - w1).norm() < 1e-13);
        }
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(AnalyticMap::mobius(one(), one(), one(), one()).is_err());
        assert!(AnalyticMap::automorphism(c(0.6, 0.8)).is_err());
        let not_sp = HarmonicMap::new(AnalyticMap::Identity, AnalyticMap::Polynomial(vec![zero(), c(2.0, 0.0)]));
        assert!(matches!(not_sp, Err(Error::NotSensePreserving { .. })));
    }

    #[test]
    fn kind_tags() {
        assert_eq!(make_lens(0.5).unwrap().kind(), "lens");
        assert_eq!(AnalyticMap::Strip.kind(), "strip");
        assert_eq!(make_extremal(FamilyParams::new(1.0, 0.5).unwrap()).unwrap().h.kind(), "derived");
    }
}
