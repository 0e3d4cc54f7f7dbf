//! Closed-form differentiation.
//!
//! [`Jet3`] carries a value and its first three complex derivatives at a base
//! point; [`Jet2`] is the same thing one order lower and is what the harmonic
//! Schwarzian consumes once a map has been differentiated. [`Series`] holds
//! truncated Taylor coefficients at the origin and is used as a coefficient
//! oracle that shares no code with the jet rules.
//!
//! Every jet rule is lower triangular: the k-th derivative of a result only
//! reads derivatives of order ≤ k of the operands.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as Complex;

use crate::catalog::AnalyticMap;
use crate::error::{Error, Result};

/// Relative tolerance used when matching the base point of an outer jet with
/// the value of an inner jet.
const BASE_MATCH_TOL: f64 = 1e-12;

/// Default truncation order of [`Series`].
pub const DEFAULT_SERIES_ORDER: usize = 16;

fn zero() -> Complex {
    Complex::new(0.0, 0.0)
}

fn one() -> Complex {
    Complex::new(1.0, 0.0)
}

fn check_nonzero(c: Complex) -> Result<()> {
    if c.norm() == 0.0 || !c.is_finite() {
        Err(Error::DivisionByZero(c))
    } else {
        Ok(())
    }
}

/// Binary jet operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Value and first three derivatives of an analytic function at `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub at: Complex,
    pub f0: Complex,
    pub f1: Complex,
    pub f2: Complex,
    pub f3: Complex,
}

impl Jet3 {
    pub fn new(at: Complex, f0: Complex, f1: Complex, f2: Complex, f3: Complex) -> Self {
        Jet3 { at, f0, f1, f2, f3 }
    }

    /// Jet of `z ↦ z` at `at`.
    pub fn identity(at: Complex) -> Self {
        Jet3::new(at, at, one(), zero(), zero())
    }

    pub fn constant(at: Complex, c: Complex) -> Self {
        Jet3::new(at, c, zero(), zero(), zero())
    }

    pub fn is_finite(&self) -> bool {
        self.f0.is_finite() && self.f1.is_finite() && self.f2.is_finite() && self.f3.is_finite()
    }

    /// Jet of the derivative, one order lower.
    pub fn derivative(&self) -> Jet2 {
        Jet2::new(self.at, self.f1, self.f2, self.f3)
    }

    /// Drops the third derivative.
    pub fn truncate(&self) -> Jet2 {
        Jet2::new(self.at, self.f0, self.f1, self.f2)
    }

    pub fn scale(&self, c: Complex) -> Self {
        Jet3::new(self.at, c * self.f0, c * self.f1, c * self.f2, c * self.f3)
    }

    pub fn add_const(&self, c: Complex) -> Self {
        Jet3 { f0: self.f0 + c, ..*self }
    }

    pub fn arith(&self, op: JetOp, rhs: &Jet3) -> Result<Jet3> {
        match op {
            JetOp::Add => Ok(*self + *rhs),
            JetOp::Sub => Ok(*self - *rhs),
            JetOp::Mul => Ok(*self * *rhs),
            JetOp::Div => self.div(rhs),
        }
    }

    /// Quotient rule, solved order by order from `self = q · rhs`.
    pub fn div(&self, rhs: &Jet3) -> Result<Jet3> {
        check_nonzero(rhs.f0)?;
        let inv = 1.0 / rhs.f0;
        let q0 = self.f0 * inv;
        let q1 = (self.f1 - q0 * rhs.f1) * inv;
        let q2 = (self.f2 - 2.0 * q1 * rhs.f1 - q0 * rhs.f2) * inv;
        let q3 = (self.f3 - 3.0 * q2 * rhs.f1 - 3.0 * q1 * rhs.f2 - q0 * rhs.f3) * inv;
        Ok(Jet3::new(self.at, q0, q1, q2, q3))
    }

    pub fn recip(&self) -> Result<Jet3> {
        Jet3::constant(self.at, one()).div(self)
    }

    /// Chain rule to third order. `outer` must be taken at `inner.f0`.
    pub fn compose(outer: &Jet3, inner: &Jet3) -> Result<Jet3> {
        check_base(outer.at, inner.f0)?;
        Ok(Jet3::chain(outer.f0, outer.f1, outer.f2, outer.f3, inner))
    }

    /// Applies a scalar function whose derivatives at `inner.f0` are `d0..d3`.
    fn chain(d0: Complex, d1: Complex, d2: Complex, d3: Complex, inner: &Jet3) -> Jet3 {
        let g1 = inner.f1;
        let g2 = inner.f2;
        let g3 = inner.f3;
        Jet3::new(
            inner.at,
            d0,
            d1 * g1,
            d2 * g1 * g1 + d1 * g2,
            d3 * g1 * g1 * g1 + 3.0 * d2 * g1 * g2 + d1 * g3,
        )
    }

    pub fn exp(&self) -> Jet3 {
        let e = self.f0.exp();
        Jet3::chain(e, e, e, e, self)
    }

    /// Principal logarithm, restricted to the open right half-plane.
    pub fn ln(&self) -> Result<Jet3> {
        guard_right_half_plane(self.f0)?;
        let x = self.f0;
        let r = 1.0 / x;
        Ok(Jet3::chain(x.ln(), r, -r * r, 2.0 * r * r * r, self))
    }

    /// `exp(a · Log(x))` with the principal logarithm.
    pub fn powf(&self, a: f64) -> Result<Jet3> {
        guard_right_half_plane(self.f0)?;
        if a == 0.0 {
            return Ok(Jet3::constant(self.at, one()));
        }
        if a == 1.0 {
            return Ok(*self);
        }
        let x = self.f0;
        let p0 = (a * x.ln()).exp();
        let r = 1.0 / x;
        let p1 = a * p0 * r;
        let p2 = (a - 1.0) * p1 * r;
        let p3 = (a - 2.0) * p2 * r;
        Ok(Jet3::chain(p0, p1, p2, p3, self))
    }

    /// Integer power by repeated multiplication (any base, no branch).
    pub fn powi(&self, n: i32) -> Result<Jet3> {
        let mut acc = Jet3::constant(self.at, one());
        for _ in 0..n.unsigned_abs() {
            acc = acc * *self;
        }
        if n < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }
}

/// Free-function form of [`Jet3::arith`].
pub fn jet_arith(op: JetOp, x: &Jet3, y: &Jet3) -> Result<Jet3> {
    x.arith(op, y)
}

/// Free-function form of [`Jet3::compose`].
pub fn jet_compose(outer: &Jet3, inner: &Jet3) -> Result<Jet3> {
    Jet3::compose(outer, inner)
}

/// Free-function form of [`Jet3::powf`].
pub fn jet_pow(x: &Jet3, a: f64) -> Result<Jet3> {
    x.powf(a)
}

fn guard_right_half_plane(x: Complex) -> Result<()> {
    if x.re > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::BranchViolation(x))
    }
}

fn check_base(expected: Complex, found: Complex) -> Result<()> {
    let scale = expected.norm().max(found.norm()).max(1.0);
    if (expected - found).norm() <= BASE_MATCH_TOL * scale {
        Ok(())
    } else {
        Err(Error::BasePointMismatch { expected, found })
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, y: Jet3) -> Jet3 {
        Jet3::new(self.at, self.f0 + y.f0, self.f1 + y.f1, self.f2 + y.f2, self.f3 + y.f3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, y: Jet3) -> Jet3 {
        Jet3::new(self.at, self.f0 - y.f0, self.f1 - y.f1, self.f2 - y.f2, self.f3 - y.f3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-one())
    }
}

/// Leibniz rule.
impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, y: Jet3) -> Jet3 {
        let x = self;
        Jet3::new(
            x.at,
            x.f0 * y.f0,
            x.f1 * y.f0 + x.f0 * y.f1,
            x.f2 * y.f0 + 2.0 * x.f1 * y.f1 + x.f0 * y.f2,
            x.f3 * y.f0 + 3.0 * x.f2 * y.f1 + 3.0 * x.f1 * y.f2 + x.f0 * y.f3,
        )
    }
}

/// Value and first two derivatives at `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub at: Complex,
    pub f0: Complex,
    pub f1: Complex,
    pub f2: Complex,
}

impl Jet2 {
    pub fn new(at: Complex, f0: Complex, f1: Complex, f2: Complex) -> Self {
        Jet2 { at, f0, f1, f2 }
    }

    pub fn constant(at: Complex, c: Complex) -> Self {
        Jet2::new(at, c, zero(), zero())
    }

    pub fn is_finite(&self) -> bool {
        self.f0.is_finite() && self.f1.is_finite() && self.f2.is_finite()
    }

    pub fn scale(&self, c: Complex) -> Self {
        Jet2::new(self.at, c * self.f0, c * self.f1, c * self.f2)
    }

    pub fn div(&self, rhs: &Jet2) -> Result<Jet2> {
        check_nonzero(rhs.f0)?;
        let inv = 1.0 / rhs.f0;
        let q0 = self.f0 * inv;
        let q1 = (self.f1 - q0 * rhs.f1) * inv;
        let q2 = (self.f2 - 2.0 * q1 * rhs.f1 - q0 * rhs.f2) * inv;
        Ok(Jet2::new(self.at, q0, q1, q2))
    }

    pub fn compose(outer: &Jet2, inner: &Jet2) -> Result<Jet2> {
        check_base(outer.at, inner.f0)?;
        let g1 = inner.f1;
        Ok(Jet2::new(
            inner.at,
            outer.f0,
            outer.f1 * g1,
            outer.f2 * g1 * g1 + outer.f1 * inner.f2,
        ))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, y: Jet2) -> Jet2 {
        Jet2::new(self.at, self.f0 + y.f0, self.f1 + y.f1, self.f2 + y.f2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, y: Jet2) -> Jet2 {
        Jet2::new(self.at, self.f0 - y.f0, self.f1 - y.f1, self.f2 - y.f2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, y: Jet2) -> Jet2 {
        let x = self;
        Jet2::new(
            x.at,
            x.f0 * y.f0,
            x.f1 * y.f0 + x.f0 * y.f1,
            x.f2 * y.f0 + 2.0 * x.f1 * y.f1 + x.f0 * y.f2,
        )
    }
}

/// Truncated Taylor series at the origin.
///
/// `coeffs[k]` is the coefficient of `z^k`; the truncation order is
/// `coeffs.len() - 1`. Binary operations on series of different orders
/// truncate to the smaller one.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub coeffs: Vec<Complex>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![zero(); order + 1] }
    }

    pub fn constant(order: usize, c: Complex) -> Self {
        let mut s = Series::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn identity(order: usize) -> Self {
        let mut s = Series::zero(order);
        if order >= 1 {
            s.coeffs[1] = one();
        }
        s
    }

    /// Builds a series from leading coefficients, padding or truncating to `order`.
    pub fn from_coeffs(order: usize, leading: &[Complex]) -> Self {
        let mut s = Series::zero(order);
        for (dst, src) in s.coeffs.iter_mut().zip(leading) {
            *dst = *src;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_else(zero)
    }

    fn common_order(&self, y: &Series) -> usize {
        self.order().min(y.order())
    }

    pub fn arith(&self, op: JetOp, y: &Series) -> Result<Series> {
        match op {
            JetOp::Add => Ok(self.add(y)),
            JetOp::Sub => Ok(self.sub(y)),
            JetOp::Mul => Ok(self.mul(y)),
            JetOp::Div => self.div(y),
        }
    }

    pub fn add(&self, y: &Series) -> Series {
        let n = self.common_order(y);
        Series { coeffs: (0..=n).map(|k| self.coeffs[k] + y.coeffs[k]).collect() }
    }

    pub fn sub(&self, y: &Series) -> Series {
        let n = self.common_order(y);
        Series { coeffs: (0..=n).map(|k| self.coeffs[k] - y.coeffs[k]).collect() }
    }

    pub fn scale(&self, c: Complex) -> Series {
        Series { coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }

    /// Cauchy product.
    pub fn mul(&self, y: &Series) -> Series {
        let n = self.common_order(y);
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|i| self.coeffs[i] * y.coeffs[k - i]).sum())
            .collect();
        Series { coeffs }
    }

    pub fn div(&self, y: &Series) -> Result<Series> {
        check_nonzero(y.coeffs[0])?;
        let n = self.common_order(y);
        let inv = 1.0 / y.coeffs[0];
        let mut q: Vec<Complex> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let acc: Complex = (1..=k).map(|j| y.coeffs[j] * q[k - j]).sum();
            q.push((self.coeffs[k] - acc) * inv);
        }
        Ok(Series { coeffs: q })
    }

    /// Term-by-term derivative; the top coefficient becomes zero.
    pub fn derivative(&self) -> Series {
        let n = self.order();
        let mut out = Series::zero(n);
        for k in 0..n {
            out.coeffs[k] = self.coeffs[k + 1] * (k as f64 + 1.0);
        }
        out
    }

    /// Primitive vanishing at the origin, truncated to the same order.
    pub fn integrate(&self) -> Series {
        let n = self.order();
        let mut out = Series::zero(n);
        for k in 1..=n {
            out.coeffs[k] = self.coeffs[k - 1] / k as f64;
        }
        out
    }

    pub fn exp(&self) -> Series {
        let n = self.order();
        let mut e = vec![self.coeffs[0].exp()];
        for k in 1..=n {
            let acc: Complex = (1..=k).map(|j| self.coeffs[j] * e[k - j] * j as f64).sum();
            e.push(acc / k as f64);
        }
        Series { coeffs: e }
    }

    /// Principal logarithm; the constant term must lie in the right half-plane.
    pub fn ln(&self) -> Result<Series> {
        let s0 = self.coeffs[0];
        guard_right_half_plane(s0)?;
        let n = self.order();
        let mut l = vec![s0.ln()];
        for k in 1..=n {
            let acc: Complex = (1..k).map(|j| l[j] * self.coeffs[k - j] * j as f64).sum();
            l.push((self.coeffs[k] - acc / k as f64) / s0);
        }
        Ok(Series { coeffs: l })
    }

    /// Principal real power via the J.C.P. Miller recurrence.
    pub fn powf(&self, a: f64) -> Result<Series> {
        let s0 = self.coeffs[0];
        guard_right_half_plane(s0)?;
        let n = self.order();
        let mut p = vec![(a * s0.ln()).exp()];
        for k in 1..=n {
            let acc: Complex = (1..=k)
                .map(|j| self.coeffs[j] * p[k - j] * ((a + 1.0) * j as f64 - k as f64))
                .sum();
            p.push(acc / (k as f64 * s0));
        }
        Ok(Series { coeffs: p })
    }

    /// `outer ∘ inner`; requires `inner(0) = 0`.
    pub fn compose(outer: &Series, inner: &Series) -> Result<Series> {
        if inner.coeffs[0].norm() != 0.0 {
            return Err(Error::SeriesUnsupported(format!(
                "composition needs inner(0) = 0, got {}",
                inner.coeffs[0]
            )));
        }
        let n = outer.common_order(inner);
        let inner = Series { coeffs: inner.coeffs[..=n].to_vec() };
        // Horner in the series ring.
        let mut acc = Series::constant(n, outer.coeffs[n]);
        for k in (0..n).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += outer.coeffs[k];
        }
        Ok(acc)
    }
}

/// Central-difference estimate of the jet of `map` at `z`, with one Richardson
/// step (spacings `step` and `step / 2`). The step is taken along the real axis.
pub fn fd_oracle(map: &AnalyticMap, z: Complex, step: f64) -> Result<Jet3> {
    let f = |t: f64| map.value(z + Complex::new(t, 0.0));
    let f0 = map.value(z)?;
    let estimate = |h: f64| -> Result<(Complex, Complex, Complex)> {
        let (p1, m1, p2, m2) = (f(h)?, f(-h)?, f(2.0 * h)?, f(-2.0 * h)?);
        let d1 = (p1 - m1) / (2.0 * h);
        let d2 = (p1 - 2.0 * f0 + m1) / (h * h);
        let d3 = (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h);
        Ok((d1, d2, d3))
    };
    let (a1, a2, a3) = estimate(step)?;
    let (b1, b2, b3) = estimate(step / 2.0)?;
    let rich = |coarse: Complex, fine: Complex| (4.0 * fine - coarse) / 3.0;
    Ok(Jet3::new(z, f0, rich(a1, b1), rich(a2, b2), rich(a3, b3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn assert_jet_eq(x: &Jet3, y: [Complex; 4], tol: f64) {
        let got = [x.f0, x.f1, x.f2, x.f3];
        for (k, (g, e)) in got.iter().zip(y.iter()).enumerate() {
            assert!((g - e).norm() <= tol, "f{k}: got {g}, expected {e}");
        }
    }

    #[test]
    fn square_of_identity() {
        let z = Jet3::identity(c(0.5, 0.0));
        assert_jet_eq(&(z * z), [c(0.25, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)], 0.0);
    }

    #[test]
    fn self_quotient_is_one() {
        let x = Jet3::new(c(0.1, 0.2), c(0.3, -1.0), c(2.0, 0.5), c(-1.0, 4.0), c(7.0, 1.0));
        let q = x.div(&x).unwrap();
        assert_jet_eq(&q, [one(), zero(), zero(), zero()], 1e-14);
    }

    #[test]
    fn cancellation() {
        let z = Jet3::identity(c(-0.3, 0.7));
        let sq = z * z;
        assert_jet_eq(&(sq + (-sq)), [zero(); 4], 0.0);
    }

    #[test]
    fn division_by_zero_jet() {
        let x = Jet3::identity(c(0.2, 0.0));
        let zero_jet = Jet3::constant(c(0.2, 0.0), zero());
        assert!(matches!(x.div(&zero_jet), Err(Error::DivisionByZero(_))));
        assert!(matches!(
            jet_arith(JetOp::Div, &x, &zero_jet),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn compose_with_identity_and_square() {
        let at = c(0.3, 0.0);
        let f = Jet3::new(at, c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0), c(5.0, 5.0));
        let id = Jet3::identity(at);
        assert_eq!(Jet3::compose(&f, &id).unwrap(), f);

        // square taken at w0 = 0.3, inner identity at 0.3
        let sq = Jet3::new(at, c(0.09, 0.0), c(0.6, 0.0), c(2.0, 0.0), zero());
        let out = jet_compose(&sq, &id).unwrap();
        assert_jet_eq(&out, [c(0.09, 0.0), c(0.6, 0.0), c(2.0, 0.0), zero()], 1e-15);
    }

    #[test]
    fn compose_rejects_wrong_base() {
        let outer = Jet3::identity(c(0.5, 0.0));
        let inner = Jet3::identity(c(0.1, 0.0));
        assert!(matches!(
            Jet3::compose(&outer, &inner),
            Err(Error::BasePointMismatch { .. })
        ));
    }

    #[test]
    fn automorphism_inverse_recovers_identity() {
        let alpha = c(0.4, -0.25);
        let z0 = c(-0.2, 0.55);
        let sigma = |a: Complex, z: Jet3| -> Jet3 {
            let num = z.add_const(a);
            let den = z.scale(a.conj()).add_const(one());
            num.div(&den).unwrap()
        };
        let inner = sigma(alpha, Jet3::identity(z0));
        let outer = sigma(-alpha, Jet3::identity(inner.f0));
        let back = Jet3::compose(&outer, &inner).unwrap();
        assert_jet_eq(&back, [z0, one(), zero(), zero()], 1e-14);
    }

    fn ell_jet(z: Complex) -> Jet3 {
        let id = Jet3::identity(z);
        id.add_const(one()).div(&(-id).add_const(one())).unwrap()
    }

    #[test]
    fn pow_of_half_plane_map_at_origin() {
        let w = ell_jet(zero());
        for a in [0.3, 1.7, 2.0, -0.6] {
            let p = jet_pow(&w, a).unwrap();
            assert_abs_diff_eq!(p.f0.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(p.f0.im, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(p.f1.re, 2.0 * a, epsilon = 1e-14);
            assert_abs_diff_eq!(p.f1.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn pow_special_exponents() {
        let w = ell_jet(c(0.2, 0.3));
        assert_eq!(w.powf(1.0).unwrap(), w);
        assert_jet_eq(&w.powf(0.0).unwrap(), [one(), zero(), zero(), zero()], 0.0);
    }

    #[test]
    fn pow_and_ln_reject_left_half_plane() {
        let x = Jet3::constant(zero(), c(-0.5, 0.1));
        assert!(matches!(x.powf(0.5), Err(Error::BranchViolation(_))));
        assert!(matches!(x.ln(), Err(Error::BranchViolation(_))));
        let x = Jet3::constant(zero(), c(0.0, 1.0));
        assert!(matches!(x.powf(0.5), Err(Error::BranchViolation(_))));
    }

    #[test]
    fn pow_matches_integer_power() {
        let w = ell_jet(c(0.1, -0.4));
        let a = w.powf(3.0).unwrap();
        let b = w.powi(3).unwrap();
        assert_jet_eq(&a, [b.f0, b.f1, b.f2, b.f3], 1e-11 * b.f3.norm().max(1.0));
    }

    #[test]
    fn exp_of_ln_round_trips() {
        let w = ell_jet(c(0.35, 0.2));
        let back = w.ln().unwrap().exp();
        assert_jet_eq(&back, [w.f0, w.f1, w.f2, w.f3], 1e-12);
    }

    #[test]
    fn jet2_quotient_and_compose_match_jet3() {
        let at = c(0.2, 0.1);
        let x = ell_jet(at);
        let y = x.powf(0.7).unwrap();
        let q3 = x.div(&y).unwrap().truncate();
        let q2 = x.truncate().div(&y.truncate()).unwrap();
        assert!((q3.f0 - q2.f0).norm() < 1e-15);
        assert!((q3.f1 - q2.f1).norm() < 1e-14);
        assert!((q3.f2 - q2.f2).norm() < 1e-13);

        let outer = Jet3::identity(x.f0).exp();
        let c3 = Jet3::compose(&outer, &x).unwrap().truncate();
        let c2 = Jet2::compose(&outer.truncate(), &x.truncate()).unwrap();
        assert!((c3.f2 - c2.f2).norm() < 1e-12 * c3.f2.norm().max(1.0));
    }

    fn koebe_series(n: usize) -> Series {
        let z = Series::identity(n);
        let one_minus = Series::constant(n, one()).sub(&z);
        z.div(&one_minus.mul(&one_minus)).unwrap()
    }

    #[test]
    fn koebe_series_coefficients() {
        let k = koebe_series(DEFAULT_SERIES_ORDER);
        for (n, a) in k.coeffs.iter().enumerate() {
            assert_abs_diff_eq!(a.re, n as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn identity_series() {
        let s = Series::identity(5);
        assert_eq!(s.coeffs, vec![zero(), one(), zero(), zero(), zero(), zero()]);
    }

    #[test]
    fn half_plane_power_series_matches_binomial_expansion() {
        // h' = (1+z)^(a-1) (1-z)^(-a-2), a = 2, integrated: [0, 1, 5/2, 14/3, ...]
        let n = 8;
        let z = Series::identity(n);
        let p = Series::constant(n, one()).add(&z).powf(1.0).unwrap();
        let m = Series::constant(n, one()).sub(&z).powf(-4.0).unwrap();
        let h = p.mul(&m).integrate();
        assert_abs_diff_eq!(h.coeffs[0].re, 0.0);
        assert_abs_diff_eq!(h.coeffs[1].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h.coeffs[2].re, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(h.coeffs[3].re, 14.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn series_division_by_zero_constant() {
        let z = Series::identity(4);
        assert!(matches!(z.div(&z), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn series_exp_ln_inverse() {
        let n = 10;
        let s = Series::from_coeffs(n, &[c(1.5, 0.2), c(0.3, 0.0), c(0.0, -1.0), c(0.25, 0.5)]);
        let back = s.ln().unwrap().exp();
        for k in 0..=n {
            assert!((back.coeffs[k] - s.coeffs[k]).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn series_compose_geometric() {
        // 1/(1-w) with w = 2z  ->  sum (2z)^k
        let n = 8;
        let outer = Series { coeffs: vec![one(); n + 1] };
        let inner = Series::identity(n).scale(c(2.0, 0.0));
        let out = Series::compose(&outer, &inner).unwrap();
        for k in 0..=n {
            assert_abs_diff_eq!(out.coeffs[k].re, 2f64.powi(k as i32), epsilon = 1e-9);
        }
        let shifted = Series::constant(n, one()).add(&inner);
        assert!(matches!(
            Series::compose(&outer, &shifted),
            Err(Error::SeriesUnsupported(_))
        ));
    }
}
