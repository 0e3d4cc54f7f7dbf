//! Order formulas for the families of maps with bounded Schwarzian norm, the
//! dilatation bound `R`, and the coefficient relation met by extremals.

use num_complex::Complex64 as Complex;

use crate::catalog::{make_extremal, FamilyParams, HarmonicMap};
use crate::error::{Error, Result};
use crate::norms::NormEstimate;

/// Norm at and above which the dilatation bound saturates at 1.
pub const SATURATION_NORM: f64 = 1.5;
/// Slack allowed when `r_from_order` lands just outside `[0, 1]`.
pub const RADIUS_SLACK: f64 = 1e-9;
/// Required agreement between `a + R/2` and the half-order.
pub const HALF_ORDER_TOL: f64 = 1e-10;

/// Where an order value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderSource {
    /// Analytic family, `√(1 + λ/2)`.
    AnalyticFamily,
    /// Harmonic family with `λ ≥ 3/2`, where the dilatation bound is 1.
    SaturatedDilatation,
    /// Harmonic family with a caller-supplied dilatation bound.
    GivenDilatation,
    /// Harmonic family with a measured dilatation bound.
    Empirical,
}

impl OrderSource {
    pub fn tag(&self) -> &'static str {
        match self {
            OrderSource::AnalyticFamily => "analytic_family",
            OrderSource::SaturatedDilatation => "saturated_dilatation",
            OrderSource::GivenDilatation => "given_dilatation",
            OrderSource::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    pub lambda: f64,
    pub order: f64,
    /// `√(λ/2 + 1 + R²/2)`
    pub half_order: f64,
    pub r_sup: f64,
    pub source: OrderSource,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("λ must be ≥ 0, got {lambda}")))
    }
}

/// Order of the analytic family: `√(1 + λ/2)`.
pub fn order_h(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok((1.0 + lambda / 2.0).sqrt())
}

fn harmonic_order(lambda: f64, r: f64, source: OrderSource) -> OrderEstimate {
    let half_order = (lambda / 2.0 + 1.0 + r * r / 2.0).sqrt();
    OrderEstimate { lambda, order: half_order + r / 2.0, half_order, r_sup: r, source }
}

/// Order of the harmonic family given the dilatation bound `r_sup`.
///
/// For `λ ≥ 3/2` the bound is 1 and may be omitted; for `λ = 0` it is 0.
/// Below 3/2 the true bound is unknown, so the caller must supply one and the
/// result is tagged [`OrderSource::GivenDilatation`].
pub fn order_f(lambda: f64, r_sup: Option<f64>) -> Result<OrderEstimate> {
    check_lambda(lambda)?;
    if let Some(r) = r_sup {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!("R must lie in [0, 1], got {r}")));
        }
    }
    if lambda >= SATURATION_NORM {
        return match r_sup {
            None | Some(1.0) => Ok(harmonic_order(lambda, 1.0, OrderSource::SaturatedDilatation)),
            Some(r) => Err(Error::ConsistencyError(format!(
                "for λ = {lambda} ≥ 3/2 the dilatation bound is 1, got R = {r}"
            ))),
        };
    }
    if lambda == 0.0 {
        return match r_sup {
            None | Some(0.0) => Ok(harmonic_order(0.0, 0.0, OrderSource::GivenDilatation)),
            Some(r) => Err(Error::ConsistencyError(format!(
                "for λ = 0 the dilatation bound is 0, got R = {r}"
            ))),
        };
    }
    match r_sup {
        Some(r) => Ok(harmonic_order(lambda, r, OrderSource::GivenDilatation)),
        None => Err(Error::InvalidParameter(format!(
            "λ = {lambda} < 3/2 needs an explicit dilatation bound R"
        ))),
    }
}

/// Order from a measured dilatation norm `sup |ω*|`.
pub fn order_f_measured(lambda: f64, dilatation_norm: &NormEstimate) -> Result<OrderEstimate> {
    check_lambda(lambda)?;
    let r = dilatation_norm.value;
    if !(0.0..=1.0 + RADIUS_SLACK).contains(&r) {
        return Err(Error::InvalidParameter(format!("measured R = {r} lies outside [0, 1]")));
    }
    Ok(harmonic_order(lambda, r.min(1.0), OrderSource::Empirical))
}

/// Inverse of [`order_f`] in `R`: `-2α + √(8α² - 2λ - 4)`.
pub fn r_from_order(lambda: f64, alpha: f64) -> Result<f64> {
    let radicand = 8.0 * alpha * alpha - 2.0 * lambda - 4.0;
    if !(radicand >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "8α² - 2λ - 4 = {radicand} < 0 for (λ, α) = ({lambda}, {alpha})"
        )));
    }
    let r = -2.0 * alpha + radicand.sqrt();
    if !(-RADIUS_SLACK..=1.0 + RADIUS_SLACK).contains(&r) {
        return Err(Error::ConsistencyError(format!(
            "R = {r} for (λ, α) = ({lambda}, {alpha}) lies outside [0, 1]"
        )));
    }
    Ok(r.clamp(0.0, 1.0))
}

/// Strict lower bound `√(2λ/3)` on the dilatation bound for `0 < λ < 3/2`.
pub fn r_lower_bound(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < SATURATION_NORM) {
        return Err(Error::InvalidParameter(format!("λ must lie in (0, 3/2), got {lambda}")));
    }
    Ok((2.0 * lambda / 3.0).sqrt())
}

/// Taylor coefficients `h = z + a₂z² + a₃z³ + …`, `g = b₂z² + …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientTriple {
    pub a2: Complex,
    pub a3: Complex,
    pub b2: Complex,
}

impl CoefficientTriple {
    /// Reads the coefficients off the power series of `f` at the origin.
    pub fn of(f: &HarmonicMap) -> Result<Self> {
        let h = f.h.series(4)?;
        let g = f.g.series(4)?;
        let t = CoefficientTriple { a2: h.coeff(2), a3: h.coeff(3), b2: g.coeff(2) };
        if [t.a2, t.a3, t.b2].iter().all(|c| c.is_finite()) {
            Ok(t)
        } else {
            Err(Error::ConsistencyError(format!("non-finite coefficients {t:?}")))
        }
    }
}

/// `|3a₃ - 2a₂² - 2|b₂|² - 1|`.
pub fn marty_residual(c: &CoefficientTriple) -> f64 {
    (3.0 * c.a3 - 2.0 * c.a2 * c.a2 - 2.0 * c.b2.norm_sqr() - 1.0).norm()
}

/// Coefficients of the extremal map, from its power series.
pub fn extremal_coefficients(p: &FamilyParams) -> Result<CoefficientTriple> {
    let c = CoefficientTriple::of(&make_extremal(*p)?)?;
    let expected = p.a + p.r / 2.0;
    if (c.a2 - expected).norm() > HALF_ORDER_TOL || (expected - p.half_order()).abs() > HALF_ORDER_TOL {
        return Err(Error::ConsistencyError(format!(
            "a₂ = {} but a + R/2 = {expected} and the half-order is {}",
            c.a2,
            p.half_order()
        )));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_f_r, make_phi_a, AnalyticMap};
    use crate::norms::{sup_norm, Field, GridConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn analytic_orders() {
        assert!(close(order_h(6.0).unwrap(), 2.0, 1e-15));
        assert_eq!(order_h(0.0).unwrap(), 1.0);
        assert!(close(order_h(9.5).unwrap(), (23.0f64 / 4.0).sqrt(), 1e-15));
        assert!(order_h(-0.1).is_err());
    }

    #[test]
    fn harmonic_orders() {
        let e = order_f(9.5, None).unwrap();
        assert!(close(e.order, 3.0, 1e-15));
        assert!(close(e.half_order, 2.5, 1e-15));
        assert_eq!(e.r_sup, 1.0);
        assert_eq!(e.source, OrderSource::SaturatedDilatation);
        assert!(close(order_f(1.5, None).unwrap().order, 2.0, 1e-15));
        assert!(close(order_f(1.5, Some(1.0)).unwrap().order, 2.0, 1e-15));

        let zero = order_f(0.0, None).unwrap();
        assert_eq!((zero.order, zero.r_sup), (1.0, 0.0));
        assert!(order_f(0.0, Some(0.5)).is_err());

        let given = order_f(1.0, Some(0.9)).unwrap();
        assert_eq!(given.source, OrderSource::GivenDilatation);
        assert!(close(given.order, 0.930217374184226 + 0.9, 1e-14));
    }

    #[test]
    fn harmonic_order_errors() {
        assert!(matches!(order_f(6.0, Some(0.5)), Err(Error::ConsistencyError(_))));
        assert!(matches!(order_f(1.0, None), Err(Error::InvalidParameter(_))));
        assert!(matches!(order_f(1.0, Some(1.2)), Err(Error::InvalidParameter(_))));
        assert!(matches!(order_f(-1.0, Some(0.5)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn gap_between_families() {
        for i in 0..200 {
            let lambda = 1.5 + i as f64 * 0.1;
            let gap = order_f(lambda, None).unwrap().order - order_h(lambda).unwrap();
            assert!(gap > 0.0 && gap <= 1.0, "{lambda}: {gap}");
        }
    }

    #[test]
    fn order_increases_with_radius() {
        for lambda in [0.2, 0.7, 1.2] {
            let orders: Vec<f64> =
                (0..=100).map(|i| order_f(lambda, Some(i as f64 / 100.0)).unwrap().order).collect();
            assert!(orders.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn radius_from_order() {
        assert!(close(r_from_order(9.5, 3.0).unwrap(), 1.0, 1e-15));
        assert!(close(r_from_order(1.5, 2.0).unwrap(), 1.0, 1e-15));
        assert!(matches!(r_from_order(9.5, 0.5), Err(Error::InvalidParameter(_))));
        assert!(matches!(r_from_order(9.5, 4.0), Err(Error::ConsistencyError(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let lambda = rng.gen_range(0.0..20.0);
            let r = rng.gen_range(0.0..=1.0);
            let alpha = harmonic_order(lambda, r, OrderSource::GivenDilatation).order;
            assert!(close(r_from_order(lambda, alpha).unwrap(), r, 1e-12));
        }
    }

    #[test]
    fn lower_bound() {
        assert!(close(r_lower_bound(2.0 / 3.0).unwrap(), 2.0 / 3.0, 1e-15));
        assert!(close(r_lower_bound(1.5 - 1e-12).unwrap(), 1.0, 1e-12));
        assert!(r_lower_bound(0.0).is_err());
        assert!(r_lower_bound(1.5).is_err());
    }

    #[test]
    fn shear_family_meets_lower_bound() {
        let cfg = GridConfig { n_r: 64, n_theta: 64, ..GridConfig::default() };
        for lambda in [0.3, 2.0 / 3.0, 1.2] {
            let r = r_lower_bound(lambda).unwrap();
            let f = make_f_r(r).unwrap();
            let dil = sup_norm(&Field::Dilatation(&f), &cfg).unwrap();
            assert!(close(dil.value, r, 1e-12));
            assert!(sup_norm(&Field::Schwarzian(&f), &cfg).unwrap().value < lambda);
            let e = order_f_measured(lambda, &dil).unwrap();
            assert_eq!(e.source, OrderSource::Empirical);
            assert!(close(e.order, order_f(lambda, Some(r)).unwrap().order, 1e-12));
        }
    }

    #[test]
    fn marty_relation() {
        let koebe = extremal_coefficients(&FamilyParams::new(9.5, 1.0).unwrap()).unwrap();
        assert!((koebe.a2 - 2.5).norm() < 1e-12);
        assert!((koebe.a3 - 14.0 / 3.0).norm() < 1e-12);
        assert!((koebe.b2 - 0.5).norm() < 1e-12);
        for (lambda, r) in [(1.5, 1.0), (6.0, 1.0), (9.5, 1.0), (1.0, 0.9), (0.4, 0.5)] {
            let p = FamilyParams::new(lambda, r).unwrap();
            let c = extremal_coefficients(&p).unwrap();
            assert!(marty_residual(&c) <= 1e-8, "{lambda}, {r}: {c:?}");
            assert!((c.b2 - r / 2.0).norm() < 1e-12);
        }
        let three_halves = extremal_coefficients(&FamilyParams::new(1.5, 1.0).unwrap()).unwrap();
        assert!((three_halves.a2 - 1.5).norm() < 1e-12);
        for a in [1.5, 2.0, 3.0] {
            let f = HarmonicMap::analytic(make_phi_a(a).unwrap()).unwrap();
            let c = CoefficientTriple::of(&f).unwrap();
            assert!((c.a2 - a).norm() < 1e-12);
            assert!(marty_residual(&c) <= 1e-9);
        }
        let id = CoefficientTriple::of(&HarmonicMap::analytic(AnalyticMap::Identity).unwrap()).unwrap();
        assert!(close(marty_residual(&id), 1.0, 0.0));
        assert!(extremal_coefficients(&FamilyParams::new(0.0, 0.0).unwrap()).is_err());
    }
}
