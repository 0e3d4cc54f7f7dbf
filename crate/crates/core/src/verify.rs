//! Acceptance suite. Each criterion runs at a fixed tolerance and reports a
//! one-line outcome; nothing here panics on failure.

use std::f64::consts::PI;

use num_complex::Complex64 as Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{
    affine_change, koebe_transform, make_extremal, make_f_r, make_harmonic_koebe, make_lens,
    make_phi_a, AnalyticMap, FamilyParams, HarmonicMap,
};
use crate::error::Result;
use crate::families::{extremal_coefficients, marty_residual, order_f, order_h, r_from_order, CoefficientTriple};
use crate::norms::{
    closed_form_scaled, curve_samples, psi_monotone_check, psi_profile, sup_norm, ClosedFormCoeffs, Field,
    GridConfig,
};
use crate::schwarzian::{
    hyperbolic_derivative, schwarzian_analytic, schwarzian_harmonic, scaled_schwarzian,
};

pub const ANALYTIC_NORM_TOL: f64 = 1e-6;
pub const SHEAR_NORM_TOL: f64 = 1e-6;
pub const KOEBE_NORM_TOL: f64 = 1e-5;
pub const EXTREMAL_NORM_TOL: f64 = 1e-5;
pub const JET_MATCH_TOL: f64 = 1e-10;
pub const CURVE_TOL: f64 = 1e-8;
pub const CLOSED_FORM_TOL: f64 = 1e-9;
pub const ORDER_TOL: f64 = 1e-12;
pub const MARTY_TOL: f64 = 1e-8;
pub const PROPERTY_CASES: usize = 1000;
pub const PSI_SAMPLES: usize = 10_000;
pub const SEED: u64 = 0x5eed_2024;

/// Parameter sets `(λ, R)` of the extremal checks.
pub const EXTREMAL_SETS: [(f64, f64); 4] = [(1.5, 1.0), (6.0, 1.0), (9.5, 1.0), (1.0, 0.9)];

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

fn outcome(id: u8, name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> CriterionOutcome {
    match body() {
        Ok((passed, detail)) => CriterionOutcome { id, name, passed, detail },
        Err(e) => CriterionOutcome { id, name, passed: false, detail: format!("error: {e}") },
    }
}

fn rel(x: Complex, y: Complex) -> f64 {
    (x - y).norm() / y.norm().max(1.0)
}

fn random_disk(rng: &mut ChaCha8Rng, rmax: f64) -> Complex {
    Complex::from_polar(rmax * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI))
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn analytic_norms(cfg: &GridConfig) -> CriterionOutcome {
    outcome(1, "analytic Koebe and strip norms", || {
        let k = sup_norm(&Field::Schwarzian(&HarmonicMap::analytic(AnalyticMap::AnalyticKoebe)?), cfg)?;
        let s = sup_norm(&Field::Schwarzian(&HarmonicMap::analytic(AnalyticMap::Strip)?), cfg)?;
        let ek = (k.value - 6.0).abs();
        let es = (s.value - 2.0).abs();
        Ok((
            ek <= ANALYTIC_NORM_TOL && es <= ANALYTIC_NORM_TOL,
            format!("koebe {} (err {ek:.1e}), strip {} (err {es:.1e})", k.value, s.value),
        ))
    })
}

pub fn shear_norm(cfg: &GridConfig) -> CriterionOutcome {
    outcome(2, "shear z + conj(z)²/2 boundary norm", || {
        let est = sup_norm(&Field::Schwarzian(&make_f_r(1.0)?), cfg)?;
        let err = (est.value - 1.5).abs();
        Ok((
            err <= SHEAR_NORM_TOL && !est.attained,
            format!("norm {} (err {err:.1e}), attained={}", est.value, est.attained),
        ))
    })
}

pub fn harmonic_koebe_norm(cfg: &GridConfig) -> CriterionOutcome {
    outcome(3, "harmonic Koebe norm and a₂", || {
        let k = make_harmonic_koebe();
        let est = sup_norm(&Field::Schwarzian(&k), cfg)?;
        let a2 = k.h.jet(c(0.0, 0.0))?.f2 / 2.0;
        let err = (est.value - 9.5).abs();
        Ok((
            err <= KOEBE_NORM_TOL && a2 == c(2.5, 0.0),
            format!("norm {} (err {err:.1e}), a₂ = {a2}", est.value),
        ))
    })
}

pub fn extremal_norms(cfg: &GridConfig) -> CriterionOutcome {
    outcome(4, "extremal norms attained at the origin", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (lambda, r) in EXTREMAL_SETS {
            let f = make_extremal(FamilyParams::new(lambda, r)?)?;
            let est = sup_norm(&Field::Schwarzian(&f), cfg)?;
            let err = (est.value - lambda).abs();
            let at_origin = est.attained && est.argmax == c(0.0, 0.0);
            let pass = err <= EXTREMAL_NORM_TOL && at_origin;
            ok &= pass;
            parts.push(format!(
                "({lambda}, {r}): {} at {} {}",
                est.value,
                est.argmax,
                if pass { "ok" } else { "MISMATCH" }
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub fn extremal_is_harmonic_koebe() -> CriterionOutcome {
    outcome(5, "extremal at λ = 19/2 equals harmonic Koebe", || {
        let f0 = make_extremal(FamilyParams::new(9.5, 1.0)?)?;
        let k = make_harmonic_koebe();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let z = random_disk(&mut rng, 0.9);
            let (h0, g0) = f0.derivative_jets(z)?;
            let (hk, gk) = k.derivative_jets(z)?;
            for (x, y) in [
                (h0.f0, hk.f0),
                (h0.f1, hk.f1),
                (h0.f2, hk.f2),
                (g0.f0, gk.f0),
                (g0.f1, gk.f1),
                (g0.f2, gk.f2),
            ] {
                worst = worst.max(rel(x, y));
            }
        }
        Ok((worst < JET_MATCH_TOL, format!("max relative jet discrepancy {worst:.2e}")))
    })
}

pub fn curve_constancy() -> CriterionOutcome {
    outcome(6, "constancy along C_γ", || {
        let p = FamilyParams::new(1.0, 0.9)?;
        let ts = [0.25, 0.5, 1.0, 2.0, 4.0];
        let mut worst: f64 = 0.0;
        for gamma in [0.0, 0.3, 0.7, 1.2] {
            let s = curve_samples(&p, gamma, &ts)?;
            let v0 = s[0].1;
            for (_, v) in &s {
                worst = worst.max((v - v0).abs() / v0);
            }
        }
        Ok((worst <= CURVE_TOL, format!("max relative spread {worst:.2e}")))
    })
}

pub fn closed_form_agreement() -> CriterionOutcome {
    outcome(7, "closed form vs direct pipeline", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
        let mut direct_err: f64 = 0.0;
        for (lambda, r) in [(1.0, 0.9), (6.0, 1.0)] {
            let p = FamilyParams::new(lambda, r)?;
            let f = make_extremal(p)?;
            for _ in 0..100 {
                let z = random_disk(&mut rng, 0.95);
                let d = scaled_schwarzian(&f, z)?;
                let cf = closed_form_scaled(&p, z)?;
                direct_err = direct_err.max((d - cf).abs() / cf);
            }
        }
        let mut psi_err: f64 = 0.0;
        let mut sum_err: f64 = 0.0;
        for (lambda, r) in EXTREMAL_SETS {
            let p = FamilyParams::new(lambda, r)?;
            for i in 1..10 {
                let prof = psi_profile(&p, i as f64 / 10.0)?;
                let sq = prof.phi_form * prof.phi_form;
                psi_err = psi_err.max((sq - prof.trig_form).abs() / prof.trig_form);
            }
            let k = ClosedFormCoeffs::new(&p);
            sum_err = sum_err.max((k.a_tilde + k.b_tilde + k.c_tilde - lambda * lambda).abs());
        }
        Ok((
            direct_err <= CLOSED_FORM_TOL && psi_err <= CLOSED_FORM_TOL && sum_err <= CLOSED_FORM_TOL,
            format!("direct {direct_err:.2e}, Ψ forms {psi_err:.2e}, Ã+B̃+C̃-λ² {sum_err:.2e}"),
        ))
    })
}

pub fn order_formulas() -> CriterionOutcome {
    outcome(8, "order formulas", || {
        let h6 = order_h(6.0)?;
        let f19 = order_f(9.5, None)?;
        let f3 = order_f(1.5, None)?;
        let r = r_from_order(9.5, 3.0)?;
        let errs = [
            (h6 - 2.0).abs(),
            (f19.order - 3.0).abs(),
            (f19.half_order - 2.5).abs(),
            (f3.order - 2.0).abs(),
            (r - 1.0).abs(),
        ];
        let worst = errs.iter().copied().fold(0.0, f64::max);
        Ok((
            worst <= ORDER_TOL,
            format!(
                "order_h(6) = {h6}, order_f(19/2) = {} (half {}), order_f(3/2) = {}, R(19/2, 3) = {r}",
                f19.order, f19.half_order, f3.order
            ),
        ))
    })
}

pub fn marty_relation() -> CriterionOutcome {
    outcome(9, "coefficient relation 3a₃ - 2a₂² - 2|b₂|² = 1", || {
        let mut worst: f64 = 0.0;
        for lambda in [1.5, 6.0, 9.5] {
            worst = worst.max(marty_residual(&extremal_coefficients(&FamilyParams::new(lambda, 1.0)?)?));
        }
        for a in [1.5, 2.0, 3.0] {
            let f = HarmonicMap::analytic(make_phi_a(a)?)?;
            worst = worst.max(marty_residual(&CoefficientTriple::of(&f)?));
        }
        Ok((worst <= MARTY_TOL, format!("max residual {worst:.2e}")))
    })
}

/// Harmonic maps used by the randomized properties.
fn harmonic_pool() -> Result<Vec<HarmonicMap>> {
    Ok(vec![
        make_extremal(FamilyParams::new(1.0, 0.9)?)?,
        make_extremal(FamilyParams::new(6.0, 1.0)?)?,
        make_harmonic_koebe(),
        make_f_r(0.6)?,
    ])
}

fn analytic_pool(rng: &mut ChaCha8Rng) -> Result<AnalyticMap> {
    Ok(match rng.gen_range(0..5) {
        0 => make_phi_a(rng.gen_range(0.5..3.0))?,
        1 => make_harmonic_koebe().h,
        2 => AnalyticMap::AnalyticKoebe,
        3 => AnalyticMap::Strip,
        _ => make_lens(rng.gen_range(0.1..1.0))?,
    })
}

fn self_map(rng: &mut ChaCha8Rng) -> Result<AnalyticMap> {
    let alpha = random_disk(rng, 0.8);
    let lens = make_lens(rng.gen_range(0.05..=1.0))?;
    Ok(match rng.gen_range(0..3) {
        0 => AnalyticMap::compose(lens, AnalyticMap::automorphism(alpha)?),
        1 => AnalyticMap::compose(AnalyticMap::automorphism(alpha)?, lens),
        _ => AnalyticMap::product(AnalyticMap::Identity, lens),
    })
}

type Property = fn(&mut ChaCha8Rng, &[HarmonicMap]) -> Result<f64>;

fn mobius_kernel(rng: &mut ChaCha8Rng, _: &[HarmonicMap]) -> Result<f64> {
    loop {
        let mut coef = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (a, b, cc, d) = (coef(), coef(), coef(), coef());
        if (a * d - b * cc).norm() < 0.1 {
            continue;
        }
        let z = random_disk(rng, 0.9);
        let den = cc * z + d;
        if den.norm() < 0.1 {
            continue;
        }
        let s = schwarzian_analytic(&AnalyticMap::mobius(a, b, cc, d)?.jet(z)?)?;
        let pre = cc / den;
        return Ok(s.norm() / (1.0 + pre.norm_sqr()));
    }
}

fn affine_invariance(rng: &mut ChaCha8Rng, pool: &[HarmonicMap]) -> Result<f64> {
    let f = &pool[rng.gen_range(0..pool.len())];
    let eps = random_disk(rng, 0.9);
    let z = random_disk(rng, 0.8);
    let a = affine_change(f, eps)?;
    Ok(rel(schwarzian_harmonic(&a, z)?.value, schwarzian_harmonic(f, z)?.value))
}

fn automorphism_invariance(rng: &mut ChaCha8Rng, pool: &[HarmonicMap]) -> Result<f64> {
    let f = &pool[rng.gen_range(0..pool.len())];
    let zeta = random_disk(rng, 0.7);
    let z = random_disk(rng, 0.7);
    let k = koebe_transform(f, zeta)?;
    let moved = AnalyticMap::automorphism(zeta)?.value(z)?;
    let lhs = scaled_schwarzian(&k, z)?;
    let rhs = scaled_schwarzian(f, moved)?;
    Ok((lhs - rhs).abs() / rhs.max(1.0))
}

fn hyperbolic_chain_rule(rng: &mut ChaCha8Rng, _: &[HarmonicMap]) -> Result<f64> {
    let outer = self_map(rng)?;
    let inner = self_map(rng)?;
    let z = random_disk(rng, 0.9);
    let w = inner.value(z)?;
    let lhs = hyperbolic_derivative(&AnalyticMap::compose(outer.clone(), inner.clone()), z)?.norm();
    let rhs = hyperbolic_derivative(&outer, w)?.norm() * hyperbolic_derivative(&inner, z)?.norm();
    Ok((lhs - rhs).abs() / rhs.max(1.0))
}

fn schwarz_pick(rng: &mut ChaCha8Rng, _: &[HarmonicMap]) -> Result<f64> {
    let w = self_map(rng)?;
    let z = random_disk(rng, 0.99);
    Ok((hyperbolic_derivative(&w, z)?.norm() - 1.0).max(0.0))
}

fn lens_on_diameter(rng: &mut ChaCha8Rng, _: &[HarmonicMap]) -> Result<f64> {
    let alpha = rng.gen_range(0.05..=1.0);
    let x = rng.gen_range(-0.95..0.95);
    Ok((hyperbolic_derivative(&make_lens(alpha)?, c(x, 0.0))?.norm() - alpha).abs())
}

fn second_coefficient_of_normalized(rng: &mut ChaCha8Rng, pool: &[HarmonicMap]) -> Result<f64> {
    let f = &pool[rng.gen_range(0..pool.len())];
    let k = koebe_transform(f, random_disk(rng, 0.7))?;
    let n = affine_change(&k, k.omega0)?;
    let zero = c(0.0, 0.0);
    let g2 = n.g.derivative_jet(zero)?.f1;
    let w1 = n.dilatation(zero)?.f1;
    Ok(rel(g2, w1))
}

fn constant_antiholomorphic_part(rng: &mut ChaCha8Rng, _: &[HarmonicMap]) -> Result<f64> {
    let h = analytic_pool(rng)?;
    let g = AnalyticMap::Constant(random_disk(rng, 5.0));
    let z = random_disk(rng, 0.9);
    let sh = schwarzian_analytic(&h.jet(z)?)?;
    let sf = schwarzian_harmonic(&HarmonicMap::new(h, g)?, z)?.value;
    Ok(rel(sf, sh))
}

/// Randomized properties: name, check, tolerance on the returned error.
pub const PROPERTIES: [(&str, Property, f64); 8] = [
    ("Möbius kernel", mobius_kernel, 1e-10),
    ("affine invariance", affine_invariance, 1e-8),
    ("automorphism invariance", automorphism_invariance, 1e-8),
    ("hyperbolic chain rule", hyperbolic_chain_rule, 1e-10),
    ("Schwarz-Pick", schwarz_pick, 1e-12),
    ("lens on diameter", lens_on_diameter, 1e-12),
    ("g''(0) = ω'(0)", second_coefficient_of_normalized, 1e-9),
    ("constant g", constant_antiholomorphic_part, 1e-12),
];

/// Largest error of one property over `cases` seeded draws.
pub fn property_worst(index: usize, cases: usize) -> Result<f64> {
    let pool = harmonic_pool()?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED.wrapping_add(index as u64));
    let (_, check, _) = PROPERTIES[index];
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        worst = worst.max(check(&mut rng, &pool)?);
    }
    Ok(worst)
}

pub fn property_suites() -> CriterionOutcome {
    outcome(10, "randomized property suites", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (i, (name, _, tol)) in PROPERTIES.iter().enumerate() {
            let worst = property_worst(i, PROPERTY_CASES)?;
            ok &= worst <= *tol;
            parts.push(format!("{name} {worst:.1e}"));
        }
        Ok((ok, parts.join(", ")))
    })
}

pub fn psi_checks() -> CriterionOutcome {
    outcome(11, "Ψ(r) ≤ Ψ(0) on the imaginary axis", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (lambda, r) in EXTREMAL_SETS {
            let check = psi_monotone_check(&FamilyParams::new(lambda, r)?, PSI_SAMPLES)?;
            ok &= check.passed;
            parts.push(format!(
                "({lambda}, {r}): excess {:.2e} at r = {}",
                check.max_excess.max(0.0),
                check.argmax_r
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Runs criteria 1 through 11 in order.
pub fn run_acceptance(cfg: &GridConfig) -> Vec<CriterionOutcome> {
    vec![
        analytic_norms(cfg),
        shear_norm(cfg),
        harmonic_koebe_norm(cfg),
        extremal_norms(cfg),
        extremal_is_harmonic_koebe(),
        curve_constancy(),
        closed_form_agreement(),
        order_formulas(),
        marty_relation(),
        property_suites(),
        psi_checks(),
    ]
}
