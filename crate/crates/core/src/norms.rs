//! Sup-norm estimation over the unit disk, plus the closed-form profiles of
//! the extremal map `f₀` used to cross-check it.
//!
//! The estimator scans a polar grid whose radii cluster geometrically toward
//! the boundary, polishes the best cells with a compass search, and probes
//! the boundary along the best rays with a ladder `r = 1 - 10^-k`. A ladder
//! that increases strictly is extrapolated linearly in `1 - r`; if that limit
//! beats every interior sample the supremum is reported as a boundary limit.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as Complex;
use rayon::prelude::*;

use crate::catalog::{make_extremal, AnalyticMap, FamilyParams, HarmonicMap};
use crate::error::{Error, Result};
use crate::schwarzian::{dilatation_hyperbolic_derivative, hyperbolic_derivative, scaled_schwarzian};

/// Relative noise floor: ladder increments and boundary gains below this are
/// rounding, not growth.
pub const LADDER_NOISE: f64 = 1e-8;
/// Samples within this relative distance of the maximum count as ties.
pub const TIE_TOL: f64 = 1e-8;
/// A reported boundary supremum has its argmax beyond this radius.
pub const BOUNDARY_RADIUS: f64 = 0.999;
/// Curve parameters must stay this far below `π/2`.
pub const CURVE_CAP: f64 = 1e-6;

const MAX_COMPASS_STEPS: usize = 20_000;

/// Scalar field on the disk whose supremum is wanted.
#[derive(Debug, Clone, Copy)]
pub enum Field<'a> {
    /// `|S_f(z)| (1 - |z|²)²`
    Schwarzian(&'a HarmonicMap),
    /// `|ω*(z)|` of an analytic self-map.
    Hyperbolic(&'a AnalyticMap),
    /// `|ω*(z)|` of the dilatation of a harmonic map.
    Dilatation(&'a HarmonicMap),
}

impl Field<'_> {
    pub fn eval(&self, z: Complex) -> Result<f64> {
        match self {
            Field::Schwarzian(f) => scaled_schwarzian(f, z),
            Field::Hyperbolic(w) => Ok(hyperbolic_derivative(w, z)?.norm()),
            Field::Dilatation(f) => Ok(dilatation_hyperbolic_derivative(f, z)?.norm()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub n_r: usize,
    pub n_theta: usize,
    /// Compass-search step at which refinement stops.
    pub refine_tol: f64,
    /// Number of best grid cells that get refined and ladder-probed.
    pub refine_top: usize,
    /// Number of ladder rungs, `k = 3, 4, …`.
    pub ladder_depth: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n_r: 256, n_theta: 512, refine_tol: 1e-10, refine_top: 8, ladder_depth: 5 }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_r < 2 || self.n_theta < 1 {
            return Err(Error::InvalidParameter(format!(
                "grid needs n_r ≥ 2 and n_theta ≥ 1, got ({}, {})",
                self.n_r, self.n_theta
            )));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol <= 1e-4) {
            return Err(Error::InvalidParameter(format!(
                "refine tolerance must lie in (0, 1e-4], got {}",
                self.refine_tol
            )));
        }
        if !(2..=10).contains(&self.ladder_depth) {
            return Err(Error::InvalidParameter(format!(
                "ladder depth must lie in [2, 10], got {}",
                self.ladder_depth
            )));
        }
        Ok(())
    }

    /// `r_j = 1 - 2^(-8j/n_r)`, `j = 0..n_r`.
    pub fn radius(&self, j: usize) -> f64 {
        1.0 - (-8.0 * j as f64 / self.n_r as f64).exp2()
    }

    pub fn angle(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_theta as f64
    }

    /// Scan points in row-major order: the origin, then each ring by angle.
    pub fn points(&self) -> Vec<Complex> {
        let mut pts = Vec::with_capacity(1 + (self.n_r - 1) * self.n_theta);
        pts.push(Complex::new(0.0, 0.0));
        for j in 1..self.n_r {
            let r = self.radius(j);
            for k in 0..self.n_theta {
                pts.push(Complex::from_polar(r, self.angle(k)));
            }
        }
        pts
    }

    fn ladder_radii(&self) -> Vec<f64> {
        (0..self.ladder_depth).map(|i| 1.0 - 10f64.powi(-(3 + i as i32))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub argmax: Complex,
    /// `false` when the supremum is a boundary limit.
    pub attained: bool,
    pub grid: (usize, usize),
    /// Interior: gain of refinement over the best grid sample.
    /// Boundary: spread between the last two ladder extrapolations.
    pub refinement_error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    z: Complex,
    value: f64,
}

/// Larger value first; ties broken by smaller `|z|`, then smaller argument.
fn rank(a: &Sample, b: &Sample) -> Ordering {
    b.value
        .partial_cmp(&a.value)
        .unwrap_or(Ordering::Equal)
        .then_with(|| tie_order(a, b))
}

fn tie_order(a: &Sample, b: &Sample) -> Ordering {
    a.z.norm()
        .partial_cmp(&b.z.norm())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.z.arg().partial_cmp(&b.z.arg()).unwrap_or(Ordering::Equal))
}

fn scale_of(v: f64) -> f64 {
    v.abs().max(1.0)
}

/// Field values on the scan grid, in [`GridConfig::points`] order.
pub fn heatmap(field: &Field, cfg: &GridConfig) -> Result<Vec<(Complex, f64)>> {
    cfg.validate()?;
    let pts = cfg.points();
    let values: Vec<Result<f64>> = pts.par_iter().map(|z| field.eval(*z)).collect();
    pts.into_iter()
        .zip(values)
        .map(|(z, v)| v.map(|v| (z, v)))
        .collect()
}

fn compass(field: &Field, start: Sample, step: f64, tol: f64, r_cap: f64) -> Result<Sample> {
    let dirs = [
        Complex::new(1.0, 0.0),
        Complex::new(-1.0, 0.0),
        Complex::new(0.0, 1.0),
        Complex::new(0.0, -1.0),
    ];
    let mut best = start;
    let mut h = step;
    let mut iters = 0;
    while h >= tol && iters < MAX_COMPASS_STEPS {
        iters += 1;
        let mut moved = false;
        for d in dirs {
            let z = best.z + d * h;
            if z.norm() > r_cap {
                continue;
            }
            let v = field.eval(z)?;
            if v > best.value {
                best = Sample { z, value: v };
                moved = true;
                break;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    Ok(best)
}

struct Ladder {
    samples: Vec<Sample>,
    limit: Option<(f64, f64)>,
}

fn ladder(field: &Field, theta: f64, radii: &[f64]) -> Result<Ladder> {
    let samples = radii
        .iter()
        .map(|&r| {
            let z = Complex::from_polar(r, theta);
            field.eval(z).map(|value| Sample { z, value })
        })
        .collect::<Result<Vec<_>>>()?;
    let increasing = samples
        .windows(2)
        .all(|w| w[1].value - w[0].value > LADDER_NOISE * scale_of(w[1].value));
    let limit = if increasing {
        let n = samples.len();
        // linear in ε = 1 - r with ε shrinking tenfold per rung
        let extrapolate = |lo: f64, hi: f64| hi + (hi - lo) / 9.0;
        let last = extrapolate(samples[n - 2].value, samples[n - 1].value);
        let err = if n >= 3 {
            (last - extrapolate(samples[n - 3].value, samples[n - 2].value)).abs()
        } else {
            (last - samples[n - 1].value).abs()
        };
        Some((last, err))
    } else {
        None
    };
    Ok(Ladder { samples, limit })
}

/// Estimates `sup_{|z|<1}` of `field`.
pub fn sup_norm(field: &Field, cfg: &GridConfig) -> Result<NormEstimate> {
    let grid: Vec<Sample> = heatmap(field, cfg)?
        .into_iter()
        .map(|(z, value)| Sample { z, value })
        .collect();
    let mut ranked: Vec<usize> = (0..grid.len()).collect();
    ranked.sort_by(|&a, &b| rank(&grid[a], &grid[b]));
    let top: Vec<usize> = ranked.into_iter().take(cfg.refine_top.max(1)).collect();
    let best_grid = grid[top[0]].value;

    let r_cap = cfg.radius(cfg.n_r - 1);
    let dtheta = 2.0 * PI / cfg.n_theta as f64;
    let starts: Vec<(Sample, f64)> = top
        .iter()
        .map(|&i| {
            // index 0 is the origin; ring j occupies 1 + (j-1)·n_theta ..
            let j = if i == 0 { 0 } else { 1 + (i - 1) / cfg.n_theta };
            let r = cfg.radius(j);
            let dr = cfg.radius((j + 1).min(cfg.n_r - 1)) - r;
            let step = dr.max(r * dtheta).max(cfg.radius(1));
            (grid[i], step)
        })
        .collect();
    let refined = starts
        .par_iter()
        .map(|(s, step)| compass(field, *s, *step, cfg.refine_tol, r_cap))
        .collect::<Vec<Result<Sample>>>()
        .into_iter()
        .collect::<Result<Vec<Sample>>>()?;
    let best_refined = refined.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);

    let mut angles: Vec<f64> = Vec::new();
    for &i in &top {
        if i == 0 {
            continue;
        }
        let theta = cfg.angle((i - 1) % cfg.n_theta);
        if !angles.contains(&theta) {
            angles.push(theta);
        }
    }
    let radii = cfg.ladder_radii();
    let ladders = angles
        .par_iter()
        .map(|&t| ladder(field, t, &radii))
        .collect::<Vec<Result<Ladder>>>()
        .into_iter()
        .collect::<Result<Vec<Ladder>>>()?;

    let mut all: Vec<Sample> = grid;
    all.extend(refined.iter().copied());
    for l in &ladders {
        all.extend(l.samples.iter().copied());
    }
    let max_sample = all.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);

    let boundary = ladders
        .iter()
        .filter_map(|l| l.limit.map(|(v, e)| (v, e, l.samples[l.samples.len() - 1].z)))
        .fold(None, |acc: Option<(f64, f64, Complex)>, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        });

    if let Some((limit, err, z)) = boundary {
        if limit > max_sample + LADDER_NOISE * scale_of(limit) {
            return Ok(NormEstimate {
                value: limit,
                argmax: z,
                attained: false,
                grid: (cfg.n_r, cfg.n_theta),
                refinement_error: err,
            });
        }
    }

    let floor = max_sample - TIE_TOL * scale_of(max_sample);
    let argmax = all
        .iter()
        .filter(|s| s.value >= floor)
        .min_by(|a, b| tie_order(a, b))
        .map(|s| s.z)
        .unwrap_or_default();
    Ok(NormEstimate {
        value: max_sample,
        argmax,
        attained: true,
        grid: (cfg.n_r, cfg.n_theta),
        refinement_error: (best_refined.max(best_grid) - best_grid).abs(),
    })
}

/// A point of the curve `C_γ = {z : Arg((1+z)/(1-z)) = γ}` with `(1+z)/(1-z) = t e^{iγ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub gamma: f64,
    pub t: f64,
    pub z: Complex,
    /// `((1+z)/(1-z))^R`
    pub w: Complex,
    /// `w / Re(w)`
    pub beta: Complex,
}

/// `w = ((1+z)/(1-z))^R` and `β = w / Re w`.
fn lens_ratio(r: f64, z: Complex) -> (Complex, Complex) {
    let ell = (1.0 + z) / (1.0 - z);
    let w = if r == 0.0 { Complex::new(1.0, 0.0) } else { (r * ell.ln()).exp() };
    (w, w / w.re)
}

impl CurvePoint {
    pub fn new(p: &FamilyParams, gamma: f64, t: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2 - CURVE_CAP).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "γ must lie in [0, π/2 - {CURVE_CAP}], got {gamma}"
            )));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
        }
        let q = Complex::from_polar(t, gamma);
        let z = (q - 1.0) / (q + 1.0);
        if z.norm_sqr() >= 1.0 {
            return Err(Error::OutOfDomain(z));
        }
        let (w, beta) = lens_ratio(p.r, z);
        Ok(CurvePoint { gamma, t, z, w, beta })
    }
}

/// Scaled Schwarzian of `f₀` along `C_γ`, evaluated by the direct pipeline.
pub fn curve_samples(p: &FamilyParams, gamma: f64, ts: &[f64]) -> Result<Vec<(CurvePoint, f64)>> {
    let f = make_extremal(*p)?;
    ts.iter()
        .map(|&t| {
            let cp = CurvePoint::new(p, gamma, t)?;
            Ok((cp, scaled_schwarzian(&f, cp.z)?))
        })
        .collect()
}

/// Coefficients of the closed-form profile of `f₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub c_tilde: f64,
    pub k: f64,
}

impl ClosedFormCoeffs {
    pub fn new(p: &FamilyParams) -> Self {
        let (lambda, r, a) = (p.lambda, p.r, p.a);
        let r2 = r * r;
        ClosedFormCoeffs {
            a: 2.0 * (1.0 - a * a),
            b: 2.0 * r * (r - a),
            c: -1.5 * r2,
            a_tilde: 4.0 * (1.0 - a * a) * (1.0 - (a + r) * (a + r)),
            b_tilde: 2.0 * r2 * (3.0 - a * r - a * a - r2),
            c_tilde: 2.25 * r2 * r2,
            k: r2 * r2 + 4.0 * a * a * r2 + 4.0 * a * r2 * r - 3.0 * r2 * lambda,
        }
    }

    /// `(A² + 2AB + 4AC, B² + 2BC - 2AC, C²)`, the expansion of
    /// `|A + Bβ + Cβ²|²` in powers of `|β|²` when `Re β = 1`.
    pub fn tilde_from_quadratic(&self) -> (f64, f64, f64) {
        let (a, b, c) = (self.a, self.b, self.c);
        (a * a + 2.0 * a * b + 4.0 * a * c, b * b + 2.0 * b * c - 2.0 * a * c, c * c)
    }
}

/// `|A + Bβ + Cβ²| · ((1 - |z|²)/|1 - z²|)²`.
pub fn closed_form_scaled(p: &FamilyParams, z: Complex) -> Result<f64> {
    if z.norm_sqr() >= 1.0 {
        return Err(Error::OutOfDomain(z));
    }
    let k = ClosedFormCoeffs::new(p);
    let (_, beta) = lens_ratio(p.r, z);
    let poly = k.a + k.b * beta + k.c * beta * beta;
    let weight = (1.0 - z.norm_sqr()) / (1.0 - z * z).norm();
    Ok(poly.norm() * weight * weight)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiProfile {
    /// `Φ(r) = |S_{f₀}(ir)| (1 - r²)²` from the quadratic in `β`.
    pub phi_form: f64,
    /// `Ψ(r) = Φ(r)²` from `cos⁴γ_r (λ² + K tan²(Rγ_r) + (9R⁴/4) tan⁴(Rγ_r))`.
    pub trig_form: f64,
}

/// `γ_r` with `cos γ_r = (1 - r²)/(1 + r²)`.
pub fn gamma_r(r: f64) -> f64 {
    (2.0 * r).atan2(1.0 - r * r)
}

pub fn psi_profile(p: &FamilyParams, r: f64) -> Result<PsiProfile> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("r must lie in [0, 1), got {r}")));
    }
    let phi_form = closed_form_scaled(p, Complex::new(0.0, r))?;
    Ok(PsiProfile { phi_form, trig_form: psi_trig(p, &ClosedFormCoeffs::new(p), r) })
}

fn psi_trig(p: &FamilyParams, k: &ClosedFormCoeffs, r: f64) -> f64 {
    let cos_g = (1.0 - r * r) / (1.0 + r * r);
    let t2 = (p.r * gamma_r(r)).tan().powi(2);
    cos_g.powi(4) * (p.lambda * p.lambda + k.k * t2 + k.c_tilde * t2 * t2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiCheck {
    pub psi0: f64,
    pub max_psi: f64,
    pub argmax_r: f64,
    /// `max_r Ψ(r) - Ψ(0)`
    pub max_excess: f64,
    /// Largest step-to-step increase of `Ψ` on the grid.
    pub max_increase: f64,
    pub nonincreasing: bool,
    /// Set when `(λ, R)` lies outside the regime where `sup Ψ = Ψ(0)` is proven.
    pub regime_warning: Option<String>,
    pub passed: bool,
}

/// Tolerance of the `Ψ(r) ≤ Ψ(0)` check.
pub const PSI_TOL: f64 = 1e-9;

/// Samples `Ψ` at `r = i/samples` and checks `Ψ(r) ≤ Ψ(0) + 1e-9`.
pub fn psi_monotone_check(p: &FamilyParams, samples: usize) -> Result<PsiCheck> {
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {samples}")));
    }
    let k = ClosedFormCoeffs::new(p);
    let values: Vec<f64> =
        (0..samples).map(|i| psi_trig(p, &k, i as f64 / samples as f64)).collect();
    let psi0 = values[0];
    let (imax, max_psi) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let max_increase = values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let verified = (p.lambda <= 1.5 && p.a < 1.0) || p.r == 1.0;
    let regime_warning = (!verified).then(|| {
        format!(
            "(λ, R) = ({}, {}) is outside the proven regime (λ ≤ 3/2 with a < 1, or R = 1)",
            p.lambda, p.r
        )
    });
    Ok(PsiCheck {
        psi0,
        max_psi,
        argmax_r: imax as f64 / samples as f64,
        max_excess: max_psi - psi0,
        max_increase,
        nonincreasing: max_increase <= 1e-12 * scale_of(psi0),
        regime_warning,
        passed: max_psi <= psi0 + PSI_TOL,
    })
}
