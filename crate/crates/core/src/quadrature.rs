//! Gauss–Legendre quadrature along straight segments in the complex plane.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as Complex;

pub const NODES: usize = 32;
/// Maximum arc length covered by one panel.
pub const PANEL_LENGTH: f64 = 0.25;

/// Nodes and weights on [-1, 1].
pub fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(NODES))
}

fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral of `f` along the segment from `a` to `b`.
pub fn segment<F, E>(a: Complex, b: Complex, mut f: F) -> Result<Complex, E>
where
    F: FnMut(Complex) -> Result<Complex, E>,
{
    let len = (b - a).norm();
    let panels = ((len / PANEL_LENGTH).ceil() as usize).max(1);
    let step = (b - a) / panels as f64;
    let mut total = Complex::new(0.0, 0.0);
    for p in 0..panels {
        let start = a + step * p as f64;
        let mid = start + step * 0.5;
        for &(x, w) in rule() {
            total += f(mid + step * (0.5 * x))? * w;
        }
    }
    Ok(total * step * 0.5)
}
