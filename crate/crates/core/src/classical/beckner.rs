//! Complex hypercontractivity domain for `p > 2` and the `L_1`-`L_2`
//! comparison constant extracted from it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lens::theta_p;
use crate::error::{invalid, Result};
use crate::exponent::Exponent;

/// Membership in the closed set
/// `{ max(|w - c|, |w + c|) <= p / (2(p-1)) }`, `c = (p-2) / (2(p-1))`.
pub fn beckner_membership(p: f64, w: Complex64) -> Result<bool> {
    Ok(beckner_gauge(p, w)? <= 1e-12)
}

/// `max(|w - c|, |w + c|) - p / (2(p-1))`; non-positive on the domain.
pub fn beckner_gauge(p: f64, w: Complex64) -> Result<f64> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(invalid(format!("need 2 < p < inf, got {p}")));
    }
    let c = (p - 2.0) / (2.0 * (p - 1.0));
    let r = p / (2.0 * (p - 1.0));
    Ok((w - c).norm().max((w + c).norm()) - r)
}

/// `((i s w - 1)^a + (i s w + 1)^a) / ((i s w - 1)^a - (i s w + 1)^a)` with
/// `s = sqrt(p-1)`, `a = π / (2π - θ_p)`, principal branch.
pub fn comparison_map(p: f64, w: Complex64) -> Result<Complex64> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(invalid(format!("need 2 < p < inf, got {p}")));
    }
    let theta = theta_p(Exponent::Finite(p))?;
    let a = PI / (2.0 * PI - theta);
    let z = Complex64::new(0.0, (p - 1.0).sqrt()) * w;
    let u = (z - 1.0).powf(a);
    let v = (z + 1.0).powf(a);
    Ok((u + v) / (u - v))
}

/// `|comparison_map(p, 1)|^{p / (2(p-2))}`.
pub fn comparison_value(p: f64) -> Result<f64> {
    let z = comparison_map(p, Complex64::new(1.0, 0.0))?;
    Ok(z.norm().powf(p / (2.0 * (p - 2.0))))
}

/// Grid minimum of [`comparison_value`] over `p > 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentConstant {
    pub value: f64,
    pub argmin_p: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub grid_points: usize,
}

/// Minimizes [`comparison_value`] on a log grid of `p - 2` in `[1e-3, 1e3]`,
/// then refines between the neighbours of the best grid point. The result is
/// the grid minimizer; no global optimality is claimed.
pub fn moment_comp1_constant() -> Result<MomentConstant> {
    let grid_points = 2001;
    let (lo, hi) = (1e-3f64.ln(), 1e3f64.ln());
    let p_of = |s: f64| 2.0 + s.exp();
    let mut best = (f64::INFINITY, 0);
    let ss: Vec<f64> = (0..grid_points)
        .map(|i| lo + (hi - lo) * i as f64 / (grid_points - 1) as f64)
        .collect();
    for (i, &s) in ss.iter().enumerate() {
        let v = comparison_value(p_of(s))?;
        if v < best.0 {
            best = (v, i);
        }
    }
    let (mut a, mut b) = (
        ss[best.1.saturating_sub(1)],
        ss[(best.1 + 1).min(grid_points - 1)],
    );
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let f = |s: f64| comparison_value(p_of(s)).unwrap_or(f64::INFINITY);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-12 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    let (s, v) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    let (s, v) = if v < best.0 { (s, v) } else { (ss[best.1], best.0) };
    Ok(MomentConstant {
        value: v,
        argmin_p: p_of(s),
        p_min: p_of(lo),
        p_max: p_of(hi),
        grid_points,
    })
}
