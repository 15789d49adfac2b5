//! Norms and functionals of cube functions.

use serde::{Deserialize, Serialize};

use crate::cube::{partial_derivative, CubeFunction};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::numeric::{power_mean, KahanSum};

/// Entropy terms with `h` below this are treated as `0 log 0 = 0`.
pub const ENTROPY_FLOOR: f64 = 1e-300;

/// `L_p` norm of a list of pointwise norms under the uniform measure.
pub fn lp_norm_of_norms(norms: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => norms.iter().fold(0.0f64, |a, &b| a.max(b)),
        Exponent::Finite(p) => power_mean(norms, p),
    }
}

/// `||f||_p = (2^{-n} sum ||f(e)||_X^p)^{1/p}`; `p = inf` gives the max.
pub fn lp_norm(f: &CubeFunction, p: Exponent) -> Result<f64> {
    let p = p.require_at_least_one()?;
    Ok(lp_norm_of_norms(&f.pointwise_norms(), p))
}

/// `Inf^(p) f = sum_i ||∂_i f||_p^p`.
pub fn influence(f: &CubeFunction, p: Exponent) -> Result<f64> {
    let p = match p.require_at_least_one()? {
        Exponent::Finite(p) => p,
        Exponent::Infinity => {
            return Err(Error::InvalidExponent("influence needs finite p".into()))
        }
    };
    let mut acc = KahanSum::new();
    for i in 0..f.n() {
        let d = partial_derivative(f, i)?;
        acc.add(lp_norm(&d, Exponent::Finite(p))?.powf(p));
    }
    Ok(acc.value())
}

/// `Ent(h) = E h log h - (E h) log(E h)` for `h = ||f||_X^q`, `q > 0`.
pub fn entropy(f: &CubeFunction, q: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidExponent(format!("{q}")));
    }
    let h: Vec<f64> = f.pointwise_norms().iter().map(|x| x.powf(q)).collect();
    Ok(entropy_of(&h))
}

/// Entropy of a non-negative sample under the uniform measure.
pub fn entropy_of(h: &[f64]) -> f64 {
    let len = h.len() as f64;
    let mut mean = KahanSum::new();
    let mut hlogh = KahanSum::new();
    for &x in h {
        mean.add(x / len);
        if x >= ENTROPY_FLOOR {
            hlogh.add(x * x.ln() / len);
        }
    }
    let e = mean.value();
    let tail = if e >= ENTROPY_FLOOR { e * e.ln() } else { 0.0 };
    (hlogh.value() - tail).max(0.0)
}

/// `d/da ||f||_a`, from the entropy identity
/// `||f||_a Ent(||f||^a) / (a^2 ||f||_a^a)`.
pub fn lp_norm_derivative(f: &CubeFunction, alpha: f64) -> Result<f64> {
    let norm = lp_norm(f, Exponent::finite(alpha)?)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    let ent = entropy(f, alpha)?;
    Ok(norm * ent / (alpha * alpha * norm.powf(alpha)))
}

/// One evaluation of an inequality `lhs <= C rhs` on a concrete function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl RatioSample {
    /// `ratio = lhs / rhs`; `rhs = 0` with `lhs = 0` counts as ratio 0.
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 && rhs == 0.0 {
            0.0
        } else {
            lhs / rhs
        };
        RatioSample { lhs, rhs, ratio }
    }

    pub fn is_finite(&self) -> bool {
        self.ratio.is_finite()
    }
}
