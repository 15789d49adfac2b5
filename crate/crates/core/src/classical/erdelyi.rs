//! Polynomials `P(x) = sum_{k=d}^{d+m} a_k x^k` with a gap at zero:
//! `|P(1)| <= 6 sqrt(m/d) sup_{[0,1]} sqrt(1-x^2) |P'(x)|`.

use super::poly::maximize_on_interval;
use crate::error::{invalid, Error, Result};

/// Chebyshev grid size for the supremum.
pub const ERDELYI_GRID: usize = 4096;
/// Constant in front of `sqrt(m/d)`.
pub const ERDELYI_CONSTANT: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErdelyiEvaluation {
    /// `|P(1)|`.
    pub lhs: f64,
    /// `6 sqrt(m/d) * sup`.
    pub rhs: f64,
    /// Estimated `sup_{[0,1]} sqrt(1-x^2) |P'(x)|`.
    pub sup: f64,
    pub argmax: f64,
    /// Spread of the weighted derivative over the final refinement bracket.
    pub certificate: f64,
}

impl ErdelyiEvaluation {
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

fn derivative(d: usize, coeffs: &[f64], x: f64) -> f64 {
    // sum_k k a_k x^{k-1}, Horner from the top
    let mut acc = 0.0;
    for (i, a) in coeffs.iter().enumerate().rev() {
        let k = (d + i) as f64;
        acc = acc * x + k * a;
    }
    acc * x.powi(d as i32 - 1)
}

/// Evaluates both sides for `coeffs = [a_d, ..., a_{d+m}]`, `d >= 1`, `m >= 1`.
pub fn erdelyi_evaluate(d: usize, coeffs: &[f64]) -> Result<ErdelyiEvaluation> {
    if d == 0 {
        return Err(invalid("lowest degree d must be >= 1"));
    }
    if coeffs.is_empty() {
        return Err(invalid("need at least one coefficient"));
    }
    let m = coeffs.len() - 1;
    let lhs = coeffs.iter().sum::<f64>().abs();
    if m == 0 {
        return Err(Error::Degenerate(format!(
            "m = 0: the bound vanishes while |P(1)| = {lhs}"
        )));
    }
    let g = |x: f64| (1.0 - x * x).max(0.0).sqrt() * derivative(d, coeffs, x).abs();
    let best = maximize_on_interval(g, 0.0, 1.0, ERDELYI_GRID);
    let rhs = ERDELYI_CONSTANT * (m as f64 / d as f64).sqrt() * best.value;
    Ok(ErdelyiEvaluation {
        lhs,
        rhs,
        sup: best.value,
        argmax: best.argmax,
        certificate: best.certificate,
    })
}

/// Largest ratio `|P(1)| / rhs` over `P = x^d + s x^{d+1}` for `s` on a grid.
///
/// With `m = 1` this probes whether the `sqrt(m/d)` order is attained.
pub fn erdelyi_trend(d: usize, grid: usize) -> Result<(f64, f64)> {
    let mut best = (0.0, 0.0);
    for i in 0..grid {
        let s = -0.95 + 10.0 * i as f64 / grid as f64;
        let r = erdelyi_evaluate(d, &[1.0, s])?.ratio();
        if r > best.0 {
            best = (r, s);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_closed_form() {
        // P = x^d, m = 1 padding: sup of d x^{d-1} sqrt(1-x^2) at x^2 = (d-1)/d
        for d in [1usize, 2, 5, 20] {
            let e = erdelyi_evaluate(d, &[1.0, 0.0]).unwrap();
            let df = d as f64;
            let want = if d == 1 {
                1.0
            } else {
                df * ((df - 1.0) / df).powf((df - 1.0) / 2.0) * (1.0 / df).sqrt()
            };
            assert!((e.sup - want).abs() < 1e-9 * want, "d={d}");
            assert!(e.holds());
            assert!(e.certificate < 1e-9);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(erdelyi_evaluate(3, &[1.0]), Err(Error::Degenerate(_))));
        assert!(erdelyi_evaluate(0, &[1.0, 1.0]).is_err());
        assert!(erdelyi_evaluate(2, &[]).is_err());
    }

    #[test]
    fn trend_is_bounded_below() {
        let (r4, _) = erdelyi_trend(4, 50).unwrap();
        let (r64, _) = erdelyi_trend(64, 50).unwrap();
        assert!(r4 > 0.05 && r64 > 0.05);
        assert!(r4 <= 1.0 && r64 <= 1.0);
    }
}
