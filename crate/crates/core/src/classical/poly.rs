//! Polynomial helpers: Chebyshev series and maximization on an interval.

/// `p(x) = sum_k c[k] T_k(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevSeries {
    pub coeffs: Vec<f64>,
}

impl ChebyshevSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        ChebyshevSeries { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        let c0 = self.coeffs.first().copied().unwrap_or(0.0);
        x * b1 - b2 + c0
    }

    /// Series of `p'`.
    pub fn derivative(&self) -> ChebyshevSeries {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebyshevSeries::new(vec![0.0]);
        }
        let mut d = vec![0.0; n - 1];
        // d_{k-1} = d_{k+1} + 2k c_k, with c_0 term halved at the end
        for k in (1..n).rev() {
            let next = if k + 1 < n - 1 { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        ChebyshevSeries::new(d)
    }
}

/// Result of [`maximize_on_interval`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub value: f64,
    pub argmax: f64,
    /// Spread of `g` over the final golden-section bracket.
    pub certificate: f64,
}

/// Maximizes `g` on `[a, b]`: Chebyshev-node grid of `grid` points plus the
/// endpoints, then golden-section refinement around the best grid point.
pub fn maximize_on_interval(g: impl Fn(f64) -> f64, a: f64, b: f64, grid: usize) -> Maximum {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut xs: Vec<f64> = (0..grid)
        .map(|i| mid - half * (std::f64::consts::PI * (i as f64 + 0.5) / grid as f64).cos())
        .collect();
    xs.insert(0, a);
    xs.push(b);
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let v = g(x);
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    let lo = xs[best.saturating_sub(1)];
    let hi = xs[(best + 1).min(xs.len() - 1)];
    let (x, v, cert) = golden_section(&g, lo, hi);
    if v >= best_v {
        Maximum {
            value: v,
            argmax: x,
            certificate: cert,
        }
    } else {
        Maximum {
            value: best_v,
            argmax: xs[best],
            certificate: cert,
        }
    }
}

fn golden_section(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    for _ in 0..200 {
        if hi - lo <= 1e-14 * (1.0 + lo.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        }
    }
    let (x, v) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    let ends = [g(lo), g(hi)];
    let cert = ends.iter().map(|e| (v - e).abs()).fold(0.0, f64::max);
    (x, v, cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::chebyshev::chebyshev_t;

    #[test]
    fn series_of_single_chebyshev() {
        for d in 0..10 {
            let mut c = vec![0.0; d + 1];
            c[d] = 1.0;
            let s = ChebyshevSeries::new(c);
            for x in [-0.9, -0.1, 0.4, 1.0] {
                assert!((s.eval(x) - chebyshev_t(d, x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let s = ChebyshevSeries::new(vec![0.3, -1.0, 0.5, 2.0, -0.7, 0.1]);
        let ds = s.derivative();
        for x in [-0.8, 0.0, 0.55, 0.99] {
            let h = 1e-6;
            let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
            assert!((fd - ds.eval(x)).abs() < 1e-6);
        }
        // T_d'(1) = d^2
        let mut c = vec![0.0; 8];
        c[7] = 1.0;
        assert!((ChebyshevSeries::new(c).derivative().eval(1.0) - 49.0).abs() < 1e-11);
    }

    #[test]
    fn maximizer_finds_interior_peak() {
        let m = maximize_on_interval(|x| -(x - 0.3141).powi(2) + 2.0, 0.0, 1.0, 64);
        assert!((m.argmax - 0.3141).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-14);
        assert!(m.certificate < 1e-12);
    }
}
