//! Small numerical helpers shared across modules.

use num_complex::Complex64;

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `ln C(n, k)` for all `k` in `0..=n`, accumulated with compensation.
pub fn ln_binomials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = KahanSum::new();
    out.push(0.0);
    for k in 0..n {
        acc.add(((n - k) as f64 / (k + 1) as f64).ln());
        out.push(acc.value());
    }
    out
}

/// `(mean_i x_i^p)^{1/p}` for non-negative `x`, scaled by the maximum so
/// large exponents neither overflow nor underflow.
pub fn power_mean(xs: &[f64], p: f64) -> f64 {
    weighted_power_mean(xs.iter().map(|&x| (x, 1.0 / xs.len() as f64)), p)
}

/// `(sum_i w_i x_i^p)^{1/p}` with weights summing to one.
pub fn weighted_power_mean(it: impl Iterator<Item = (f64, f64)> + Clone, p: f64) -> f64 {
    let max = it
        .clone()
        .filter(|&(_, w)| w > 0.0)
        .fold(0.0f64, |m, (x, _)| m.max(x));
    if max == 0.0 || !max.is_finite() {
        return max;
    }
    let mut acc = KahanSum::new();
    for (x, w) in it {
        if w > 0.0 && x > 0.0 {
            acc.add(w * (x / max).powf(p));
        }
    }
    max * acc.value().powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive() {
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
        }
        assert!((k.value() - (1.0 + 1e-12)).abs() < 1e-20);
    }

    #[test]
    fn ln_binomials_small() {
        let lb = ln_binomials(10);
        assert!((lb[5].exp() - 252.0).abs() < 1e-9);
        assert!(lb[10].abs() < 1e-14);
    }

    #[test]
    fn power_mean_large_p_is_stable() {
        let xs = [1e200, 3e200];
        let v = power_mean(&xs, 400.0);
        assert!(v.is_finite() && v > 2.99e200 && v < 3e200);
    }
}
