//! Chebyshev polynomials of the first kind.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Above this degree the closed forms are used instead of the recurrence.
const RECURRENCE_MAX_D: usize = 64;

/// `T_d(x)` for real `x`.
pub fn chebyshev_t(d: usize, x: f64) -> f64 {
    if d <= RECURRENCE_MAX_D {
        return chebyshev_t_recurrence(d, x);
    }
    if x.abs() <= 1.0 {
        (d as f64 * x.acos()).cos()
    } else {
        let sign = if x < 0.0 && d % 2 == 1 { -1.0 } else { 1.0 };
        sign * (d as f64 * x.abs().acosh()).cosh()
    }
}

/// `T_{k+1} = 2x T_k - T_{k-1}`.
pub fn chebyshev_t_recurrence(d: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if d == 0 {
        return 1.0;
    }
    for _ in 1..d {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `T_d(cos th) = cos(d th)`, for `|x| <= 1`.
pub fn chebyshev_t_cosine(d: usize, x: f64) -> Result<f64> {
    if x.abs() > 1.0 {
        return Err(invalid(format!("cosine form needs |x| <= 1, got {x}")));
    }
    Ok((d as f64 * x.acos()).cos())
}

/// `T_d(y) = ((y + sqrt(y^2-1))^d + (y - sqrt(y^2-1))^d) / 2`, for `|y| >= 1`.
pub fn chebyshev_t_hyperbolic(d: usize, y: f64) -> Result<f64> {
    if y.abs() < 1.0 {
        return Err(invalid(format!("closed form needs |y| >= 1, got {y}")));
    }
    let s = (y * y - 1.0).sqrt();
    let di = d as i32;
    Ok(((y + s).powi(di) + (y - s).powi(di)) / 2.0)
}

/// `T_d(z)` for complex `z`.
pub fn chebyshev_t_complex(d: usize, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if d == 0 {
        return one;
    }
    let (mut prev, mut cur) = (one, z);
    for _ in 1..d {
        let next = z * cur * 2.0 - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `T_d^{(k)}(1) = prod_{j<k} (d^2 - j^2) / (1 * 3 * ... * (2k-1))`.
pub fn chebyshev_deriv_at_one(d: usize, k: usize) -> f64 {
    let d2 = (d * d) as f64;
    (0..k)
        .map(|j| (d2 - (j * j) as f64) / (2 * j + 1) as f64)
        .product()
}

/// [`chebyshev_deriv_at_one`] in exact integer arithmetic; `None` on overflow.
pub fn chebyshev_deriv_at_one_exact(d: u64, k: u64) -> Option<i128> {
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for j in 0..k {
        num = num.checked_mul(d as i128 * d as i128 - (j * j) as i128)?;
        den = den.checked_mul(2 * j as i128 + 1)?;
    }
    Some(num / den)
}

/// Growth bound `e^{3 max(t, sqrt t) d}` for `T_d(e^t)`, `t >= 0`.
pub fn chsqrt_bound(d: usize, t: f64) -> f64 {
    (3.0 * t.max(t.sqrt()) * d as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn low_degrees() {
        for x in [-1.3, -0.5, 0.0, 0.25, 1.0, 2.0] {
            assert_eq!(chebyshev_t(0, x), 1.0);
            assert_eq!(chebyshev_t(1, x), x);
            assert!((chebyshev_t(2, x) - (2.0 * x * x - 1.0)).abs() < 1e-14);
            assert!((chebyshev_t(3, x) - (4.0 * x * x * x - 3.0 * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn routes_agree() {
        for d in [0usize, 1, 2, 5, 13, 40, 64] {
            for i in 0..=200 {
                let x = -1.0 + 2.0 * i as f64 / 200.0;
                let a = chebyshev_t_recurrence(d, x);
                let b = chebyshev_t_cosine(d, x).unwrap();
                assert!((a - b).abs() < 1e-12, "d={d} x={x}");
            }
            for y in [1.0, 1.01, 1.5, 3.0, -1.2, -2.5] {
                let a = chebyshev_t_recurrence(d, y);
                let b = chebyshev_t_hyperbolic(d, y).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "d={d} y={y}");
            }
        }
        assert!(chebyshev_t_cosine(3, 1.5).is_err());
        assert!(chebyshev_t_hyperbolic(3, 0.5).is_err());
    }

    #[test]
    fn high_degree_dispatch() {
        let d = 100;
        let x = 0.3;
        assert!((chebyshev_t(d, x) - (d as f64 * x.acos()).cos()).abs() < 1e-12);
        assert!((chebyshev_t(d, -1.001) - chebyshev_t_recurrence(d, -1.001)).abs() < 1e-9 * chebyshev_t(d, 1.001));
    }

    #[test]
    fn derivative_values() {
        assert_eq!(chebyshev_deriv_at_one(4, 2), 80.0);
        assert_eq!(chebyshev_deriv_at_one(5, 1), 25.0);
        assert_eq!(chebyshev_deriv_at_one(7, 0), 1.0);
        assert_eq!(chebyshev_deriv_at_one(3, 4), 0.0);
        assert_eq!(chebyshev_deriv_at_one_exact(4, 2), Some(80));
    }

    #[test]
    fn complex_matches_real() {
        for d in 0..12 {
            let x = 0.37;
            let z = chebyshev_t_complex(d, Complex64::new(x, 0.0));
            assert!((z.re - chebyshev_t(d, x)).abs() < 1e-13 && z.im == 0.0);
        }
    }

    proptest! {
        #[test]
        fn bounded_on_interval(d in 0usize..60, x in -1.0f64..1.0) {
            prop_assert!(chebyshev_t(d, x).abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn growth_bound(d in 1usize..30, t in 0.0f64..5.0) {
            let v = chebyshev_t(d, t.exp());
            prop_assert!(v <= chsqrt_bound(d, t) * (1.0 + 1e-12));
        }

        #[test]
        fn parity(d in 0usize..30, x in 0.0f64..3.0) {
            let s = if d % 2 == 0 { 1.0 } else { -1.0 };
            let a = chebyshev_t(d, -x);
            let b = s * chebyshev_t(d, x);
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}
