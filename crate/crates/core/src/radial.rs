//! Radial functions: `f(e)` depends only on the number `j` of minus signs.
//!
//! A radial function is stored as `phi[j]`, `j = 0..=n`, so large `n` (tens
//! of thousands) is cheap. Its Walsh coefficients are constant on each level
//! and are computed with Krawtchouk polynomials.
//!
//! Level data is kept in orthonormal form: `amplitude[k] = sqrt(C(n,k)) c[k]`
//! where `c[k]` is the common coefficient `f^(A)` for `|A| = k`. The raw `c[k]`
//! under- or overflows `f64` once `n` is in the low thousands, the amplitudes
//! stay bounded by `||f||_2`.

use num_complex::Complex64;

use crate::cube::{check_n, level, CubeFunction, TargetSpace};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::numeric::{ln_binomials, weighted_power_mean, KahanComplex};

/// Scalar radial function `phi[j]`, value at any vertex with `j` minus signs.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialFunction {
    n: usize,
    phi: Vec<Complex64>,
}

impl RadialFunction {
    pub fn new(n: usize, phi: Vec<Complex64>) -> Result<Self> {
        if phi.len() != n + 1 {
            return Err(Error::LengthMismatch {
                expected: n + 1,
                got: phi.len(),
            });
        }
        Ok(RadialFunction { n, phi })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> Complex64) -> Self {
        RadialFunction {
            n,
            phi: (0..=n).map(f).collect(),
        }
    }

    /// `e -> T_d((e_1 + ... + e_n) / n)`, i.e. `phi[j] = T_d(1 - 2j/n)`.
    pub fn chebyshev_witness(n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        Ok(Self::from_fn(n, |j| {
            let x = 1.0 - 2.0 * j as f64 / n as f64;
            Complex64::new(crate::classical::chebyshev::chebyshev_t(d, x), 0.0)
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> &[Complex64] {
        &self.phi
    }

    /// Dense representation on `{-1,1}^n`.
    pub fn expand(&self) -> Result<CubeFunction> {
        check_n(self.n)?;
        CubeFunction::new(
            self.n,
            TargetSpace::Scalar,
            (0..1usize << self.n).map(|v| self.phi[level(v)]).collect(),
        )
    }

    /// Reads a dense scalar function that is radial (up to `tol`).
    pub fn from_cube(f: &CubeFunction, tol: f64) -> Result<Self> {
        if !f.target().is_scalar() {
            return Err(Error::UnsupportedTarget("radial functions are scalar".into()));
        }
        let n = f.n();
        let mut phi: Vec<Option<Complex64>> = vec![None; n + 1];
        for (v, z) in f.values().iter().enumerate() {
            let j = level(v);
            match phi[j] {
                None => phi[j] = Some(*z),
                Some(w) if (w - z).norm() > tol => {
                    return Err(Error::InvalidParameter(format!(
                        "function is not radial at layer {j}"
                    )))
                }
                _ => {}
            }
        }
        Ok(RadialFunction {
            n,
            phi: phi.into_iter().map(|z| z.unwrap_or_default()).collect(),
        })
    }
}

/// Orthonormal level amplitudes of a radial function.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSpectrum {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl LevelSpectrum {
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != n + 1 {
            return Err(Error::LengthMismatch {
                expected: n + 1,
                got: amplitudes.len(),
            });
        }
        Ok(LevelSpectrum { n, amplitudes })
    }

    /// From the per-subset coefficients `c[k]`.
    pub fn from_coefficients(n: usize, c: &[Complex64]) -> Result<Self> {
        if c.len() != n + 1 {
            return Err(Error::LengthMismatch {
                expected: n + 1,
                got: c.len(),
            });
        }
        let lb = ln_binomials(n);
        Ok(LevelSpectrum {
            n,
            amplitudes: c
                .iter()
                .zip(&lb)
                .map(|(z, l)| z * (0.5 * l).exp())
                .collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `sqrt(C(n,k)) c[k]`; `sum_k |amplitude[k]|^2 = ||f||_2^2`.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// The common Walsh coefficient `c[k]` of every `|A| = k`.
    pub fn coefficient(&self, k: usize) -> Complex64 {
        let lb = ln_binomial(self.n, k);
        self.amplitudes[k] * (-0.5 * lb).exp()
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        let lb = ln_binomials(self.n);
        self.amplitudes
            .iter()
            .zip(&lb)
            .map(|(a, l)| a * (-0.5 * l).exp())
            .collect()
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_binomials(n)[k]
}

/// Krawtchouk polynomial `K_k(j; n) = sum_i (-1)^i C(j,i) C(n-j,k-i)`,
/// by the three-term recurrence in `k`. Exact in `f64` while values stay
/// below `2^53` (all `n <= 30`).
pub fn krawtchouk(k: usize, j: usize, n: usize) -> Result<f64> {
    if k > n || j > n {
        return Err(Error::InvalidParameter(format!(
            "krawtchouk needs k, j <= n (k = {k}, j = {j}, n = {n})"
        )));
    }
    let x = n as f64 - 2.0 * j as f64;
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return Ok(prev);
    }
    for i in 1..k {
        let next = (x * cur - (n - i + 1) as f64 * prev) / (i + 1) as f64;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

const RESCALE: f64 = 1e150;

// Runs the orthonormal Krawtchouk recurrence for fixed j <= n/2 over
// k = 0..=n/2, calling `visit(k, value)` with `e_k(j) * exp(shift)`.
fn walk_orthonormal(n: usize, j: usize, shift: f64, mut visit: impl FnMut(usize, f64)) {
    let half = n / 2;
    let x = n as f64 - 2.0 * j as f64;
    let mut scale_ln = shift;
    let mut factor = scale_ln.exp();
    let mut prev = 0.0;
    let mut cur = 1.0;
    visit(0, cur * factor);
    for k in 0..half {
        let a = ((k + 1) as f64 * (n - k) as f64).sqrt();
        let b = (k as f64 * (n - k + 1) as f64).sqrt();
        let next = (x * cur - b * prev) / a;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            scale_ln += RESCALE.ln();
            factor = scale_ln.exp();
        }
        visit(k + 1, cur * factor);
    }
}

// The four symmetric images of (k, j) with the sign of e_k(j) there.
fn images(n: usize, k: usize, j: usize) -> [(usize, usize, f64, bool); 4] {
    let sg = |e: usize| if e % 2 == 0 { 1.0 } else { -1.0 };
    let dup_k = n - k == k;
    let dup_j = n - j == j;
    [
        (k, j, 1.0, true),
        (k, n - j, sg(k), !dup_j),
        (n - k, j, sg(j), !dup_k),
        (n - k, n - j, sg(n - j + k), !dup_k && !dup_j),
    ]
}

/// Orthonormal level amplitudes of a radial function, `O(n^2)`.
pub fn radial_to_levels(f: &RadialFunction) -> LevelSpectrum {
    let n = f.n;
    let lb = ln_binomials(n);
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let mut acc = vec![KahanComplex::default(); n + 1];
    for j in 0..=n / 2 {
        // amplitude[k] = sum_j w_j phi[j] e_k(j), w_j = C(n,j) / 2^n
        walk_orthonormal(n, j, lb[j] - ln2n, |k, we| {
            for (kk, jj, s, live) in images(n, k, j) {
                if live {
                    acc[kk].add(f.phi[jj] * (s * we));
                }
            }
        });
    }
    LevelSpectrum {
        n,
        amplitudes: acc.iter().map(|a| a.value()).collect(),
    }
}

/// Inverse of [`radial_to_levels`], `O(n^2)`.
pub fn levels_to_radial(s: &LevelSpectrum) -> RadialFunction {
    let n = s.n;
    let mut acc = vec![KahanComplex::default(); n + 1];
    for j in 0..=n / 2 {
        walk_orthonormal(n, j, 0.0, |k, e| {
            for (kk, jj, sg, live) in images(n, k, j) {
                if live {
                    acc[jj].add(s.amplitudes[kk] * (sg * e));
                }
            }
        });
    }
    RadialFunction {
        n,
        phi: acc.iter().map(|a| a.value()).collect(),
    }
}

/// `(Δf)[j] = ((n-j)(phi[j]-phi[j+1]) + j(phi[j]-phi[j-1])) / 2`.
pub fn radial_laplacian(f: &RadialFunction) -> RadialFunction {
    let n = f.n;
    let phi = &f.phi;
    RadialFunction::from_fn(n, |j| {
        let mut v = Complex64::new(0.0, 0.0);
        if j < n {
            v += (phi[j] - phi[j + 1]) * (n - j) as f64;
        }
        if j > 0 {
            v += (phi[j] - phi[j - 1]) * j as f64;
        }
        v * 0.5
    })
}

/// `|∇f|` on each layer: `sqrt((n-j)|phi[j]-phi[j+1]|^2 + j|phi[j]-phi[j-1]|^2) / 2`.
pub fn radial_gradient_norm(f: &RadialFunction) -> RadialFunction {
    let n = f.n;
    let phi = &f.phi;
    RadialFunction::from_fn(n, |j| {
        let mut s = 0.0;
        if j < n {
            s += (n - j) as f64 * (phi[j] - phi[j + 1]).norm_sqr();
        }
        if j > 0 {
            s += j as f64 * (phi[j] - phi[j - 1]).norm_sqr();
        }
        Complex64::new(s.sqrt() * 0.5, 0.0)
    })
}

/// `(2^{-n} sum_j C(n,j) |phi[j]|^p)^{1/p}`, or `max |phi|` for `p = inf`.
pub fn radial_lp_norm(f: &RadialFunction, p: Exponent) -> Result<f64> {
    let p = p.require_at_least_one()?;
    let mods: Vec<f64> = f.phi.iter().map(|z| z.norm()).collect();
    match p {
        Exponent::Infinity => Ok(mods.iter().fold(0.0f64, |a, &b| a.max(b))),
        Exponent::Finite(p) => {
            let lb = ln_binomials(f.n);
            let ln2n = f.n as f64 * std::f64::consts::LN_2;
            let w: Vec<f64> = lb.iter().map(|l| (l - ln2n).exp()).collect();
            Ok(weighted_power_mean(
                mods.iter().copied().zip(w.iter().copied()),
                p,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::fwht;
    use num_bigint::BigInt;

    fn binom_big(n: usize, k: usize) -> BigInt {
        if k > n {
            return BigInt::from(0);
        }
        let mut r = BigInt::from(1);
        for i in 0..k {
            r = r * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        r
    }

    fn krawtchouk_big(k: usize, j: usize, n: usize) -> BigInt {
        let mut s = BigInt::from(0);
        for i in 0..=k {
            let t = binom_big(j, i) * binom_big(n - j, k - i);
            if i % 2 == 0 {
                s += t;
            } else {
                s -= t;
            }
        }
        s
    }

    #[test]
    fn krawtchouk_matches_exact_sum() {
        for n in 0..=30 {
            for k in 0..=n {
                for j in 0..=n {
                    let want: f64 = krawtchouk_big(k, j, n).to_string().parse().unwrap();
                    assert_eq!(krawtchouk(k, j, n).unwrap(), want, "K_{k}({j};{n})");
                }
            }
        }
        assert!(krawtchouk(3, 2, 2).is_err());
    }

    #[test]
    fn krawtchouk_special_values() {
        for n in 1..20 {
            for j in 0..=n {
                assert_eq!(krawtchouk(0, j, n).unwrap(), 1.0);
                assert_eq!(krawtchouk(1, j, n).unwrap(), n as f64 - 2.0 * j as f64);
            }
            for k in 0..=n {
                let c: f64 = binom_big(n, k).to_string().parse().unwrap();
                assert_eq!(krawtchouk(k, 0, n).unwrap(), c);
            }
        }
    }

    #[test]
    fn krawtchouk_orthogonality() {
        for n in [5usize, 17, 33, 50] {
            let lb = ln_binomials(n);
            for k in 0..=n {
                for l in 0..=n {
                    let mut s = 0.0;
                    for j in 0..=n {
                        s += lb[j].exp() * krawtchouk(k, j, n).unwrap() * krawtchouk(l, j, n).unwrap();
                    }
                    let scale = 2f64.powi(n as i32) * (0.5 * (lb[k] + lb[l])).exp();
                    let want = if k == l { scale } else { 0.0 };
                    assert!((s - want).abs() <= 1e-9 * scale, "n={n} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn levels_match_dense_transform() {
        for n in 1..=12 {
            let f = RadialFunction::from_fn(n, |j| {
                Complex64::new((j as f64 * 0.7).sin() + 0.3, (j as f64).cos())
            });
            let dense = fwht(&f.expand().unwrap());
            let lev = radial_to_levels(&f);
            for a in 0..1usize << n {
                let c = lev.coefficient(level(a));
                assert!((c - dense.coefficient(a)[0]).norm() < 1e-12, "n={n} A={a:b}");
            }
        }
    }

    #[test]
    fn levels_match_krawtchouk_formula() {
        // C(n,k) c[k] = 2^{-n} sum_j C(n,j) phi[j] K_k(j)
        for n in [3usize, 10, 24, 30] {
            let f = RadialFunction::from_fn(n, |j| Complex64::new(1.0 / (1.0 + j as f64), 0.0));
            let lb = ln_binomials(n);
            let c = radial_to_levels(&f).coefficients();
            for k in 0..=n {
                let mut s = 0.0;
                let mut mag = 0.0;
                for j in 0..=n {
                    let t = lb[j].exp() * f.phi()[j].re * krawtchouk(k, j, n).unwrap();
                    s += t;
                    mag += t.abs();
                }
                let scale = 2f64.powi(n as i32) * lb[k].exp();
                assert!((c[k].re - s / scale).abs() <= 1e-12 * mag / scale, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn roundtrip_small_n_pointwise() {
        // tail layers amplify errors by about sqrt(C(n, n/2)), so pointwise
        // agreement is only checked for moderate n
        for n in [1usize, 2, 7, 20, 30] {
            let f = RadialFunction::from_fn(n, |j| Complex64::new((j as f64).sqrt(), -(j as f64) * 0.1));
            let g = levels_to_radial(&radial_to_levels(&f));
            for (a, b) in f.phi().iter().zip(g.phi()) {
                assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()), "n={n}");
            }
        }
    }

    #[test]
    fn roundtrip_large_n_weighted() {
        let n = 2000;
        let f = RadialFunction::from_fn(n, |j| Complex64::new((j as f64 * 0.37).sin(), 1.0));
        let lev = radial_to_levels(&f);
        let g = levels_to_radial(&lev);
        let diff = RadialFunction::new(
            n,
            f.phi().iter().zip(g.phi()).map(|(a, b)| a - b).collect(),
        )
        .unwrap();
        let e = radial_lp_norm(&diff, Exponent::Finite(2.0)).unwrap();
        let base = radial_lp_norm(&f, Exponent::Finite(2.0)).unwrap();
        assert!(e <= 1e-9 * base, "relative error {}", e / base);
        // Parseval in amplitude form
        let energy: f64 = lev.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((energy.sqrt() - base).abs() < 1e-9 * base);
    }

    #[test]
    fn low_degree_roundtrip_is_pointwise_at_large_n() {
        let n = 2000;
        let f = RadialFunction::chebyshev_witness(n, 5).unwrap();
        let mut lev = radial_to_levels(&f);
        let top = lev.amplitudes()[6..].iter().fold(0.0f64, |m, a| m.max(a.norm()));
        assert!(top < 1e-10);
        // drop the rounding noise above the degree before inverting
        lev.amplitudes_mut()[6..].iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        let g = levels_to_radial(&lev);
        // layers carrying the binomial mass are exact to 1e-9; the extreme
        // layers amplify amplitude rounding by sqrt(C(n, d))
        let window = 5.0 * (n as f64).sqrt();
        for (j, (a, b)) in f.phi().iter().zip(g.phi()).enumerate() {
            let tol = if (j as f64 - n as f64 / 2.0).abs() <= window { 1e-9 } else { 1e-7 };
            assert!((a - b).norm() < tol, "j={j}: {a} vs {b}");
        }
    }

    #[test]
    fn laplacian_matches_levels() {
        let n = 40;
        let f = RadialFunction::from_fn(n, |j| Complex64::new((j as f64 * 0.2).cos(), 0.0));
        let direct = radial_laplacian(&f);
        let mut lev = radial_to_levels(&f);
        for (k, a) in lev.amplitudes_mut().iter_mut().enumerate() {
            *a *= k as f64;
        }
        let via = levels_to_radial(&lev);
        for (a, b) in direct.phi().iter().zip(via.phi()) {
            assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn lp_norm_matches_dense() {
        let n = 10;
        let f = RadialFunction::from_fn(n, |j| Complex64::new(j as f64 - 3.0, 0.5));
        let d = f.expand().unwrap();
        for p in [Exponent::Finite(1.0), Exponent::Finite(2.5), Exponent::Infinity] {
            let a = radial_lp_norm(&f, p).unwrap();
            let b = crate::analysis::lp_norm(&d, p).unwrap();
            assert!((a - b).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn from_cube_detects_non_radial() {
        let f = crate::cube::character(3, 1).unwrap();
        assert!(RadialFunction::from_cube(&f, 1e-12).is_err());
        let g = RadialFunction::chebyshev_witness(4, 2).unwrap();
        let back = RadialFunction::from_cube(&g.expand().unwrap(), 1e-12).unwrap();
        assert_eq!(back, g);
    }
}
