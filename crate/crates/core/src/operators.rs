//! Level multipliers: heat semigroup, `w^Δ`, powers of the Laplacian, and
//! the gradient functionals built from partial derivatives.

use num_complex::Complex64;

use crate::analysis::lp_norm_of_norms;
use crate::cube::{fwht_in_place, level, CubeFunction, TargetSpace};
use crate::error::{invalid, Error, Result};
use crate::exponent::Exponent;
use crate::radial::{levels_to_radial, radial_to_levels, RadialFunction};

/// Largest `n` for the exact probabilistic heat formula (`O(4^n)`).
pub const HEAT_PROBABILISTIC_MAX_N: usize = 12;
/// Largest `n` for [`dual_gradient_functional`] (`O(n 4^n)`).
pub const DUAL_GRADIENT_MAX_N: usize = 10;
/// `inverse_heat` flags results whose amplification `e^{tn}` exceeds this.
pub const INVERSE_HEAT_WARN: f64 = 1e12;

/// An operator acting on level `k` by multiplication with `values[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMultiplier {
    values: Vec<Complex64>,
}

impl LevelMultiplier {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("multiplier needs n + 1 values"));
        }
        Ok(LevelMultiplier { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> Complex64) -> Self {
        LevelMultiplier {
            values: (0..=n).map(f).collect(),
        }
    }

    /// `e^{-tΔ}`, `t >= 0`.
    pub fn heat(n: usize, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid(format!("heat time must be >= 0, got {t}")));
        }
        Ok(Self::from_fn(n, |k| Complex64::new((-t * k as f64).exp(), 0.0)))
    }

    /// `w^Δ` for complex `|w| <= 1`.
    pub fn power(n: usize, w: Complex64) -> Result<Self> {
        if !(w.norm() <= 1.0 + 1e-12) {
            return Err(invalid(format!("|w| must be <= 1, got {}", w.norm())));
        }
        Ok(Self::from_fn(n, |k| w.powu(k as u32)))
    }

    /// `Δ`.
    pub fn laplacian(n: usize) -> Self {
        Self::from_fn(n, |k| Complex64::new(k as f64, 0.0))
    }

    /// `Δ^gamma`, `gamma > 0`.
    pub fn fractional(n: usize, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(Self::from_fn(n, |k| Complex64::new((k as f64).powf(gamma), 0.0)))
    }

    /// `Δ(Δ-1)...(Δ-k+1)`.
    pub fn falling_factorial(n: usize, k: usize) -> Self {
        Self::from_fn(n, |l| {
            Complex64::new((0..k).map(|i| l as f64 - i as f64).product(), 0.0)
        })
    }

    /// `e^{tΔ}`, `t >= 0`.
    pub fn inverse_heat(n: usize, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid(format!("time must be >= 0, got {t}")));
        }
        Ok(Self::from_fn(n, |k| Complex64::new((t * k as f64).exp(), 0.0)))
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &LevelMultiplier) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(invalid("multipliers of different size"));
        }
        Ok(LevelMultiplier {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }
}

/// Objects a [`LevelMultiplier`] can act on.
pub trait ApplyMultiplier: Sized {
    fn apply_multiplier(&self, m: &LevelMultiplier) -> Result<Self>;
}

fn check_size(n: usize, m: &LevelMultiplier) -> Result<()> {
    if m.n() != n {
        return Err(invalid(format!(
            "multiplier built for n = {} applied at n = {n}",
            m.n()
        )));
    }
    Ok(())
}

impl ApplyMultiplier for CubeFunction {
    fn apply_multiplier(&self, m: &LevelMultiplier) -> Result<Self> {
        check_size(self.n(), m)?;
        let dim = self.target().dim();
        let mut data = self.values().to_vec();
        fwht_in_place(&mut data, dim);
        let scale = 1.0 / self.len() as f64;
        for (mask, block) in data.chunks_mut(dim).enumerate() {
            let c = m.values[level(mask)] * scale;
            block.iter_mut().for_each(|z| *z *= c);
        }
        fwht_in_place(&mut data, dim);
        Ok(self.with_values(data))
    }
}

impl ApplyMultiplier for RadialFunction {
    fn apply_multiplier(&self, m: &LevelMultiplier) -> Result<Self> {
        check_size(self.n(), m)?;
        let mut lev = radial_to_levels(self);
        for (a, c) in lev.amplitudes_mut().iter_mut().zip(&m.values) {
            *a *= c;
        }
        Ok(levels_to_radial(&lev))
    }
}

/// `e^{-tΔ} f`.
pub fn heat<F: ApplyMultiplier + HasDim>(f: &F, t: f64) -> Result<F> {
    f.apply_multiplier(&LevelMultiplier::heat(f.dim_n(), t)?)
}

/// `w^Δ f`, `|w| <= 1`.
pub fn heat_complex<F: ApplyMultiplier + HasDim>(f: &F, w: Complex64) -> Result<F> {
    f.apply_multiplier(&LevelMultiplier::power(f.dim_n(), w)?)
}

/// `Δ f`.
pub fn laplacian<F: ApplyMultiplier + HasDim>(f: &F) -> Result<F> {
    f.apply_multiplier(&LevelMultiplier::laplacian(f.dim_n()))
}

/// `Δ^gamma f`.
pub fn fractional_laplacian<F: ApplyMultiplier + HasDim>(f: &F, gamma: f64) -> Result<F> {
    f.apply_multiplier(&LevelMultiplier::fractional(f.dim_n(), gamma)?)
}

/// Dimension accessor shared by dense and radial functions.
pub trait HasDim {
    fn dim_n(&self) -> usize;
}

impl HasDim for CubeFunction {
    fn dim_n(&self) -> usize {
        self.n()
    }
}

impl HasDim for RadialFunction {
    fn dim_n(&self) -> usize {
        self.n()
    }
}

/// Result of [`inverse_heat`].
#[derive(Clone, Debug)]
pub struct InverseHeat<F> {
    pub function: F,
    /// `e^{tn}`, the largest amplification factor.
    pub amplification: f64,
    /// Set when `amplification > INVERSE_HEAT_WARN`.
    pub ill_conditioned: bool,
}

/// `e^{tΔ} f` together with a conditioning flag.
pub fn inverse_heat<F: ApplyMultiplier + HasDim>(f: &F, t: f64) -> Result<InverseHeat<F>> {
    let n = f.dim_n();
    let function = f.apply_multiplier(&LevelMultiplier::inverse_heat(n, t)?)?;
    let amplification = (t * n as f64).exp();
    Ok(InverseHeat {
        function,
        amplification,
        ill_conditioned: amplification > INVERSE_HEAT_WARN,
    })
}

/// `e^{-tΔ} f` by exact enumeration of the randomized-restriction formula
///
/// `e^{-tΔ}f(e) = sum_B e^{-t|B|} (1-e^{-t})^{n-|B|} E_d f(e on B, d off B)`.
///
/// Independent of the Walsh transform; used as a cross-check.
pub fn heat_probabilistic(f: &CubeFunction, t: f64) -> Result<CubeFunction> {
    let n = f.n();
    if n > HEAT_PROBABILISTIC_MAX_N {
        return Err(Error::DimensionTooLarge {
            n,
            max: HEAT_PROBABILISTIC_MAX_N,
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("heat time must be >= 0, got {t}")));
    }
    let m = f.target().dim();
    let size = f.len();
    let full = size - 1;
    // avg[B] = f averaged over the coordinates outside B
    let mut avg: Vec<Vec<Complex64>> = vec![Vec::new(); size];
    avg[full] = f.values().to_vec();
    for b in (0..full).rev() {
        let i = (!b & full).trailing_zeros() as usize;
        let parent = &avg[b | (1 << i)];
        let bit = 1usize << i;
        let mut g = vec![Complex64::new(0.0, 0.0); parent.len()];
        for v in 0..size {
            for c in 0..m {
                g[v * m + c] = (parent[v * m + c] + parent[(v ^ bit) * m + c]) * 0.5;
            }
        }
        avg[b] = g;
    }
    let keep = (-t).exp();
    let drop = 1.0 - keep;
    let mut out = vec![Complex64::new(0.0, 0.0); size * m];
    for (b, g) in avg.iter().enumerate() {
        let k = level(b) as i32;
        let w = keep.powi(k) * drop.powi(n as i32 - k);
        if w == 0.0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(g) {
            *o += x * w;
        }
    }
    Ok(f.with_values(out))
}

/// Pointwise `|∇f|(e) = (sum_i |∂_i f(e)|^2)^{1/2}` for scalar `f`.
pub fn gradient_norm(f: &CubeFunction) -> Result<CubeFunction> {
    if !f.target().is_scalar() {
        return Err(Error::UnsupportedTarget(
            "gradient norm is defined for scalar targets".into(),
        ));
    }
    let n = f.n();
    let vals = f.values();
    let out = (0..f.len())
        .map(|v| {
            let s: f64 = (0..n)
                .map(|i| ((vals[v] - vals[v ^ (1 << i)]) * 0.5).norm_sqr())
                .sum();
            Complex64::new(s.sqrt(), 0.0)
        })
        .collect();
    CubeFunction::new(n, TargetSpace::Scalar, out)
}

/// `(2^{-n} sum_d || sum_i d_i ∂_i f ||_p^p)^{1/p}`, exact over all sign
/// vectors `d`; `n <= 10`.
pub fn dual_gradient_functional(f: &CubeFunction, p: Exponent) -> Result<f64> {
    let n = f.n();
    if n > DUAL_GRADIENT_MAX_N {
        return Err(Error::DimensionTooLarge {
            n,
            max: DUAL_GRADIENT_MAX_N,
        });
    }
    let p = match p.require_at_least_one()? {
        Exponent::Finite(p) => p,
        Exponent::Infinity => return Err(Error::InvalidExponent("need finite p".into())),
    };
    let m = f.target().dim();
    let size = f.len();
    let vals = f.values();
    // derivs[i][v*m + c] = ∂_i f
    let derivs: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let bit = 1usize << i;
            (0..size * m)
                .map(|idx| {
                    let (v, c) = (idx / m, idx % m);
                    (vals[idx] - vals[(v ^ bit) * m + c]) * 0.5
                })
                .collect()
        })
        .collect();
    let target = f.target();
    let mut per_delta = Vec::with_capacity(size);
    let mut g = vec![Complex64::new(0.0, 0.0); size * m];
    for delta in 0..size {
        g.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (i, d) in derivs.iter().enumerate() {
            let s = if delta & (1 << i) == 0 { 1.0 } else { -1.0 };
            for (a, b) in g.iter_mut().zip(d) {
                *a += b * s;
            }
        }
        let norms: Vec<f64> = g.chunks(m).map(|x| target.norm(x)).collect();
        per_delta.push(lp_norm_of_norms(&norms, Exponent::Finite(p)));
    }
    Ok(lp_norm_of_norms(&per_delta, Exponent::Finite(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::lp_norm;
    use crate::cube::{character, random_function, SpectralBand};
    use proptest::prelude::*;

    fn max_diff(a: &CubeFunction, b: &CubeFunction) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    #[test]
    fn heat_on_character() {
        let f = character(5, 0b10110).unwrap();
        let g = heat(&f, 0.4).unwrap();
        let want = f.scale(Complex64::new((-1.2f64).exp(), 0.0));
        assert!(max_diff(&g, &want) < 1e-14);
        assert!(heat(&f, -1.0).is_err());
    }

    #[test]
    fn heat_zero_time_is_identity() {
        let f = random_function(4, SpectralBand::full(4), TargetSpace::Scalar, 3, 0).unwrap();
        assert!(max_diff(&heat(&f, 0.0).unwrap(), &f) < 1e-14);
    }

    #[test]
    fn complex_power_reflection() {
        // (-x)^Δ f(e) = (x^Δ f)(-e)
        let f = random_function(5, SpectralBand::full(5), TargetSpace::Scalar, 7, 0).unwrap();
        let x = 0.6;
        let a = heat_complex(&f, Complex64::new(-x, 0.0)).unwrap();
        let b = heat_complex(&f, Complex64::new(x, 0.0)).unwrap().reflect();
        assert!(max_diff(&a, &b) < 1e-13);
        assert!(heat_complex(&f, Complex64::new(1.1, 0.0)).is_err());
    }

    #[test]
    fn inverse_heat_flags_amplification() {
        let f = character(10, 1).unwrap();
        let r = inverse_heat(&f, 0.5).unwrap();
        assert!(!r.ill_conditioned);
        let r = inverse_heat(&f, 3.0).unwrap();
        assert!(r.ill_conditioned);
        let back = heat(&r.function, 3.0).unwrap();
        assert!(max_diff(&back, &f) < 1e-12);
    }

    #[test]
    fn gradient_of_linear_function() {
        let n = 4;
        let f = CubeFunction::from_fn(n, |v| {
            Complex64::new((0..n).map(|i| if v >> i & 1 == 0 { 1.0 } else { -1.0 }).sum(), 0.0)
        })
        .unwrap();
        let g = gradient_norm(&f).unwrap();
        assert!(g.values().iter().all(|z| (z.re - 2.0).abs() < 1e-14));
        let vec_t = TargetSpace::lq(Exponent::Finite(2.0), 2).unwrap();
        let h = CubeFunction::zeros(2, vec_t).unwrap();
        assert!(gradient_norm(&h).is_err());
    }

    #[test]
    fn dual_gradient_examples() {
        // f = e_1 + e_2 at p = 2 gives sqrt(2)
        let f = CubeFunction::from_fn(2, |v| {
            let s = |i: usize| if v >> i & 1 == 0 { 1.0 } else { -1.0 };
            Complex64::new(s(0) + s(1), 0.0)
        })
        .unwrap();
        let v = dual_gradient_functional(&f, Exponent::Finite(2.0)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-14);
        let c = CubeFunction::from_fn(3, |_| Complex64::new(5.0, 0.0)).unwrap();
        assert_eq!(dual_gradient_functional(&c, Exponent::Finite(1.5)).unwrap(), 0.0);
        let big = CubeFunction::zeros(11, TargetSpace::Scalar).unwrap();
        assert!(dual_gradient_functional(&big, Exponent::Finite(2.0)).is_err());
    }

    #[test]
    fn dual_gradient_at_two_is_dirichlet_energy() {
        // E_d ||sum d_i ∂_i f||_2^2 = sum_i ||∂_i f||_2^2 = sum_A |A| |f^(A)|^2
        let f = random_function(6, SpectralBand::full(6), TargetSpace::Scalar, 11, 0).unwrap();
        let s = crate::cube::fwht(&f);
        let e: f64 = s
            .coeffs()
            .iter()
            .enumerate()
            .map(|(a, z)| level(a) as f64 * z.norm_sqr())
            .sum();
        let v = dual_gradient_functional(&f, Exponent::Finite(2.0)).unwrap();
        assert!((v * v - e).abs() < 1e-12 * e);
    }

    #[test]
    fn falling_factorial_kills_low_levels() {
        let m = LevelMultiplier::falling_factorial(6, 3);
        assert_eq!(m.values()[2], Complex64::new(0.0, 0.0));
        assert_eq!(m.values()[4], Complex64::new(24.0, 0.0));
    }

    #[test]
    fn radial_and_dense_heat_agree() {
        let r = RadialFunction::chebyshev_witness(9, 3).unwrap();
        let a = heat(&r, 0.3).unwrap().expand().unwrap();
        let b = heat(&r.expand().unwrap(), 0.3).unwrap();
        assert!(max_diff(&a, &b) < 1e-12);
    }

    proptest! {
        #[test]
        fn heat_is_contraction(seed in 0u64..500, n in 1usize..7, t in 0.0f64..3.0) {
            let f = random_function(n, SpectralBand::full(n), TargetSpace::Scalar, seed, 0).unwrap();
            let g = heat(&f, t).unwrap();
            for p in [1.0, 2.0, 3.5] {
                let p = Exponent::Finite(p);
                prop_assert!(lp_norm(&g, p).unwrap() <= lp_norm(&f, p).unwrap() * (1.0 + 1e-12));
            }
        }

        #[test]
        fn semigroup_property(seed in 0u64..500, s in 0.0f64..2.0, t in 0.0f64..2.0) {
            let f = random_function(5, SpectralBand::full(5), TargetSpace::Scalar, seed, 0).unwrap();
            let a = heat(&heat(&f, s).unwrap(), t).unwrap();
            let b = heat(&f, s + t).unwrap();
            prop_assert!(max_diff(&a, &b) < 1e-12);
        }

        #[test]
        fn probabilistic_formula_matches(seed in 0u64..200, n in 1usize..7, t in 0.01f64..3.0) {
            let tgt = TargetSpace::lq(Exponent::Infinity, 2).unwrap();
            let f = random_function(n, SpectralBand::full(n), tgt, seed, 0).unwrap();
            let a = heat(&f, t).unwrap();
            let b = heat_probabilistic(&f, t).unwrap();
            prop_assert!(max_diff(&a, &b) < 1e-10);
        }
    }
}
