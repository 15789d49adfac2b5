//! Functions on the Hamming cube `{-1,1}^n` and their Walsh expansion.
//!
//! Vertices are indexed by `v in 0..2^n`; bit `i` of `v` is set exactly when
//! the `(i+1)`-th sign is `-1`. Subsets `A` of `{1..n}` are bitmasks in the
//! same way, so the character `w_A(v)` is `(-1)^{popcount(A & v)}`.
//!
//! Vector valued functions with target `l_q^m` are stored vertex-major: the
//! `m` coordinates of vertex `v` live at `values[v*m .. (v+1)*m]`. Spectra use
//! the same layout, one block of `m` coefficients per subset.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::numeric::power_mean;

/// Hard ceiling on the dimension for dense storage.
pub const MAX_N: usize = 26;

/// Coefficients with modulus below this fraction of the largest one are
/// treated as zero when computing a spectral band.
pub const BAND_THRESHOLD: f64 = 1e-12;

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::DimensionTooLarge { n, max: MAX_N });
    }
    Ok(())
}

/// Codomain of a cube function: `C` or `l_q^m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetSpace {
    Scalar,
    Lq { q: Exponent, m: usize },
}

impl TargetSpace {
    pub fn lq(q: Exponent, m: usize) -> Result<Self> {
        let q = q.require_at_least_one()?;
        if m == 0 {
            return Err(Error::UnsupportedTarget("l_q^0".into()));
        }
        Ok(TargetSpace::Lq { q, m })
    }

    /// Number of complex coordinates per vertex.
    pub fn dim(&self) -> usize {
        match self {
            TargetSpace::Scalar => 1,
            TargetSpace::Lq { m, .. } => *m,
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, TargetSpace::Scalar)
    }

    /// Norm of one value of the target space.
    pub fn norm(&self, x: &[Complex64]) -> f64 {
        match self {
            TargetSpace::Scalar => x[0].norm(),
            TargetSpace::Lq { q, .. } => {
                let mods: Vec<f64> = x.iter().map(|z| z.norm()).collect();
                match q {
                    Exponent::Infinity => mods.iter().fold(0.0f64, |a, &b| a.max(b)),
                    Exponent::Finite(q) => {
                        // l_q norm is m^{1/q} times the power mean
                        power_mean(&mods, *q) * (mods.len() as f64).powf(1.0 / q)
                    }
                }
            }
        }
    }
}

/// Inclusive range of Walsh levels `[low, high]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpectralBand {
    pub low: usize,
    pub high: usize,
}

impl SpectralBand {
    pub fn new(low: usize, high: usize, n: usize) -> Result<Self> {
        if low > high || high > n {
            return Err(Error::InvalidBand { low, high, n });
        }
        Ok(SpectralBand { low, high })
    }

    /// All levels `0..=n`.
    pub fn full(n: usize) -> Self {
        SpectralBand { low: 0, high: n }
    }

    /// Functions of degree at most `d`.
    pub fn degree_at_most(d: usize, n: usize) -> Result<Self> {
        Self::new(0, d, n)
    }

    /// The tail space: levels `d..=n`.
    pub fn tail(d: usize, n: usize) -> Result<Self> {
        Self::new(d, n, n)
    }

    pub fn contains(&self, level: usize) -> bool {
        self.low <= level && level <= self.high
    }
}

/// Number of elements of the subset encoded by `mask`.
pub fn level(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// A function `f: {-1,1}^n -> X` stored by its values.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeFunction {
    n: usize,
    target: TargetSpace,
    values: Vec<Complex64>,
}

impl CubeFunction {
    pub fn new(n: usize, target: TargetSpace, values: Vec<Complex64>) -> Result<Self> {
        check_n(n)?;
        let expected = (1usize << n) * target.dim();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(CubeFunction { n, target, values })
    }

    /// Scalar function built from its value at each vertex index.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> Complex64) -> Result<Self> {
        check_n(n)?;
        Ok(CubeFunction {
            n,
            target: TargetSpace::Scalar,
            values: (0..1usize << n).map(f).collect(),
        })
    }

    pub fn zeros(n: usize, target: TargetSpace) -> Result<Self> {
        check_n(n)?;
        Ok(CubeFunction {
            n,
            target,
            values: vec![Complex64::new(0.0, 0.0); (1usize << n) * target.dim()],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> TargetSpace {
        self.target
    }

    /// Number of vertices, `2^n`.
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at vertex `v` (a slice of length `target.dim()`).
    pub fn at(&self, v: usize) -> &[Complex64] {
        let m = self.target.dim();
        &self.values[v * m..(v + 1) * m]
    }

    /// Pointwise target norms `||f(eps)||_X`.
    pub fn pointwise_norms(&self) -> Vec<f64> {
        let m = self.target.dim();
        self.values
            .chunks(m)
            .map(|x| self.target.norm(x))
            .collect()
    }

    /// `eps -> f(-eps)`.
    pub fn reflect(&self) -> CubeFunction {
        let m = self.target.dim();
        let full = self.len() - 1;
        let mut values = Vec::with_capacity(self.values.len());
        for v in 0..self.len() {
            values.extend_from_slice(&self.values[(v ^ full) * m..((v ^ full) + 1) * m]);
        }
        CubeFunction { values, ..*self }
    }

    /// Same function viewed on `{-1,1}^{n+extra}`, ignoring the new coordinates.
    pub fn embed(&self, extra: usize) -> Result<CubeFunction> {
        let n = self.n + extra;
        check_n(n)?;
        let mut values = Vec::with_capacity(self.values.len() << extra);
        for _ in 0..1usize << extra {
            values.extend_from_slice(&self.values);
        }
        Ok(CubeFunction {
            n,
            target: self.target,
            values,
        })
    }

    pub fn scale(&self, c: Complex64) -> CubeFunction {
        CubeFunction {
            values: self.values.iter().map(|z| z * c).collect(),
            ..*self
        }
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> CubeFunction {
        debug_assert_eq!(values.len(), self.values.len());
        CubeFunction { values, ..*self }
    }

    pub(crate) fn same_shape(&self, other: &CubeFunction) -> Result<()> {
        if self.n != other.n || self.target != other.target {
            return Err(Error::InvalidParameter(
                "functions have different dimension or target".into(),
            ));
        }
        Ok(())
    }

    /// `f - g`.
    pub fn sub(&self, other: &CubeFunction) -> Result<CubeFunction> {
        self.same_shape(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }
}

/// Walsh coefficients `f^(A)` of a cube function.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    n: usize,
    target: TargetSpace,
    coeffs: Vec<Complex64>,
    band: Option<SpectralBand>,
}

impl Spectrum {
    pub fn new(n: usize, target: TargetSpace, coeffs: Vec<Complex64>) -> Result<Self> {
        check_n(n)?;
        let expected = (1usize << n) * target.dim();
        if coeffs.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        let band = compute_band(&coeffs, target.dim());
        Ok(Spectrum {
            n,
            target,
            coeffs,
            band,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> TargetSpace {
        self.target
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient block for the subset `mask`.
    pub fn coefficient(&self, mask: usize) -> &[Complex64] {
        let m = self.target.dim();
        &self.coeffs[mask * m..(mask + 1) * m]
    }

    /// Lowest and highest occupied level; `None` for the zero spectrum.
    pub fn band(&self) -> Option<SpectralBand> {
        self.band
    }

    /// Sum of `|f^(A)|^2` over all subsets and coordinates.
    pub fn energy(&self) -> f64 {
        let mut acc = crate::numeric::KahanSum::new();
        for z in &self.coeffs {
            acc.add(z.norm_sqr());
        }
        acc.value()
    }
}

fn compute_band(coeffs: &[Complex64], m: usize) -> Option<SpectralBand> {
    let max = coeffs.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if max == 0.0 {
        return None;
    }
    let cut = BAND_THRESHOLD * max;
    let mut low = usize::MAX;
    let mut high = 0;
    for (mask, block) in coeffs.chunks(m).enumerate() {
        if block.iter().any(|z| z.norm() > cut) {
            let k = level(mask);
            low = low.min(k);
            high = high.max(k);
        }
    }
    Some(SpectralBand { low, high })
}

/// Unnormalized Walsh-Hadamard butterfly on blocks of `m` entries.
///
/// `data.len()` must be `2^n * m`. Applying it twice multiplies by `2^n`.
pub fn fwht_in_place(data: &mut [Complex64], m: usize) {
    let vertices = data.len() / m;
    debug_assert!(vertices.is_power_of_two());
    let mut h = 1;
    while h < vertices {
        for block in data.chunks_mut(2 * h * m) {
            let (lo, hi) = block.split_at_mut(h * m);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Forward transform `f^(A) = 2^{-n} sum_d f(d) w_A(d)`.
pub fn fwht(f: &CubeFunction) -> Spectrum {
    let mut coeffs = f.values.clone();
    fwht_in_place(&mut coeffs, f.target.dim());
    let scale = 1.0 / f.len() as f64;
    for z in &mut coeffs {
        *z *= scale;
    }
    let band = compute_band(&coeffs, f.target.dim());
    Spectrum {
        n: f.n,
        target: f.target,
        coeffs,
        band,
    }
}

/// Inverse transform `f(e) = sum_A f^(A) w_A(e)`.
pub fn ifwht(s: &Spectrum) -> CubeFunction {
    let mut values = s.coeffs.clone();
    fwht_in_place(&mut values, s.target.dim());
    CubeFunction {
        n: s.n,
        target: s.target,
        values,
    }
}

/// `∂_i f(e) = (f(e) - f(e with sign i flipped)) / 2`, for 0-based `i < n`.
pub fn partial_derivative(f: &CubeFunction, i: usize) -> Result<CubeFunction> {
    if i >= f.n {
        return Err(Error::CoordinateOutOfRange { i, n: f.n });
    }
    let m = f.target.dim();
    let bit = 1usize << i;
    let mut values = Vec::with_capacity(f.values.len());
    for v in 0..f.len() {
        let w = v ^ bit;
        for c in 0..m {
            values.push((f.values[v * m + c] - f.values[w * m + c]) * 0.5);
        }
    }
    Ok(f.with_values(values))
}

/// Same as [`partial_derivative`], computed by keeping the Walsh terms that
/// contain coordinate `i`.
pub fn partial_derivative_spectral(f: &CubeFunction, i: usize) -> Result<CubeFunction> {
    if i >= f.n {
        return Err(Error::CoordinateOutOfRange { i, n: f.n });
    }
    let mut s = fwht(f);
    let m = f.target.dim();
    for (mask, block) in s.coeffs.chunks_mut(m).enumerate() {
        if mask & (1 << i) == 0 {
            block.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        }
    }
    Ok(ifwht(&s))
}

/// Keep only the Walsh levels inside `band`.
pub fn project(f: &CubeFunction, band: SpectralBand) -> Result<CubeFunction> {
    if band.low > band.high || band.high > f.n {
        return Err(Error::InvalidBand {
            low: band.low,
            high: band.high,
            n: f.n,
        });
    }
    let mut s = fwht(f);
    let m = f.target.dim();
    for (mask, block) in s.coeffs.chunks_mut(m).enumerate() {
        if !band.contains(level(mask)) {
            block.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        }
    }
    Ok(ifwht(&s))
}

/// The Walsh character `w_A` for the subset encoded by `mask`.
pub fn character(n: usize, mask: usize) -> Result<CubeFunction> {
    check_n(n)?;
    if mask >> n != 0 {
        return Err(Error::InvalidParameter(format!(
            "subset mask {mask:#b} has elements beyond n = {n}"
        )));
    }
    CubeFunction::from_fn(n, |v| {
        if level(v & mask) % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    })
}

/// Deterministic generator for substream `stream` of `seed`.
///
/// Each trial index gets its own ChaCha stream, so results do not depend on
/// how trials are scheduled across threads.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian (`E|z|^2 = 1`).
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Random spectrum supported on `band`, i.i.d. standard complex Gaussian
/// coefficients, drawn in increasing subset order.
pub fn random_spectrum(
    n: usize,
    band: SpectralBand,
    target: TargetSpace,
    seed: u64,
    stream: u64,
) -> Result<Spectrum> {
    check_n(n)?;
    SpectralBand::new(band.low, band.high, n)?;
    let m = target.dim();
    let mut rng = rng_for(seed, stream);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (1usize << n) * m];
    for (mask, block) in coeffs.chunks_mut(m).enumerate() {
        if band.contains(level(mask)) {
            for z in block {
                *z = complex_gaussian(&mut rng);
            }
        }
    }
    Spectrum::new(n, target, coeffs)
}

/// Random function supported on `band`; see [`random_spectrum`].
pub fn random_function(
    n: usize,
    band: SpectralBand,
    target: TargetSpace,
    seed: u64,
    stream: u64,
) -> Result<CubeFunction> {
    Ok(ifwht(&random_spectrum(n, band, target, seed, stream)?))
}
