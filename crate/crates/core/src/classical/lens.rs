//! The lens `Ω(r) = {max(|z - i c|, |z + i c|) < r}`, `c = sqrt(r^2 - 1)`,
//! and the conformal maps of its interior and exterior.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::exponent::Exponent;

/// Points within this distance (in the gauge) of `∂Ω` are rejected.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Opening angle `θ_p = 2 arcsin(2 sqrt(p-1) / p)`; `0` at `p = 1, inf`.
pub fn theta_p(p: Exponent) -> Result<f64> {
    match p.require_at_least_one()? {
        Exponent::Infinity => Ok(0.0),
        Exponent::Finite(p) => {
            let s = (2.0 * (p - 1.0).sqrt() / p).min(1.0);
            Ok(2.0 * s.asin())
        }
    }
}

/// `(θ_p, r_p)` with `r_p = p / (2 sqrt(p-1)) = 1 / sin(θ_p / 2)`, `1 < p < inf`.
pub fn theta_and_radius(p: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!("need 1 < p < inf, got {p}")));
    }
    let theta = theta_p(Exponent::Finite(p))?;
    Ok((theta, p / (2.0 * (p - 1.0).sqrt())))
}

/// Which conformal map to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LensSide {
    /// `Ω(r)` onto the unit disc, fixing 0.
    Interior,
    /// `C \ closure(Ω(r))` onto the complement of the closed unit disc, fixing infinity.
    Exterior,
}

/// The lens `Ω(r)`, `r >= 1`, with interior angle `θ = 2 arcsin(1/r)` at `±1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LensDomain {
    r: f64,
    theta: f64,
    c: f64,
}

fn psi1(z: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z) / (Complex64::new(1.0, 0.0) + z)
}

fn psi2(z: Complex64) -> Complex64 {
    (z + 1.0) / (z - 1.0)
}

impl LensDomain {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 1.0 && r.is_finite()) {
            return Err(invalid(format!("lens radius must be >= 1, got {r}")));
        }
        Ok(LensDomain {
            r,
            theta: 2.0 * (1.0 / r).asin(),
            c: (r * r - 1.0).sqrt(),
        })
    }

    /// `Ω(r_p)`.
    pub fn for_exponent(p: f64) -> Result<Self> {
        Self::new(theta_and_radius(p)?.1)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `max(|w - ic|, |w + ic|) - r`; negative inside.
    pub fn gauge(&self, w: Complex64) -> f64 {
        let ic = Complex64::new(0.0, self.c);
        (w - ic).norm().max((w + ic).norm()) - self.r
    }

    pub fn contains(&self, w: Complex64) -> bool {
        self.gauge(w) < 0.0
    }

    /// Closed-lens membership with tolerance.
    pub fn contains_closed(&self, w: Complex64, tol: f64) -> bool {
        self.gauge(w) <= tol
    }

    /// `ψ1 ∘ z^{π/θ} ∘ ψ1`, `ψ1(z) = (1-z)/(1+z)`.
    pub fn interior_map(&self, w: Complex64) -> Result<Complex64> {
        let g = self.gauge(w);
        if g.abs() <= BOUNDARY_TOL {
            return Err(Error::OnBoundary(format!("{w}")));
        }
        if g > 0.0 {
            return Err(Error::OutsideDomain(format!("{w}")));
        }
        Ok(psi1(psi1(w).powf(std::f64::consts::PI / self.theta)))
    }

    /// `ψ2 ∘ z^{π/(2π-θ)} ∘ ψ2`, `ψ2(z) = (z+1)/(z-1)`.
    pub fn exterior_map(&self, w: Complex64) -> Result<Complex64> {
        let g = self.gauge(w);
        if g.abs() <= BOUNDARY_TOL {
            return Err(Error::OnBoundary(format!("{w}")));
        }
        if g < 0.0 {
            return Err(Error::OutsideDomain(format!("{w}")));
        }
        let a = std::f64::consts::PI / (2.0 * std::f64::consts::PI - self.theta);
        Ok(psi2(psi2(w).powf(a)))
    }

    pub fn map(&self, w: Complex64, side: LensSide) -> Result<Complex64> {
        match side {
            LensSide::Interior => self.interior_map(w),
            LensSide::Exterior => self.exterior_map(w),
        }
    }

    /// Interior map at `e^{-t}`:
    /// `((1+e^{-t})^b - (1-e^{-t})^b) / ((1+e^{-t})^b + (1-e^{-t})^b)`, `b = π/θ`.
    pub fn interior_map_heat(&self, t: f64) -> f64 {
        let b = std::f64::consts::PI / self.theta;
        let x = (-t).exp();
        let (u, v) = ((1.0 + x).powf(b), (1.0 - x).powf(b));
        (u - v) / (u + v)
    }

    /// Exterior map at `e^t`:
    /// `((e^t+1)^a + (e^t-1)^a) / ((e^t+1)^a - (e^t-1)^a)`, `a = π/(2π-θ)`.
    pub fn exterior_map_heat(&self, t: f64) -> f64 {
        let a = std::f64::consts::PI / (2.0 * std::f64::consts::PI - self.theta);
        let x = t.exp();
        let (u, v) = ((x + 1.0).powf(a), (x - 1.0).powf(a));
        (u + v) / (u - v)
    }

    /// Point on `∂Ω` for `s` in `[0, 1)`: the upper arc for `s < 1/2`, then the lower arc.
    pub fn boundary_point(&self, s: f64) -> Complex64 {
        let a0 = (1.0 / self.r).acos();
        let (u, upper) = if s < 0.5 { (2.0 * s, true) } else { (2.0 * s - 1.0, false) };
        let alpha = a0 + u * (std::f64::consts::PI - 2.0 * a0);
        let p = Complex64::new(self.r * alpha.cos(), self.r * alpha.sin() - self.c);
        if upper {
            p
        } else {
            p.conj()
        }
    }

    /// Uniform sample from `closure(Ω)` shrunk by the factor `shrink` (`<= 1`).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, shrink: f64) -> Complex64 {
        let h = self.r - self.c;
        loop {
            let w = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-h..=h));
            if self.contains_closed(w, 0.0) {
                return w * shrink;
            }
        }
    }
}

/// Free-function form of [`LensDomain::map`].
pub fn lens_map(r: f64, w: Complex64, side: LensSide) -> Result<Complex64> {
    LensDomain::new(r)?.map(w, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn known_angles() {
        let (t2, r2) = theta_and_radius(2.0).unwrap();
        assert!((t2 - PI).abs() < 1e-7 && (r2 - 1.0).abs() < 1e-15);
        let (t4, r4) = theta_and_radius(4.0).unwrap();
        assert!((t4 - 2.0 * PI / 3.0).abs() < 1e-14);
        assert!((r4 - 1.0 / (t4 / 2.0).sin()).abs() < 1e-14);
        for p in [1.1, 4.0 / 3.0, 3.0, 17.0] {
            let (t, r) = theta_and_radius(p).unwrap();
            assert!((r - 1.0 / (t / 2.0).sin()).abs() < 1e-12);
            assert!((LensDomain::new(r).unwrap().theta() - t).abs() < 1e-12);
        }
        assert!(theta_and_radius(1.0).is_err());
        assert_eq!(theta_p(Exponent::Infinity).unwrap(), 0.0);
        assert_eq!(theta_p(Exponent::Finite(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn maps_fix_zero_and_infinity_direction() {
        let l = LensDomain::new(1.7).unwrap();
        assert!(l.interior_map(Complex64::new(0.0, 0.0)).unwrap().norm() < 1e-15);
        let far = l.exterior_map(Complex64::new(1e8, 3e7)).unwrap();
        assert!(far.norm() > 1e7);
    }

    #[test]
    fn closed_forms_match_maps() {
        for p in [4.0 / 3.0, 1.5, 3.0, 4.0] {
            let l = LensDomain::for_exponent(p).unwrap();
            for t in [0.05, 0.3, 1.0, 2.5] {
                let a = l.interior_map(Complex64::new((-t as f64).exp(), 0.0)).unwrap();
                assert!((a.re - l.interior_map_heat(t)).abs() < 1e-12 && a.im.abs() < 1e-12);
                let b = l.exterior_map(Complex64::new((t as f64).exp(), 0.0)).unwrap();
                assert!((b.re - l.exterior_map_heat(t)).abs() < 1e-10 * b.re.abs() && b.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn boundary_goes_to_unit_circle() {
        for r in [1.0, 1.2, 2.0, 5.0] {
            let l = LensDomain::new(r).unwrap();
            for i in 1..40 {
                let s = i as f64 / 40.0;
                if (s - 0.5).abs() < 0.03 {
                    continue;
                }
                let b = l.boundary_point(s);
                assert!(l.gauge(b).abs() < 1e-12);
                let inside = l.interior_map(b * (1.0 - 1e-11)).unwrap();
                assert!((inside.norm() - 1.0).abs() < 1e-8, "r={r} s={s}");
                let outside = l.exterior_map(b * (1.0 + 1e-11)).unwrap();
                assert!((outside.norm() - 1.0).abs() < 1e-8, "r={r} s={s}");
            }
        }
    }

    #[test]
    fn rejects_wrong_side_and_boundary() {
        let l = LensDomain::new(1.5).unwrap();
        let b = l.boundary_point(0.25);
        assert!(matches!(l.interior_map(b), Err(Error::OnBoundary(_))));
        assert!(matches!(l.interior_map(Complex64::new(3.0, 0.0)), Err(Error::OutsideDomain(_))));
        assert!(matches!(l.exterior_map(Complex64::new(0.1, 0.0)), Err(Error::OutsideDomain(_))));
        assert!(LensDomain::new(0.5).is_err());
    }

    #[test]
    fn interior_image_in_disc() {
        let l = LensDomain::new(1.3).unwrap();
        let mut rng = crate::cube::rng_for(5, 0);
        for _ in 0..500 {
            let w = l.sample(&mut rng, 0.999);
            assert!(l.interior_map(w).unwrap().norm() < 1.0);
        }
    }
}
