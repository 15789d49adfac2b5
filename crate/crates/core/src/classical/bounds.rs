//! Closed-form right-hand sides of the cube inequalities.
//!
//! Each [`BoundId`] names one inequality `lhs <= B * rhs`; [`bound_value`]
//! returns the factor `B` (or, for the measured families, the `d`-shape the
//! unknown constant multiplies).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::chebyshev::{chebyshev_deriv_at_one, chebyshev_t};
use super::lens::theta_p;
use crate::error::{invalid, Error, Result};
use crate::exponent::Exponent;

/// Constant in the `L_1`-`L_2` comparison for degree-`d` functions.
pub const L1_L2_BASE: f64 = 2.69076;

/// Inequality identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundId {
    /// `||f||_p <= T_d(e^t) ||e^{-tΔ} f||_p`, any target.
    HeatLowerGeneral,
    /// `||f||_p <= T_d(sqrt((p-1)/(q-1))) ||f||_q`.
    MomentGeneral,
    /// `||f - Ef||_p <= 3(log d + 1) * dual gradient`.
    PisierLowdeg,
    /// `||Δf||_p <= d^2 ||f||_p`.
    MarkovD2,
    /// `||Δ(Δ-1)...(Δ-k+1) f||_p <= T_d^{(k)}(1) ||f||_p`.
    MarkovHigherK,
    /// `T_d(e^t) <= e^{3 max(t, sqrt t) d}`.
    Chsqrt,
    /// `||e^{-tΔ} f||_p >= L_p(t)^d ||f||_p`, scalar.
    HeatLowerScalar,
    /// `||e^{-tΔ} f||_p <= U_p(t)^d ||f||_p` on the tail space, scalar.
    HeatUpperTail,
    /// `||f||_p <= C_{p,q}^d ||f||_q`, scalar.
    MomentScalar,
    /// `||f||_2 <= 2.69076^d ||f||_1`.
    #[serde(rename = "L1L2")]
    L1L2,
    /// `||Δf||_p <= 10 d^{2 - θ_p/π} ||f||_p`, scalar.
    LaplacianScalar,
    /// Shape of the gradient bound, constant unknown.
    GradScalar,
    /// Shape of the `L_p` influence bound, `1 < p < 4/3`, constant unknown.
    Influence,
    /// Shape `sqrt(d/m)` of the reverse gradient bound, constant unknown.
    RevGrad,
    /// `||e^{-tΔ} f||_p <= ||f||_q` once `t >= log((p-1)/(q-1)) / 2`.
    Bonami,
    /// `||f||_p <= (p-1)^{d/2} ||f||_2`, `p > 2`.
    SqrtPminus1,
    /// `||∇f||_inf <= 2d ||f||_inf`.
    GradInfEndpoint,
    /// `||∇f||_1 <= 2.69076^d sqrt(d) ||f||_1`.
    GradL1Endpoint,
    /// `||∇ e^{-tΔ} f||_inf <= ||f||_inf / sqrt(e^{2t} - 1)`.
    HeatGradDecayInf,
    /// `||Δ^b g||_p <= 4 ||Δg||_p^b ||g||_p^{1-b}`.
    NaosInterp,
}

impl BoundId {
    pub const ALL: [BoundId; 20] = [
        BoundId::HeatLowerGeneral,
        BoundId::MomentGeneral,
        BoundId::PisierLowdeg,
        BoundId::MarkovD2,
        BoundId::MarkovHigherK,
        BoundId::Chsqrt,
        BoundId::HeatLowerScalar,
        BoundId::HeatUpperTail,
        BoundId::MomentScalar,
        BoundId::L1L2,
        BoundId::LaplacianScalar,
        BoundId::GradScalar,
        BoundId::Influence,
        BoundId::RevGrad,
        BoundId::Bonami,
        BoundId::SqrtPminus1,
        BoundId::GradInfEndpoint,
        BoundId::GradL1Endpoint,
        BoundId::HeatGradDecayInf,
        BoundId::NaosInterp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::HeatLowerGeneral => "HEAT_LOWER_GENERAL",
            BoundId::MomentGeneral => "MOMENT_GENERAL",
            BoundId::PisierLowdeg => "PISIER_LOWDEG",
            BoundId::MarkovD2 => "MARKOV_D2",
            BoundId::MarkovHigherK => "MARKOV_HIGHER_K",
            BoundId::Chsqrt => "CHSQRT",
            BoundId::HeatLowerScalar => "HEAT_LOWER_SCALAR",
            BoundId::HeatUpperTail => "HEAT_UPPER_TAIL",
            BoundId::MomentScalar => "MOMENT_SCALAR",
            BoundId::L1L2 => "L1L2",
            BoundId::LaplacianScalar => "LAPLACIAN_SCALAR",
            BoundId::GradScalar => "GRAD_SCALAR",
            BoundId::Influence => "INFLUENCE",
            BoundId::RevGrad => "REV_GRAD",
            BoundId::Bonami => "BONAMI",
            BoundId::SqrtPminus1 => "SQRT_PMINUS1",
            BoundId::GradInfEndpoint => "GRAD_INF_ENDPOINT",
            BoundId::GradL1Endpoint => "GRAD_L1_ENDPOINT",
            BoundId::HeatGradDecayInf => "HEAT_GRAD_DECAY_INF",
            BoundId::NaosInterp => "NAOS_INTERP",
        }
    }

    /// True when the constant in front of the shape is not explicit.
    pub fn is_measured(self) -> bool {
        matches!(
            self,
            BoundId::GradScalar | BoundId::Influence | BoundId::RevGrad
        )
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .iter()
            .copied()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown bound id {s}")))
    }
}

/// Parameters a bound may depend on. Unused fields are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BoundParams {
    pub d: usize,
    pub p: Option<Exponent>,
    pub q: Option<Exponent>,
    pub t: Option<f64>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub beta: Option<f64>,
}

impl BoundParams {
    pub fn degree(d: usize) -> Self {
        BoundParams {
            d,
            ..Default::default()
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(Exponent::from(p));
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(Exponent::from(q));
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    fn p(&self) -> Result<Exponent> {
        self.p.ok_or_else(|| invalid("bound needs p"))
    }

    fn q(&self) -> Result<Exponent> {
        self.q.ok_or_else(|| invalid("bound needs q"))
    }

    fn t(&self) -> Result<f64> {
        let t = self.t.ok_or_else(|| invalid("bound needs t"))?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid(format!("t must be >= 0, got {t}")));
        }
        Ok(t)
    }
}

fn finite_open(p: Exponent, what: &str) -> Result<f64> {
    match p {
        Exponent::Finite(v) if v > 1.0 => Ok(v),
        _ => Err(Error::InvalidExponent(format!(
            "{what} needs 1 < p < inf, got {p}"
        ))),
    }
}

/// `((e^t+1)^a - (e^t-1)^a) / ((e^t+1)^a + (e^t-1)^a)`, `a = π/(2π - θ_p)`.
pub fn heat_lower_scalar_factor(p: f64, t: f64) -> Result<f64> {
    let theta = theta_p(Exponent::finite(p)?)?;
    let a = PI / (2.0 * PI - theta);
    let x = t.exp();
    let (u, v) = ((x + 1.0).powf(a), (x - 1.0).powf(a));
    Ok((u - v) / (u + v))
}

/// `((1+e^{-t})^b - (1-e^{-t})^b) / ((1+e^{-t})^b + (1-e^{-t})^b)`, `b = π/θ_p`.
pub fn heat_upper_tail_factor(p: f64, t: f64) -> Result<f64> {
    let theta = theta_p(Exponent::finite(p)?)?;
    if theta == 0.0 {
        return Err(invalid("tail factor needs 1 < p < inf"));
    }
    let b = PI / theta;
    let x = (-t).exp();
    let (u, v) = ((1.0 + x).powf(b), (1.0 - x).powf(b));
    Ok((u - v) / (u + v))
}

/// Per-degree factor of the scalar moment comparison, `p > q > 1`.
pub fn moment_scalar_factor(p: f64, q: f64) -> Result<f64> {
    if !(p > q && q > 1.0 && p.is_finite()) {
        return Err(invalid(format!("need p > q > 1, got p = {p}, q = {q}")));
    }
    let theta = theta_p(Exponent::Finite(p))?;
    let a = PI / (2.0 * PI - theta);
    let (x, y) = ((p - 1.0).sqrt(), (q - 1.0).sqrt());
    let (u, v) = ((x + y).powf(a), (x - y).powf(a));
    Ok((u + v) / (u - v))
}

/// Smallest admissible time for hypercontractivity from `L_q` to `L_p`.
pub fn bonami_time(p: f64, q: f64) -> Result<f64> {
    if !(p > 1.0 && q > 1.0 && p.is_finite() && q.is_finite()) {
        return Err(invalid(format!("need finite p, q > 1, got {p}, {q}")));
    }
    Ok((0.5 * ((p - 1.0) / (q - 1.0)).ln()).max(0.0))
}

/// The factor `B` in `lhs <= B * rhs` for `id`, or the shape for the
/// measured families.
pub fn bound_value(id: BoundId, params: &BoundParams) -> Result<f64> {
    let d = params.d;
    let df = d as f64;
    match id {
        BoundId::HeatLowerGeneral => Ok(1.0 / chebyshev_t(d, params.t()?.exp())),
        BoundId::MomentGeneral => {
            let (p, q) = (params.p()?.value(), params.q()?.value());
            if !(p > q && q > 1.0 && p.is_finite()) {
                return Err(invalid(format!("need p > q > 1, got p = {p}, q = {q}")));
            }
            Ok(chebyshev_t(d, ((p - 1.0) / (q - 1.0)).sqrt()))
        }
        BoundId::PisierLowdeg => {
            if d == 0 {
                return Err(invalid("degree must be >= 1"));
            }
            Ok(3.0 * (df.ln() + 1.0))
        }
        BoundId::MarkovD2 => Ok(df * df),
        BoundId::MarkovHigherK => {
            let k = params.k.ok_or_else(|| invalid("bound needs k"))?;
            Ok(chebyshev_deriv_at_one(d, k))
        }
        BoundId::Chsqrt => {
            let t = params.t()?;
            Ok((3.0 * t.max(t.sqrt()) * df).exp())
        }
        BoundId::HeatLowerScalar => {
            let p = finite_open(params.p()?, "HEAT_LOWER_SCALAR")?;
            Ok(heat_lower_scalar_factor(p, params.t()?)?.powi(d as i32))
        }
        BoundId::HeatUpperTail => {
            let p = finite_open(params.p()?, "HEAT_UPPER_TAIL")?;
            Ok(heat_upper_tail_factor(p, params.t()?)?.powi(d as i32))
        }
        BoundId::MomentScalar => {
            let p = finite_open(params.p()?, "MOMENT_SCALAR")?;
            let q = finite_open(params.q()?, "MOMENT_SCALAR")?;
            Ok(moment_scalar_factor(p, q)?.powi(d as i32))
        }
        BoundId::L1L2 => Ok(L1_L2_BASE.powi(d as i32)),
        BoundId::LaplacianScalar => {
            let theta = theta_p(params.p()?)?;
            Ok(10.0 * df.powf(2.0 - theta / PI))
        }
        BoundId::GradScalar => {
            let p = finite_open(params.p()?, "GRAD_SCALAR")?;
            let theta = theta_p(Exponent::Finite(p))?;
            if p < 2.0 {
                Ok(df.powf(2.0 / p - theta / (p * PI)) * (df + 1.0).ln())
            } else {
                Ok(df.powf(1.0 - theta / (2.0 * PI)))
            }
        }
        BoundId::Influence => {
            let p = finite_open(params.p()?, "INFLUENCE")?;
            if p >= 4.0 / 3.0 {
                return Err(invalid(format!("INFLUENCE needs p < 4/3, got {p}")));
            }
            let s = 2.0 * (p - 1.0).sqrt() / p;
            Ok(df.powf(2.0 - s.asin() / PI))
        }
        BoundId::RevGrad => {
            let m = params.m.ok_or_else(|| invalid("bound needs m"))?;
            if m == 0 || d == 0 {
                return Err(invalid("REV_GRAD needs d, m >= 1"));
            }
            Ok((df / m as f64).sqrt())
        }
        BoundId::Bonami => {
            let p = finite_open(params.p()?, "BONAMI")?;
            let q = finite_open(params.q()?, "BONAMI")?;
            if let Some(t) = params.t {
                if t + 1e-15 < bonami_time(p, q)? {
                    return Err(invalid(format!(
                        "t = {t} is below the hypercontractive time {}",
                        bonami_time(p, q)?
                    )));
                }
            }
            Ok(1.0)
        }
        BoundId::SqrtPminus1 => {
            let p = params.p()?.value();
            if !(p >= 2.0 && p.is_finite()) {
                return Err(invalid(format!("SQRT_PMINUS1 needs 2 <= p < inf, got {p}")));
            }
            Ok((p - 1.0).powf(df / 2.0))
        }
        BoundId::GradInfEndpoint => Ok(2.0 * df),
        BoundId::GradL1Endpoint => Ok(L1_L2_BASE.powi(d as i32) * df.sqrt()),
        BoundId::HeatGradDecayInf => {
            let t = params.t()?;
            if t == 0.0 {
                return Err(invalid("HEAT_GRAD_DECAY_INF needs t > 0"));
            }
            Ok(1.0 / (2.0 * t).exp_m1().sqrt())
        }
        BoundId::NaosInterp => {
            let b = params.beta.ok_or_else(|| invalid("bound needs beta"))?;
            if !(b > 0.0 && b < 1.0) {
                return Err(invalid(format!("beta must lie in (0, 1), got {b}")));
            }
            Ok(4.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_lower_general_example() {
        let v = bound_value(BoundId::HeatLowerGeneral, &BoundParams::degree(2).with_t(2f64.ln())).unwrap();
        assert!((v - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn p_equals_two_reduces_to_exponentials() {
        for t in [0.1, 1.0, 2.5] {
            let lo = heat_lower_scalar_factor(2.0, t).unwrap();
            let up = heat_upper_tail_factor(2.0, t).unwrap();
            assert!((lo - (-t as f64).exp()).abs() < 1e-7);
            assert!((up - (-t as f64).exp()).abs() < 1e-7);
        }
        let c = moment_scalar_factor(2.0, 1.5).unwrap();
        assert!((c - 2f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn moment_factor_is_inverse_lower_factor_at_bonami_time() {
        for (p, q) in [(3.0, 2.0), (4.0, 3.0), (2.0, 1.5), (5.0, 1.2)] {
            let t = bonami_time(p, q).unwrap();
            let a = moment_scalar_factor(p, q).unwrap();
            let b = heat_lower_scalar_factor(p, t).unwrap();
            assert!((a * b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_factors_lie_in_unit_interval() {
        for p in [4.0 / 3.0, 1.5, 3.0, 4.0] {
            for t in [0.1, 0.7, 2.0] {
                let lo = heat_lower_scalar_factor(p, t).unwrap();
                assert!(lo > 0.0 && lo < 1.0);
                let up = heat_upper_tail_factor(p, t).unwrap();
                assert!(up > 0.0 && up < 1.0);
            }
        }
    }

    #[test]
    fn shapes_and_constants() {
        let p = BoundParams::degree(4);
        assert_eq!(bound_value(BoundId::MarkovD2, &p).unwrap(), 16.0);
        assert_eq!(bound_value(BoundId::MarkovHigherK, &p.with_k(2)).unwrap(), 80.0);
        assert_eq!(bound_value(BoundId::GradInfEndpoint, &p).unwrap(), 8.0);
        assert!((bound_value(BoundId::LaplacianScalar, &p.with_p(2.0)).unwrap() - 40.0).abs() < 1e-6);
        assert!((bound_value(BoundId::LaplacianScalar, &p.with_p(f64::INFINITY)).unwrap() - 160.0).abs() < 1e-12);
        assert_eq!(bound_value(BoundId::RevGrad, &p.with_m(1)).unwrap(), 2.0);
        assert!(bound_value(BoundId::Influence, &p.with_p(1.5)).is_err());
        assert!(bound_value(BoundId::MomentScalar, &p.with_p(2.0).with_q(3.0)).is_err());
        assert!(bound_value(BoundId::Bonami, &p.with_p(3.0).with_q(2.0).with_t(0.1)).is_err());
        assert_eq!(bound_value(BoundId::Bonami, &p.with_p(3.0).with_q(2.0).with_t(0.5)).unwrap(), 1.0);
        assert!(bound_value(BoundId::NaosInterp, &p.with_beta(1.0)).is_err());
    }

    #[test]
    fn names_roundtrip() {
        for id in BoundId::ALL {
            assert_eq!(id.name().parse::<BoundId>().unwrap(), id);
            let js = serde_json::to_string(&id).unwrap();
            assert_eq!(js, format!("\"{}\"", id.name()));
        }
    }
}
