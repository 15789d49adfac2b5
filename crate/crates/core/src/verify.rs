//! Randomized and witness-based checking of the cube inequalities.
//!
//! A [`CheckSpec`] names an inequality and the parameters to test it at.
//! [`run_check`] draws `trials` random functions (trial `i` uses substream
//! `i` of `seed`), evaluates `lhs / rhs` for each, and reports the worst
//! ratio. Proven inequalities pass when the worst ratio is at most
//! `1 + tolerance`; for the families whose constant is not explicit the
//! worst ratio is reported as the measured constant.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::{entropy, influence, lp_norm, lp_norm_of_norms, RatioSample};
use crate::classical::bounds::{bonami_time, bound_value, BoundId, BoundParams};
use crate::classical::chebyshev::chebyshev_t;
use crate::classical::lens::LensDomain;
use crate::cube::{
    character, fwht, rng_for, random_function, CubeFunction, SpectralBand, TargetSpace,
};
use crate::error::{invalid, Error, Result};
use crate::exponent::Exponent;
use crate::io::FunctionFile;
use crate::operators::{
    dual_gradient_functional, gradient_norm, heat_probabilistic, ApplyMultiplier,
    LevelMultiplier, DUAL_GRADIENT_MAX_N, HEAT_PROBABILISTIC_MAX_N,
};
use crate::radial::RadialFunction;

/// Default heat times.
pub const DEFAULT_T_GRID: [f64; 8] = [0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0];
/// Default tolerance on the worst ratio of a proven inequality.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Largest discarded fraction accepted for measured constants.
pub const MAX_DISCARD_RATE: f64 = 0.01;
/// Absolute agreement required between the two heat formulas.
pub const HEAT_EQUIV_TOL: f64 = 1e-10;
/// Relative agreement required by Parseval's identity.
pub const PARSEVAL_TOL: f64 = 1e-12;

// Auxiliary draws (complex times) use a separate key so they never overlap
// with the function streams.
const AUX_KEY: u64 = 0x9e37_79b9_7f4a_7c15;

/// What a check tests: one of the closed-form bounds or an extra family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TheoremId {
    Bound(BoundId),
    /// `||f||_2^2 = sum_A |f^(A)|^2`.
    Parseval,
    /// Walsh and randomized-restriction heat formulas agree.
    HeatEquiv,
    /// `Ent(||f||^q) <= C d ||f||_q^q`, constant measured.
    EntropyRatio,
    /// `||Δ^{1/2} f||_p >= c sqrt(d/m) ||f||_p` on `[d, d+m]`, constant measured.
    DeltaHalfRatio,
    /// `||w^Δ f||_p <= ||f||_p` for `w` in the closed lens of radius `r_p`.
    WeisslerContraction,
    /// `||w^Δ f||_p <= ||f||_{p*}` for `p > 2` and `w` in the Beckner domain.
    BecknerContraction,
    /// `||f - Ef||_p <= (log n + 1) * dual gradient`, all degrees.
    PisierFull,
    /// `||∇ e^{-tΔ} f||_p <= A_p (e^{pt} - 1)^{-1/p} ||f||_p`, `1 < p <= 2`, `A_p` measured.
    GradDecayLp,
}

impl TheoremId {
    pub const EXTRA: [(TheoremId, &'static str); 8] = [
        (TheoremId::Parseval, "PARSEVAL"),
        (TheoremId::HeatEquiv, "HEAT_EQUIV"),
        (TheoremId::EntropyRatio, "ENTROPY_RATIO"),
        (TheoremId::DeltaHalfRatio, "DELTA_HALF_RATIO"),
        (TheoremId::WeisslerContraction, "WEISSLER_CONTRACTION"),
        (TheoremId::BecknerContraction, "BECKNER_CONTRACTION"),
        (TheoremId::PisierFull, "PISIER_FULL"),
        (TheoremId::GradDecayLp, "GRAD_DECAY_LP"),
    ];

    pub fn all() -> Vec<TheoremId> {
        BoundId::ALL
            .iter()
            .map(|&b| TheoremId::Bound(b))
            .chain(Self::EXTRA.iter().map(|&(t, _)| t))
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Bound(b) => b.name(),
            other => {
                Self::EXTRA
                    .iter()
                    .find(|(t, _)| *t == other)
                    .map(|(_, s)| *s)
                    .unwrap_or("?")
            }
        }
    }

    /// One-line statement of the checked inequality and its hypotheses.
    pub fn hypothesis(self) -> &'static str {
        use BoundId::*;
        match self {
            TheoremId::Bound(b) => match b {
                HeatLowerGeneral => "||e^{-tΔ}f||_p >= ||f||_p / T_d(e^t); degree <= d, any target, p >= 1, t >= 0",
                MomentGeneral => "||f||_p <= T_d(sqrt((p-1)/(q-1))) ||f||_q; degree <= d, any target, p > q > 1",
                PisierLowdeg => "||f - Ef||_p <= 3(log d + 1) * dual gradient; degree <= d, d >= 1, any target, finite p, n <= 10",
                MarkovD2 => "||Δf||_p <= d^2 ||f||_p; degree <= d, any target, p >= 1",
                MarkovHigherK => "||Δ(Δ-1)...(Δ-k+1)f||_p <= T_d^(k)(1) ||f||_p; degree <= d, 1 <= k <= d, any target",
                Chsqrt => "T_d(e^t) <= exp(3 max(t, sqrt t) d); t >= 0",
                HeatLowerScalar => "||e^{-tΔ}f||_p >= L_p(t)^d ||f||_p; scalar, degree <= d, 1 < p < inf",
                HeatUpperTail => "||e^{-tΔ}f||_p <= U_p(t)^d ||f||_p; scalar, levels >= d, 1 < p < inf",
                MomentScalar => "||f||_p <= C(p,q)^d ||f||_q; scalar, degree <= d, p > q > 1",
                L1L2 => "||f||_2 <= 2.69076^d ||f||_1; scalar, degree <= d",
                LaplacianScalar => "||Δf||_p <= 10 d^{2 - θ_p/π} ||f||_p; scalar, degree <= d, p >= 1",
                GradScalar => "||∇f||_p <= C_p * shape(d) ||f||_p, C_p measured; scalar, degree <= d, 1 < p < inf",
                Influence => "Inf^(p)(f) <= C * d^{2 - asin(2 sqrt(p-1)/p)/π} ||f||_inf^p, C measured; scalar, degree <= d, 1 < p < 4/3",
                RevGrad => "||∇f||_p >= c_p sqrt(d/m) ||f||_p, 1/c_p measured; scalar, levels in [d, d+m], 1 < p < inf",
                Bonami => "||e^{-tΔ}f||_p <= ||f||_q for t >= log((p-1)/(q-1))/2; any target, p > q > 1",
                SqrtPminus1 => "||f||_p <= (p-1)^{d/2} ||f||_2; scalar, degree <= d, 2 <= p < inf",
                GradInfEndpoint => "||∇f||_inf <= 2d ||f||_inf; scalar, degree <= d",
                GradL1Endpoint => "||∇f||_1 <= 2.69076^d sqrt(d) ||f||_1; scalar, degree <= d",
                HeatGradDecayInf => "||∇e^{-tΔ}f||_p <= ||f||_p / sqrt(e^{2t} - 1); scalar, any degree, p >= 2, t > 0",
                NaosInterp => "||Δ^β g||_p <= 4 ||Δg||_p^β ||g||_p^{1-β}; any target, any degree, 0 < β < 1",
            },
            TheoremId::Parseval => "||f||_2^2 = sum_A |f^(A)|^2 to 1e-12 relative; any target",
            TheoremId::HeatEquiv => "Walsh and random-restriction heat formulas agree to 1e-10; any target, n <= 12",
            TheoremId::EntropyRatio => "Ent(||f||^q) <= C_q d ||f||_q^q, C_q measured (q = --p); degree <= d, d >= 1, any target",
            TheoremId::DeltaHalfRatio => "||Δ^{1/2}f||_p >= c sqrt(d/m) ||f||_p, 1/c measured; levels in [d, d+m], scalar or l_q with 1 < q < inf",
            TheoremId::WeisslerContraction => "||w^Δ f||_p <= ||f||_p for w in the closed lens of radius p/(2 sqrt(p-1)); scalar, 1 < p < inf",
            TheoremId::BecknerContraction => "||w^Δ f||_p <= ||f||_{p*} for w in the Beckner domain; scalar, 2 < p < inf",
            TheoremId::PisierFull => "||f - Ef||_p <= (log n + 1) * dual gradient; any target, any degree, finite p, n <= 10",
            TheoremId::GradDecayLp => "||∇e^{-tΔ}f||_p <= A_p ||f||_p / (e^{pt} - 1)^{1/p}, A_p measured; scalar, 1 < p <= 2, t > 0",
        }
    }

    /// True for the families whose constant is reported rather than checked.
    pub fn is_measured(self) -> bool {
        match self {
            TheoremId::Bound(b) => b.is_measured(),
            TheoremId::EntropyRatio | TheoremId::DeltaHalfRatio | TheoremId::GradDecayLp => true,
            _ => false,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some((t, _)) = Self::EXTRA.iter().find(|(_, n)| n.eq_ignore_ascii_case(s)) {
            return Ok(*t);
        }
        s.parse::<BoundId>()
            .map(TheoremId::Bound)
            .map_err(|_| invalid(format!("unknown theorem id {s}")))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for TheoremId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parameters of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckSpec {
    pub theorem: TheoremId,
    pub n: usize,
    pub d: usize,
    /// Band width for the reverse inequalities (`[d, d+m]`).
    pub m: usize,
    pub p: Exponent,
    pub q: Option<Exponent>,
    pub t_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub target: TargetSpace,
    /// Evaluate the registered witness instead of random trials.
    pub witness_only: bool,
    /// Order of the falling factorial for `MARKOV_HIGHER_K`.
    pub k: usize,
    /// Exponent for `NAOS_INTERP`.
    pub beta: f64,
    pub tolerance: f64,
}

impl CheckSpec {
    pub fn new(theorem: TheoremId, n: usize, d: usize) -> Self {
        CheckSpec {
            theorem,
            n,
            d,
            m: 1,
            p: Exponent::Finite(2.0),
            q: None,
            t_grid: DEFAULT_T_GRID.to_vec(),
            trials: 100,
            seed: 0,
            target: TargetSpace::Scalar,
            witness_only: false,
            k: 1,
            beta: 0.5,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn bound(id: BoundId, n: usize, d: usize) -> Self {
        Self::new(TheoremId::Bound(id), n, d)
    }

    pub fn with_p(mut self, p: impl Into<Exponent>) -> Self {
        self.p = p.into();
        self
    }

    pub fn with_q(mut self, q: impl Into<Exponent>) -> Self {
        self.q = Some(q.into());
        self
    }

    pub fn with_t_grid(mut self, t: Vec<f64>) -> Self {
        self.t_grid = t;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_target(mut self, target: TargetSpace) -> Self {
        self.target = target;
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn witness_only(mut self) -> Self {
        self.witness_only = true;
        self
    }

    fn q_value(&self) -> Result<f64> {
        match self.q {
            Some(Exponent::Finite(q)) => Ok(q),
            Some(Exponent::Infinity) => Err(invalid("q must be finite")),
            None => Err(invalid(format!("{} needs q", self.theorem))),
        }
    }

    fn p_finite(&self) -> Result<f64> {
        match self.p {
            Exponent::Finite(p) => Ok(p),
            Exponent::Infinity => Err(Error::InvalidExponent(format!(
                "{} needs finite p",
                self.theorem
            ))),
        }
    }

    /// Spectral band random trials are drawn from.
    pub fn band(&self) -> Result<SpectralBand> {
        use BoundId::*;
        let n = self.n;
        match self.theorem {
            TheoremId::Bound(HeatUpperTail) => SpectralBand::tail(self.d, n),
            TheoremId::Bound(RevGrad) | TheoremId::DeltaHalfRatio => {
                SpectralBand::new(self.d, self.d + self.m, n)
            }
            TheoremId::Parseval
            | TheoremId::HeatEquiv
            | TheoremId::WeisslerContraction
            | TheoremId::BecknerContraction
            | TheoremId::PisierFull
            | TheoremId::GradDecayLp
            | TheoremId::Bound(Bonami)
            | TheoremId::Bound(HeatGradDecayInf)
            | TheoremId::Bound(NaosInterp) => Ok(SpectralBand::full(n)),
            _ => SpectralBand::degree_at_most(self.d, n),
        }
    }

    fn bound_params(&self) -> BoundParams {
        BoundParams {
            d: self.d,
            p: Some(self.p),
            q: self.q,
            t: None,
            m: Some(self.m),
            k: Some(self.k),
            beta: Some(self.beta),
        }
    }

    /// Checks preconditions; every error here is a usage error.
    pub fn validate(&self) -> Result<()> {
        use BoundId::*;
        let th = self.theorem;
        if self.n == 0 {
            return Err(invalid("n must be positive"));
        }
        if self.n > crate::cube::MAX_N {
            return Err(Error::DimensionTooLarge {
                n: self.n,
                max: crate::cube::MAX_N,
            });
        }
        if self.trials == 0 && !self.witness_only {
            return Err(invalid("trials must be positive"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(invalid("tolerance must be >= 0"));
        }
        self.p.require_at_least_one()?;
        if self.t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(invalid("heat times must be finite and >= 0"));
        }
        if th != TheoremId::Bound(Chsqrt) {
            self.band()?;
        }
        let scalar_only = matches!(
            th,
            TheoremId::Bound(
                HeatLowerScalar
                    | HeatUpperTail
                    | MomentScalar
                    | L1L2
                    | LaplacianScalar
                    | GradScalar
                    | Influence
                    | RevGrad
                    | SqrtPminus1
                    | GradInfEndpoint
                    | GradL1Endpoint
                    | HeatGradDecayInf
            ) | TheoremId::GradDecayLp
                | TheoremId::WeisslerContraction
                | TheoremId::BecknerContraction
        );
        let vector_witness = self.witness_only && matches!(th, TheoremId::Bound(MarkovD2));
        if scalar_only && !self.target.is_scalar() && !vector_witness {
            return Err(Error::UnsupportedTarget(format!(
                "{th} is stated for scalar functions"
            )));
        }
        let needs_t = matches!(
            th,
            TheoremId::Bound(
                HeatLowerGeneral | Chsqrt | HeatLowerScalar | HeatUpperTail | HeatGradDecayInf
            ) | TheoremId::HeatEquiv
                | TheoremId::GradDecayLp
        );
        if needs_t && self.t_grid.is_empty() {
            return Err(invalid(format!("{th} needs a non-empty t grid")));
        }
        let p = self.p.value();
        match th {
            TheoremId::Bound(MomentGeneral | MomentScalar | Bonami) => {
                let q = self.q_value()?;
                if !(p > q && q > 1.0 && p.is_finite()) {
                    return Err(invalid(format!("{th} needs p > q > 1")));
                }
            }
            TheoremId::Bound(PisierLowdeg) | TheoremId::PisierFull => {
                self.p_finite()?;
                if self.n > DUAL_GRADIENT_MAX_N {
                    return Err(Error::DimensionTooLarge {
                        n: self.n,
                        max: DUAL_GRADIENT_MAX_N,
                    });
                }
                if th == TheoremId::Bound(PisierLowdeg) && self.d == 0 {
                    return Err(invalid("degree must be >= 1"));
                }
            }
            TheoremId::Bound(MarkovHigherK) => {
                if self.k == 0 || self.k > self.d {
                    return Err(invalid("MARKOV_HIGHER_K needs 1 <= k <= d"));
                }
            }
            TheoremId::Bound(HeatLowerScalar | HeatUpperTail | GradScalar | RevGrad) => {
                let p = self.p_finite()?;
                if p <= 1.0 {
                    return Err(invalid(format!("{th} needs 1 < p < inf")));
                }
            }
            TheoremId::Bound(Influence) => {
                let p = self.p_finite()?;
                if !(p > 1.0 && p < 4.0 / 3.0) {
                    return Err(invalid("INFLUENCE needs 1 < p < 4/3"));
                }
            }
            TheoremId::Bound(SqrtPminus1) => {
                if !(p >= 2.0 && p.is_finite()) {
                    return Err(invalid("SQRT_PMINUS1 needs 2 <= p < inf"));
                }
            }
            TheoremId::Bound(HeatGradDecayInf) => {
                if p < 2.0 {
                    return Err(invalid("HEAT_GRAD_DECAY_INF needs p >= 2"));
                }
                if self.t_grid.iter().any(|&t| t == 0.0) {
                    return Err(invalid("HEAT_GRAD_DECAY_INF needs t > 0"));
                }
            }
            TheoremId::GradDecayLp => {
                if !(p > 1.0 && p <= 2.0) {
                    return Err(invalid("GRAD_DECAY_LP needs 1 < p <= 2"));
                }
                if self.t_grid.iter().any(|&t| t == 0.0) {
                    return Err(invalid("GRAD_DECAY_LP needs t > 0"));
                }
            }
            TheoremId::Bound(NaosInterp) => {
                if !(self.beta > 0.0 && self.beta < 1.0) {
                    return Err(invalid("beta must lie in (0, 1)"));
                }
            }
            TheoremId::EntropyRatio => {
                self.p_finite()?;
                if self.d == 0 {
                    return Err(invalid("ENTROPY_RATIO needs d >= 1"));
                }
            }
            TheoremId::WeisslerContraction => {
                let p = self.p_finite()?;
                if p <= 1.0 {
                    return Err(invalid("WEISSLER_CONTRACTION needs 1 < p < inf"));
                }
            }
            TheoremId::BecknerContraction => {
                let p = self.p_finite()?;
                if p <= 2.0 {
                    return Err(invalid("BECKNER_CONTRACTION needs 2 < p < inf"));
                }
            }
            TheoremId::HeatEquiv => {
                if self.n > HEAT_PROBABILISTIC_MAX_N {
                    return Err(Error::DimensionTooLarge {
                        n: self.n,
                        max: HEAT_PROBABILISTIC_MAX_N,
                    });
                }
            }
            _ => {}
        }
        if matches!(th, TheoremId::Bound(RevGrad) | TheoremId::DeltaHalfRatio) {
            if self.d == 0 || self.m == 0 {
                return Err(invalid(format!("{th} needs d, m >= 1")));
            }
            if th == TheoremId::DeltaHalfRatio {
                if let TargetSpace::Lq { q, .. } = self.target {
                    if matches!(q, Exponent::Infinity) || q.value() == 1.0 {
                        return Err(Error::UnsupportedTarget(
                            "DELTA_HALF_RATIO needs a K-convex target (1 < q < inf)".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parameters echoed in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub p: Exponent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Exponent>,
    pub t_grid: Vec<f64>,
    pub target: crate::io::TargetJson,
    pub k: usize,
    pub beta: f64,
    pub tolerance: f64,
    pub witness_only: bool,
}

impl From<&CheckSpec> for ReportParams {
    fn from(s: &CheckSpec) -> Self {
        ReportParams {
            n: s.n,
            d: s.d,
            m: s.m,
            p: s.p,
            q: s.q,
            t_grid: s.t_grid.clone(),
            target: s.target.into(),
            k: s.k,
            beta: s.beta,
            tolerance: s.tolerance,
            witness_only: s.witness_only,
        }
    }
}

/// Outcome of [`run_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub theorem: TheoremId,
    pub params: ReportParams,
    pub trials: usize,
    pub worst_ratio: f64,
    pub mean_ratio: f64,
    pub pass: bool,
    pub measured_constant: Option<f64>,
    pub witness: Option<FunctionFile>,
    pub seed: u64,
    pub runtime_ms: u64,
    /// Trials whose ratio was not finite.
    pub discarded: usize,
    /// Trial index of the witness (`None` for registered witnesses).
    pub witness_trial: Option<u64>,
}

impl CheckReport {
    /// Copy with `runtime_ms` zeroed, for byte-stable output.
    pub fn without_timing(mut self) -> Self {
        self.runtime_ms = 0;
        self
    }
}

fn norm(f: &CubeFunction, p: Exponent) -> Result<f64> {
    lp_norm(f, p)
}

fn apply(f: &CubeFunction, m: LevelMultiplier) -> Result<CubeFunction> {
    f.apply_multiplier(&m)
}

fn worst(samples: impl IntoIterator<Item = RatioSample>) -> RatioSample {
    let mut best: Option<RatioSample> = None;
    for s in samples {
        best = match best {
            None => Some(s),
            Some(b) if !(s.ratio <= b.ratio) => Some(s),
            keep => keep,
        };
    }
    best.unwrap_or(RatioSample::new(0.0, 0.0))
}

fn minus_mean(f: &CubeFunction) -> CubeFunction {
    let m = f.target().dim();
    let mut mean = vec![Complex64::new(0.0, 0.0); m];
    for block in f.values().chunks(m) {
        for (a, b) in mean.iter_mut().zip(block) {
            *a += b;
        }
    }
    let len = f.len() as f64;
    let vals = f
        .values()
        .chunks(m)
        .flat_map(|b| b.iter().zip(&mean).map(move |(x, mu)| x - mu / len))
        .collect();
    CubeFunction::new(f.n(), f.target(), vals).expect("same shape")
}

fn max_abs_diff(a: &CubeFunction, b: &CubeFunction) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Complex time for the contraction checks, drawn from the trial's own
/// auxiliary stream.
pub fn auxiliary_point(spec: &CheckSpec, trial: u64) -> Result<Complex64> {
    let p = spec.p_finite()?;
    let mut rng = rng_for(spec.seed ^ AUX_KEY, trial);
    let lens = LensDomain::for_exponent(p)?;
    let z = lens.sample(&mut rng, 1.0);
    Ok(match spec.theorem {
        TheoremId::BecknerContraction => z / Complex64::new(0.0, (p - 1.0).sqrt()),
        _ => z,
    })
}

/// Evaluates the check on one function; the result is the worst sample over
/// the t grid (and auxiliary draws). `trial` keys the auxiliary draws.
pub fn evaluate_function(spec: &CheckSpec, f: &CubeFunction, trial: u64) -> Result<RatioSample> {
    use BoundId::*;
    let n = f.n();
    let p = spec.p;
    let bp = spec.bound_params();
    let b = |id: BoundId, t: Option<f64>| {
        let mut params = bp;
        params.t = t;
        bound_value(id, &params)
    };
    let sample = match spec.theorem {
        TheoremId::Parseval => {
            let two = Exponent::Finite(2.0);
            let l = lp_norm_of_norms(
                &f.values()
                    .chunks(f.target().dim())
                    .map(|x| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
                    .collect::<Vec<_>>(),
                two,
            )
            .powi(2);
            let e = fwht(f).energy();
            RatioSample::new((l - e).abs(), PARSEVAL_TOL * l.max(f64::MIN_POSITIVE))
        }
        TheoremId::HeatEquiv => {
            let mut out = Vec::new();
            for &t in &spec.t_grid {
                let a = apply(f, LevelMultiplier::heat(n, t)?)?;
                let c = heat_probabilistic(f, t)?;
                out.push(RatioSample::new(max_abs_diff(&a, &c), HEAT_EQUIV_TOL));
            }
            worst(out)
        }
        TheoremId::Bound(HeatLowerGeneral) | TheoremId::Bound(HeatLowerScalar) => {
            let id = match spec.theorem {
                TheoremId::Bound(id) => id,
                _ => unreachable!(),
            };
            let nf = norm(f, p)?;
            let mut out = Vec::new();
            for &t in &spec.t_grid {
                let h = norm(&apply(f, LevelMultiplier::heat(n, t)?)?, p)?;
                out.push(RatioSample::new(b(id, Some(t))? * nf, h));
            }
            worst(out)
        }
        TheoremId::Bound(HeatUpperTail) => {
            let nf = norm(f, p)?;
            let mut out = Vec::new();
            for &t in &spec.t_grid {
                let h = norm(&apply(f, LevelMultiplier::heat(n, t)?)?, p)?;
                out.push(RatioSample::new(h, b(HeatUpperTail, Some(t))? * nf));
            }
            worst(out)
        }
        TheoremId::Bound(id @ (MomentGeneral | MomentScalar)) => {
            let q = Exponent::Finite(spec.q_value()?);
            RatioSample::new(norm(f, p)?, b(id, None)? * norm(f, q)?)
        }
        TheoremId::Bound(PisierLowdeg) | TheoremId::PisierFull => {
            let c = match spec.theorem {
                TheoremId::PisierFull => (n as f64).ln() + 1.0,
                _ => b(PisierLowdeg, None)?,
            };
            RatioSample::new(
                norm(&minus_mean(f), p)?,
                c * dual_gradient_functional(f, p)?,
            )
        }
        TheoremId::Bound(id @ (MarkovD2 | LaplacianScalar)) => RatioSample::new(
            norm(&apply(f, LevelMultiplier::laplacian(n))?, p)?,
            b(id, None)? * norm(f, p)?,
        ),
        TheoremId::Bound(MarkovHigherK) => RatioSample::new(
            norm(&apply(f, LevelMultiplier::falling_factorial(n, spec.k))?, p)?,
            b(MarkovHigherK, None)? * norm(f, p)?,
        ),
        TheoremId::Bound(Chsqrt) => worst(
            spec.t_grid
                .iter()
                .map(|&t| Ok(RatioSample::new(chebyshev_t(spec.d, t.exp()), b(Chsqrt, Some(t))?)))
                .collect::<Result<Vec<_>>>()?,
        ),
        TheoremId::Bound(L1L2) => RatioSample::new(
            norm(f, Exponent::Finite(2.0))?,
            b(L1L2, None)? * norm(f, Exponent::Finite(1.0))?,
        ),
        TheoremId::Bound(GradScalar) => {
            RatioSample::new(norm(&gradient_norm(f)?, p)?, b(GradScalar, None)? * norm(f, p)?)
        }
        TheoremId::Bound(Influence) => RatioSample::new(
            influence(f, p)?,
            b(Influence, None)? * norm(f, Exponent::Infinity)?.powf(p.value()),
        ),
        TheoremId::Bound(RevGrad) => {
            RatioSample::new(b(RevGrad, None)? * norm(f, p)?, norm(&gradient_norm(f)?, p)?)
        }
        TheoremId::DeltaHalfRatio => {
            let shape = (spec.d as f64 / spec.m as f64).sqrt();
            RatioSample::new(
                shape * norm(f, p)?,
                norm(&apply(f, LevelMultiplier::fractional(n, 0.5)?)?, p)?,
            )
        }
        TheoremId::EntropyRatio => {
            let q = spec.p_finite()?;
            RatioSample::new(entropy(f, q)?, spec.d as f64 * norm(f, p)?.powf(q))
        }
        TheoremId::Bound(Bonami) => {
            let (pv, q) = (spec.p_finite()?, spec.q_value()?);
            let t0 = bonami_time(pv, q)?;
            let mut ts: Vec<f64> = spec.t_grid.iter().copied().filter(|&t| t >= t0).collect();
            if ts.is_empty() {
                ts.push(t0);
            }
            let nq = norm(f, Exponent::Finite(q))?;
            let mut out = Vec::new();
            for t in ts {
                let h = norm(&apply(f, LevelMultiplier::heat(n, t)?)?, p)?;
                out.push(RatioSample::new(h, b(Bonami, Some(t))? * nq));
            }
            worst(out)
        }
        TheoremId::Bound(SqrtPminus1) => RatioSample::new(
            norm(f, p)?,
            b(SqrtPminus1, None)? * norm(f, Exponent::Finite(2.0))?,
        ),
        TheoremId::Bound(GradInfEndpoint) => RatioSample::new(
            norm(&gradient_norm(f)?, Exponent::Infinity)?,
            b(GradInfEndpoint, None)? * norm(f, Exponent::Infinity)?,
        ),
        TheoremId::Bound(GradL1Endpoint) => RatioSample::new(
            norm(&gradient_norm(f)?, Exponent::Finite(1.0))?,
            b(GradL1Endpoint, None)? * norm(f, Exponent::Finite(1.0))?,
        ),
        TheoremId::Bound(HeatGradDecayInf) => {
            let nf = norm(f, p)?;
            let mut out = Vec::new();
            for &t in &spec.t_grid {
                let g = gradient_norm(&apply(f, LevelMultiplier::heat(n, t)?)?)?;
                out.push(RatioSample::new(norm(&g, p)?, b(HeatGradDecayInf, Some(t))? * nf));
            }
            worst(out)
        }
        TheoremId::GradDecayLp => {
            let pv = spec.p_finite()?;
            let nf = norm(f, p)?;
            let mut out = Vec::new();
            for &t in &spec.t_grid {
                let g = gradient_norm(&apply(f, LevelMultiplier::heat(n, t)?)?)?;
                let decay = (pv * t).exp_m1().powf(1.0 / pv);
                out.push(RatioSample::new(norm(&g, p)? * decay, nf));
            }
            worst(out)
        }
        TheoremId::Bound(NaosInterp) => {
            let beta = spec.beta;
            let frac = norm(&apply(f, LevelMultiplier::fractional(n, beta)?)?, p)?;
            let lap = norm(&apply(f, LevelMultiplier::laplacian(n))?, p)?;
            let base = norm(f, p)?;
            RatioSample::new(
                frac,
                b(NaosInterp, None)? * lap.powf(beta) * base.powf(1.0 - beta),
            )
        }
        TheoremId::WeisslerContraction => {
            let w = auxiliary_point(spec, trial)?;
            RatioSample::new(norm(&apply(f, LevelMultiplier::power(n, w)?)?, p)?, norm(f, p)?)
        }
        TheoremId::BecknerContraction => {
            let w = auxiliary_point(spec, trial)?;
            let pstar = p.conjugate();
            RatioSample::new(
                norm(&apply(f, LevelMultiplier::power(n, w)?)?, p)?,
                norm(f, pstar)?,
            )
        }
    };
    Ok(sample)
}

/// `[F(e)](d) = T_d(<e, d> / n)` with values in `l_inf^{2^n}`; `n <= 12`.
pub fn vector_chebyshev_witness(n: usize, d: usize) -> Result<CubeFunction> {
    if n == 0 || n > 12 {
        return Err(invalid("vector witness needs 1 <= n <= 12"));
    }
    let size = 1usize << n;
    let phi: Vec<f64> = (0..=n)
        .map(|j| chebyshev_t(d, 1.0 - 2.0 * j as f64 / n as f64))
        .collect();
    let mut vals = Vec::with_capacity(size * size);
    for e in 0..size {
        for delta in 0..size {
            vals.push(Complex64::new(phi[(e ^ delta).count_ones() as usize], 0.0));
        }
    }
    CubeFunction::new(n, TargetSpace::lq(Exponent::Infinity, size)?, vals)
}

/// The registered witness for `spec`.
///
/// Chebyshev families use `T_d((e_1 + ... + e_n)/n)` (or its vector form for
/// an `l_inf^{2^n}` target); everything else uses the character of the
/// first `d` coordinates (or of `[d, d+m]` for band families).
pub fn witness_function(spec: &CheckSpec) -> Result<CubeFunction> {
    use BoundId::*;
    let n = spec.n;
    match spec.theorem {
        TheoremId::Bound(MarkovD2) if !spec.target.is_scalar() => {
            let want = TargetSpace::lq(Exponent::Infinity, 1 << n)?;
            if spec.target != want {
                return Err(Error::UnsupportedTarget(
                    "the vector witness lives in l_inf^{2^n}".into(),
                ));
            }
            vector_chebyshev_witness(n, spec.d)
        }
        TheoremId::Bound(
            MarkovD2 | MarkovHigherK | GradInfEndpoint | HeatLowerGeneral | MomentGeneral
            | LaplacianScalar,
        ) if spec.target.is_scalar() => RadialFunction::chebyshev_witness(n, spec.d)?.expand(),
        TheoremId::Bound(Chsqrt) => Err(invalid("CHSQRT has no function witness")),
        _ => {
            let band = spec.band()?;
            let deg = band.high.min(spec.d.max(band.low));
            let f = character(n, (1usize << deg) - 1)?;
            if spec.target.is_scalar() {
                Ok(f)
            } else {
                let m = spec.target.dim();
                let vals = f
                    .values()
                    .iter()
                    .flat_map(|z| std::iter::repeat(*z).take(m))
                    .collect();
                CubeFunction::new(n, spec.target, vals)
            }
        }
    }
}

fn trial_function(spec: &CheckSpec, trial: u64) -> Result<CubeFunction> {
    random_function(spec.n, spec.band()?, spec.target, spec.seed, trial)
}

/// Runs a check. Trials are evaluated in parallel on the current rayon
/// pool and reduced in trial order, so the report does not depend on the
/// number of threads.
pub fn run_check(spec: &CheckSpec) -> Result<CheckReport> {
    spec.validate()?;
    let start = Instant::now();
    let function_free = spec.theorem == TheoremId::Bound(BoundId::Chsqrt);
    let (samples, trials): (Vec<RatioSample>, usize) = if spec.witness_only || function_free {
        let s = if function_free {
            let dummy = CubeFunction::zeros(1, TargetSpace::Scalar)?;
            evaluate_function(spec, &dummy, 0)?
        } else {
            evaluate_function(spec, &witness_function(spec)?, 0)?
        };
        (vec![s], 1)
    } else {
        let s = (0..spec.trials as u64)
            .into_par_iter()
            .map(|i| evaluate_function(spec, &trial_function(spec, i)?, i))
            .collect::<Result<Vec<_>>>()?;
        (s, spec.trials)
    };
    let mut discarded = 0;
    let mut worst_idx: Option<usize> = None;
    let mut sum = crate::numeric::KahanSum::new();
    let mut kept = 0usize;
    for (i, s) in samples.iter().enumerate() {
        if !s.is_finite() {
            discarded += 1;
            continue;
        }
        kept += 1;
        sum.add(s.ratio);
        match worst_idx {
            Some(w) if samples[w].ratio >= s.ratio => {}
            _ => worst_idx = Some(i),
        }
    }
    let worst_ratio = worst_idx.map(|i| samples[i].ratio).unwrap_or(0.0);
    let mean_ratio = if kept > 0 { sum.value() / kept as f64 } else { 0.0 };
    let measured = spec.theorem.is_measured();
    let discard_ok = (discarded as f64) <= MAX_DISCARD_RATE * trials as f64;
    let pass = if measured {
        discard_ok && kept > 0 && worst_ratio.is_finite() && worst_ratio > 0.0
    } else {
        discarded == 0 && worst_ratio <= 1.0 + spec.tolerance
    };
    let (witness, witness_trial) = if function_free {
        (None, None)
    } else if spec.witness_only {
        (Some(FunctionFile::from_function(&witness_function(spec)?)), None)
    } else {
        match worst_idx {
            Some(i) => (
                Some(FunctionFile::from_function(&trial_function(spec, i as u64)?)),
                Some(i as u64),
            ),
            None => (None, None),
        }
    };
    Ok(CheckReport {
        theorem: spec.theorem,
        params: spec.into(),
        trials,
        worst_ratio,
        mean_ratio,
        pass,
        measured_constant: if measured { Some(worst_ratio) } else { None },
        witness,
        seed: spec.seed,
        runtime_ms: start.elapsed().as_millis() as u64,
        discarded,
        witness_trial,
    })
}

/// Re-evaluates a report's witness; agrees with `worst_ratio`.
pub fn reevaluate_witness(spec: &CheckSpec, report: &CheckReport) -> Result<f64> {
    let w = report
        .witness
        .as_ref()
        .ok_or_else(|| invalid("report has no witness"))?;
    let f = w.to_function()?;
    Ok(evaluate_function(spec, &f, report.witness_trial.unwrap_or(0))?.ratio)
}

/// Parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    N,
    D,
    P,
    T,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepAxis::N),
            "d" => Ok(SweepAxis::D),
            "p" => Ok(SweepAxis::P),
            "t" => Ok(SweepAxis::T),
            _ => Err(invalid(format!("unknown sweep axis {s}"))),
        }
    }
}

/// Runs `template` at each value of `axis`; point `i` uses seed `seed ^ i`.
pub fn sweep(template: &CheckSpec, axis: SweepAxis, values: &[f64]) -> Result<Vec<CheckReport>> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut s = template.clone();
            s.seed = template.seed ^ i as u64;
            match axis {
                SweepAxis::N => s.n = as_count(v)?,
                SweepAxis::D => s.d = as_count(v)?,
                SweepAxis::P => s.p = Exponent::from(v),
                SweepAxis::T => s.t_grid = vec![v],
            }
            run_check(&s)
        })
        .collect()
}

fn as_count(v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e9 {
        Ok(v as usize)
    } else {
        Err(invalid(format!("{v} is not a non-negative integer")))
    }
}

/// Header of the sweep CSV.
pub const SWEEP_HEADER: [&str; 10] = [
    "theorem",
    "n",
    "d",
    "m",
    "p",
    "q",
    "t",
    "target",
    "worst_ratio",
    "pass",
];

/// One CSV row per report.
pub fn sweep_rows(reports: &[CheckReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            let pr = &r.params;
            let target = match (&pr.target.q, pr.target.m) {
                (Some(q), Some(m)) => format!("lq:{q}:{m}"),
                _ => "scalar".to_string(),
            };
            vec![
                r.theorem.to_string(),
                pr.n.to_string(),
                pr.d.to_string(),
                pr.m.to_string(),
                pr.p.to_string(),
                pr.q.map(|q| q.to_string()).unwrap_or_default(),
                pr.t_grid
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                target,
                format!("{:e}", r.worst_ratio),
                r.pass.to_string(),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(id: BoundId, n: usize, d: usize) -> CheckSpec {
        CheckSpec::bound(id, n, d).with_trials(20).with_seed(3)
    }

    #[test]
    fn theorem_names_roundtrip() {
        for t in TheoremId::all() {
            assert_eq!(t.name().parse::<TheoremId>().unwrap(), t);
            assert!(!t.hypothesis().is_empty());
        }
        assert!("NOPE".parse::<TheoremId>().is_err());
    }

    #[test]
    fn parseval_and_heat_equivalence() {
        let r = run_check(&CheckSpec::new(TheoremId::Parseval, 6, 6).with_trials(20)).unwrap();
        assert!(r.pass, "{r:?}");
        let r = run_check(
            &CheckSpec::new(TheoremId::HeatEquiv, 5, 5)
                .with_trials(5)
                .with_t_grid(vec![0.1, 0.7, 2.0]),
        )
        .unwrap();
        assert!(r.pass, "{}", r.worst_ratio);
    }

    #[test]
    fn heat_lower_general_holds_on_vectors() {
        let t = TargetSpace::lq(Exponent::Finite(1.0), 3).unwrap();
        let r = run_check(&quick(BoundId::HeatLowerGeneral, 5, 3).with_target(t).with_p(1.5)).unwrap();
        assert!(r.pass && r.worst_ratio > 0.0);
    }

    #[test]
    fn character_is_tight_for_scalar_heat_bounds_at_two() {
        for id in [BoundId::HeatLowerScalar, BoundId::HeatUpperTail] {
            let s = CheckSpec::bound(id, 5, 3).witness_only();
            let r = run_check(&s).unwrap();
            assert!((r.worst_ratio - 1.0).abs() < 1e-6, "{id}: {}", r.worst_ratio);
            assert!(r.pass);
        }
    }

    #[test]
    fn markov_witness_ratio() {
        let n = 8;
        let d = 2;
        let r = run_check(&CheckSpec::bound(BoundId::MarkovD2, n, d).with_p(Exponent::Infinity).witness_only()).unwrap();
        let want = n as f64 / 2.0 * (1.0 - chebyshev_t(d, 1.0 - 2.0 / n as f64)) / (d * d) as f64;
        assert!((r.worst_ratio - want).abs() < 1e-12);
    }

    #[test]
    fn vector_witness_matches_radial_value() {
        let (n, d) = (4, 2);
        let f = vector_chebyshev_witness(n, d).unwrap();
        let lap = f.apply_multiplier(&LevelMultiplier::laplacian(n)).unwrap();
        let want = n as f64 / 2.0 * (1.0 - chebyshev_t(d, 1.0 - 2.0 / n as f64));
        for p in [Exponent::Finite(1.0), Exponent::Finite(3.0), Exponent::Infinity] {
            let r = lp_norm(&lap, p).unwrap() / lp_norm(&f, p).unwrap();
            assert!((r - want).abs() < 1e-12, "{p}");
        }
    }

    #[test]
    fn preconditions() {
        let vec_t = TargetSpace::lq(Exponent::Finite(2.0), 2).unwrap();
        assert!(run_check(&quick(BoundId::L1L2, 4, 2).with_target(vec_t)).is_err());
        assert!(run_check(&quick(BoundId::MomentScalar, 4, 2).with_p(2.0).with_q(3.0)).is_err());
        assert!(run_check(&quick(BoundId::Influence, 4, 2).with_p(1.5)).is_err());
        assert!(run_check(&quick(BoundId::MarkovD2, 4, 5)).is_err());
        assert!(run_check(&quick(BoundId::PisierLowdeg, 11, 2)).is_err());
        assert!(run_check(&quick(BoundId::MarkovHigherK, 4, 2).with_k(3)).is_err());
    }

    #[test]
    fn witness_reproduces_worst_ratio() {
        let s = quick(BoundId::MomentGeneral, 6, 3).with_p(3.0).with_q(1.5);
        let r = run_check(&s).unwrap();
        let again = reevaluate_witness(&s, &r).unwrap();
        assert!((again - r.worst_ratio).abs() <= 1e-9 * r.worst_ratio);
        let w = CheckSpec::new(TheoremId::WeisslerContraction, 4, 4).with_p(3.0).with_trials(10);
        let r = run_check(&w).unwrap();
        assert!(r.pass);
        let again = reevaluate_witness(&w, &r).unwrap();
        assert!((again - r.worst_ratio).abs() <= 1e-9 * r.worst_ratio);
    }

    #[test]
    fn measured_families_report_constants() {
        let r = run_check(&quick(BoundId::RevGrad, 6, 2).with_m(2).with_p(1.5)).unwrap();
        assert!(r.pass && r.measured_constant.unwrap() > 0.0);
        let r = run_check(&CheckSpec::new(TheoremId::EntropyRatio, 6, 2).with_trials(10)).unwrap();
        assert!(r.pass && r.measured_constant.unwrap() > 0.0);
    }

    #[test]
    fn sweep_reseeds_points() {
        let t = quick(BoundId::MarkovD2, 5, 1);
        let rs = sweep(&t, SweepAxis::D, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(rs.len(), 3);
        assert_eq!(rs[2].seed, 3 ^ 2);
        assert!(rs.iter().all(|r| r.pass));
        let rows = sweep_rows(&rs);
        assert_eq!(rows[1][2], "2");
        assert!(sweep(&t, SweepAxis::D, &[1.5]).is_err());
    }
}
