//! Search for functions that make an operator ratio large.
//!
//! The objective is `log ||L f||_{p_out} - log ||f||_{p_in}` over coefficient
//! vectors supported on a spectral band, either on the full cube (one
//! coefficient per subset) or on radial functions (one amplitude per level).
//! Ascent is projected gradient with backtracking: a step that would lower the
//! objective is halved until it does not, so each restart's trace is
//! nondecreasing. Results are lower bounds on the true supremum.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::bounds::{bound_value, BoundId, BoundParams};
use crate::classical::chebyshev::{chebyshev_deriv_at_one, chebyshev_t};
use crate::cube::{check_n, fwht_in_place, level, rng_for, CubeFunction, SpectralBand, TargetSpace};
use crate::error::{invalid, Error, Result};
use crate::exponent::Exponent;
use crate::numeric::ln_binomials;
use crate::operators::LevelMultiplier;
use crate::radial::{
    levels_to_radial, radial_gradient_norm, radial_laplacian, radial_lp_norm, radial_to_levels,
    LevelSpectrum, RadialFunction,
};

/// Exponent used in place of `p = inf` while optimizing.
pub const INF_SURROGATE: f64 = 64.0;
/// Largest `n` for the dense search.
pub const DENSE_MAX_N: usize = 16;

/// The map `L` in the ratio `||L f|| / ||f||`.
#[derive(Clone, Debug, PartialEq)]
pub enum RatioOperator {
    Multiplier(LevelMultiplier),
    /// `|∇f|`, dense scalar functions only.
    Gradient,
    /// `|∇ e^{-tΔ} f|`, dense scalar functions only.
    HeatGradient(f64),
}

/// Which functions are searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchSpace {
    /// Every scalar function on `{-1,1}^n`, `n <= 16`.
    Dense,
    /// Functions of `e_1 + ... + e_n`.
    Radial,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GradMode {
    Analytic,
    CentralDifference { h: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial step, relative to the coefficient norm.
    pub step_init: f64,
    /// Multiplier applied to the step after each accepted iteration.
    pub step_decay: f64,
    pub grad_mode: GradMode,
    pub seed: u64,
    /// Rescale to `||f||_{p_in} = 1` every this many iterations.
    pub normalize_every: usize,
    /// Search complex coefficients instead of real ones.
    pub complex: bool,
    /// Exponents tried in turn for `p = inf`, each warm-started from the last.
    pub inf_schedule: Vec<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 4,
            max_iters: 200,
            step_init: 0.5,
            step_decay: 0.98,
            grad_mode: GradMode::Analytic,
            seed: 0,
            normalize_every: 10,
            complex: false,
            inf_schedule: vec![INF_SURROGATE, 256.0, 1024.0, 4096.0],
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(invalid("restarts must be >= 1"));
        }
        if !(self.step_init > 0.0 && self.step_decay > 0.0 && self.step_decay <= 1.0) {
            return Err(invalid("need step_init > 0 and 0 < step_decay <= 1"));
        }
        if let GradMode::CentralDifference { h } = self.grad_mode {
            if !(h > 0.0) {
                return Err(invalid("finite-difference step must be > 0"));
            }
        }
        if self.normalize_every == 0 {
            return Err(invalid("normalize_every must be >= 1"));
        }
        if self.inf_schedule.is_empty() || self.inf_schedule.iter().any(|&p| !(p >= 1.0 && p.is_finite())) {
            return Err(invalid("inf_schedule needs finite exponents >= 1"));
        }
        Ok(())
    }
}

/// A ratio to maximize.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioProblem {
    pub op: RatioOperator,
    pub p_in: Exponent,
    pub p_out: Exponent,
    pub band: SpectralBand,
    pub n: usize,
    pub space: SearchSpace,
}

impl RatioProblem {
    pub fn new(op: RatioOperator, p: Exponent, band: SpectralBand, n: usize) -> Self {
        RatioProblem {
            op,
            p_in: p,
            p_out: p,
            band,
            n,
            space: SearchSpace::Dense,
        }
    }

    pub fn radial(mut self) -> Self {
        self.space = SearchSpace::Radial;
        self
    }

    pub fn with_exponents(mut self, p_in: Exponent, p_out: Exponent) -> Self {
        self.p_in = p_in;
        self.p_out = p_out;
        self
    }

    fn validate(&self) -> Result<()> {
        self.p_in.require_at_least_one()?;
        self.p_out.require_at_least_one()?;
        if self.band.high > self.n || self.band.low > self.band.high {
            return Err(Error::InvalidBand {
                low: self.band.low,
                high: self.band.high,
                n: self.n,
            });
        }
        match self.space {
            SearchSpace::Dense => {
                check_n(self.n)?;
                if self.n > DENSE_MAX_N {
                    return Err(Error::DimensionTooLarge {
                        n: self.n,
                        max: DENSE_MAX_N,
                    });
                }
            }
            SearchSpace::Radial => {
                if !matches!(self.op, RatioOperator::Multiplier(_)) {
                    return Err(invalid("radial search supports level multipliers only"));
                }
            }
        }
        if let RatioOperator::Multiplier(m) = &self.op {
            if m.n() != self.n {
                return Err(invalid(format!(
                    "multiplier is for n = {}, problem has n = {}",
                    m.n(),
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Level of each coefficient slot.
    fn levels(&self) -> Vec<usize> {
        match self.space {
            SearchSpace::Dense => (0..1usize << self.n).map(level).collect(),
            SearchSpace::Radial => (0..=self.n).collect(),
        }
    }
}

/// Evaluated function: pointwise values with log weights.
struct Sampled {
    /// `comp` entries per point.
    vals: Vec<Complex64>,
    comp: usize,
}

/// `ln ||g||_p` and, optionally, `G` with `d ln||g|| = Re sum_x w_x <G_x, dg_x>`.
fn ln_norm_grad(
    s: &Sampled,
    lw: &dyn Fn(usize) -> f64,
    p: Option<f64>,
    want: bool,
) -> (f64, Option<Vec<Complex64>>) {
    let r: Vec<f64> = s
        .vals
        .chunks(s.comp)
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mx = r.iter().fold(0.0f64, |a, &b| a.max(b));
    if !(mx > 0.0) || !mx.is_finite() {
        return (if mx == 0.0 { f64::NEG_INFINITY } else { f64::NAN }, None);
    }
    let p = match p {
        None => return (mx.ln(), None),
        Some(p) => p,
    };
    let terms: Vec<f64> = r
        .iter()
        .enumerate()
        .map(|(x, &ri)| {
            if ri == 0.0 {
                f64::NEG_INFINITY
            } else {
                lw(x) + p * (ri / mx).ln()
            }
        })
        .collect();
    let top = terms.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let ln_s = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
    let ln_norm = mx.ln() + ln_s / p;
    if !want {
        return (ln_norm, None);
    }
    let mut g = vec![Complex64::new(0.0, 0.0); s.vals.len()];
    for (x, &ri) in r.iter().enumerate() {
        if ri == 0.0 {
            continue;
        }
        let c = ((p - 2.0) * (ri / mx).ln() - ln_s).exp() / (mx * mx);
        for k in 0..s.comp {
            g[x * s.comp + k] = s.vals[x * s.comp + k] * c;
        }
    }
    (ln_norm, Some(g))
}

/// Objective evaluator bound to one problem and one pair of finite exponents.
struct Objective<'a> {
    prob: &'a RatioProblem,
    levels: Vec<usize>,
    mult: Option<Vec<Complex64>>,
    lw_radial: Vec<f64>,
    // Radial search runs over coefficients on `T_m(1 - 2j/n)` projected to
    // the band, `m` in the band: each has sup norm at most 1, unlike the
    // level amplitudes, where the extreme layers dominate and ascent stalls.
    radial_basis: Vec<Vec<Complex64>>,
}

impl<'a> Objective<'a> {
    fn new(prob: &'a RatioProblem) -> Self {
        let n = prob.n;
        let mult = match &prob.op {
            RatioOperator::Multiplier(m) => Some(m.values().to_vec()),
            RatioOperator::HeatGradient(t) => {
                Some((0..=n).map(|k| Complex64::new((-t * k as f64).exp(), 0.0)).collect())
            }
            RatioOperator::Gradient => None,
        };
        let (lw_radial, radial_basis) = match prob.space {
            SearchSpace::Radial => (
                ln_binomials(n).iter().map(|l| l - n as f64 * LN_2).collect(),
                chebyshev_basis(n, prob.band),
            ),
            SearchSpace::Dense => (Vec::new(), Vec::new()),
        };
        Objective {
            prob,
            levels: prob.levels(),
            mult,
            lw_radial,
            radial_basis,
        }
    }

    fn param_len(&self) -> usize {
        match self.prob.space {
            SearchSpace::Dense => self.levels.len(),
            SearchSpace::Radial => self.radial_basis.len(),
        }
    }

    fn param_in_band(&self, i: usize) -> bool {
        match self.prob.space {
            SearchSpace::Dense => self.prob.band.contains(self.levels[i]),
            SearchSpace::Radial => true,
        }
    }

    /// Search parameters to spectral coefficients.
    fn coeffs(&self, x: &[Complex64]) -> Vec<Complex64> {
        match self.prob.space {
            SearchSpace::Dense => x.to_vec(),
            SearchSpace::Radial => {
                let mut a = vec![Complex64::new(0.0, 0.0); self.prob.n + 1];
                for (col, b) in self.radial_basis.iter().zip(x) {
                    for (ak, ck) in a.iter_mut().zip(col) {
                        *ak += ck * b;
                    }
                }
                a
            }
        }
    }

    fn coeffs_adjoint(&self, g: Vec<Complex64>) -> Vec<Complex64> {
        match self.prob.space {
            SearchSpace::Dense => g,
            SearchSpace::Radial => self
                .radial_basis
                .iter()
                .map(|col| col.iter().zip(&g).map(|(c, z)| c.conj() * z).sum())
                .collect(),
        }
    }

    fn values(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.synth(&self.coeffs(x))
    }

    fn eval(&self, x: &[Complex64], p_in: Option<f64>, p_out: Option<f64>, want: bool) -> (f64, Option<Vec<Complex64>>) {
        let (v, g) = self.eval_coeffs(&self.coeffs(x), p_in, p_out, want);
        (v, g.map(|g| self.coeffs_adjoint(g)))
    }

    fn project(&self, c: &mut [Complex64]) {
        for (x, l) in c.iter_mut().zip(&self.levels) {
            if !self.prob.band.contains(*l) {
                *x = Complex64::new(0.0, 0.0);
            }
        }
    }

    fn lw(&self) -> Box<dyn Fn(usize) -> f64 + '_> {
        match self.prob.space {
            SearchSpace::Dense => {
                let w = -(self.prob.n as f64) * LN_2;
                Box::new(move |_| w)
            }
            SearchSpace::Radial => Box::new(move |j| self.lw_radial[j]),
        }
    }

    /// Coefficients to values.
    fn synth(&self, c: &[Complex64]) -> Vec<Complex64> {
        match self.prob.space {
            SearchSpace::Dense => {
                let mut v = c.to_vec();
                fwht_in_place(&mut v, 1);
                v
            }
            SearchSpace::Radial => {
                let s = LevelSpectrum::from_amplitudes(self.prob.n, c.to_vec()).expect("n + 1 levels");
                levels_to_radial(&s).phi().to_vec()
            }
        }
    }

    /// Adjoint of [`Self::synth`] for the weighted inner product.
    fn adjoint(&self, g: &[Complex64]) -> Vec<Complex64> {
        match self.prob.space {
            SearchSpace::Dense => {
                let mut v = g.to_vec();
                fwht_in_place(&mut v, 1);
                let scale = 1.0 / v.len() as f64;
                v.iter_mut().for_each(|z| *z *= scale);
                v
            }
            SearchSpace::Radial => {
                let f = RadialFunction::new(self.prob.n, g.to_vec()).expect("n + 1 layers");
                radial_to_levels(&f).amplitudes().to_vec()
            }
        }
    }

    fn mult_coeffs(&self, c: &[Complex64], conj: bool) -> Vec<Complex64> {
        let m = self.mult.as_ref().expect("multiplier");
        c.iter()
            .zip(&self.levels)
            .map(|(z, &l)| if conj { z * m[l].conj() } else { z * m[l] })
            .collect()
    }

    /// Objective and (optionally) its gradient with respect to the
    /// spectral coefficients `c`.
    fn eval_coeffs(&self, c: &[Complex64], p_in: Option<f64>, p_out: Option<f64>, want: bool) -> (f64, Option<Vec<Complex64>>) {
        let n = self.prob.n;
        let f = Sampled {
            vals: self.synth(c),
            comp: 1,
        };
        let lw = self.lw();
        let (ln_in, g_in) = ln_norm_grad(&f, &*lw, p_in, want);
        let (out_vals, comp, coord_masks) = match self.prob.op {
            RatioOperator::Gradient | RatioOperator::HeatGradient(_) => {
                let base = match self.mult {
                    Some(_) => self.mult_coeffs(c, false),
                    None => c.to_vec(),
                };
                let size = 1usize << n;
                let mut vals = vec![Complex64::new(0.0, 0.0); size * n];
                for i in 0..n {
                    let mut ci: Vec<Complex64> = (0..size)
                        .map(|a| if a >> i & 1 == 1 { base[a] } else { Complex64::new(0.0, 0.0) })
                        .collect();
                    fwht_in_place(&mut ci, 1);
                    for (x, z) in ci.into_iter().enumerate() {
                        vals[x * n + i] = z;
                    }
                }
                (vals, n, true)
            }
            RatioOperator::Multiplier(_) => (self.synth(&self.mult_coeffs(c, false)), 1, false),
        };
        let out = Sampled { vals: out_vals, comp };
        let (ln_out, g_out) = ln_norm_grad(&out, &*lw, p_out, want);
        let value = ln_out - ln_in;
        if !want {
            return (value, None);
        }
        let (g_in, g_out) = match (g_in, g_out) {
            (Some(a), Some(b)) => (a, b),
            _ => return (value, None),
        };
        let d_in = self.adjoint(&g_in);
        let d_out = if coord_masks {
            let size = 1usize << n;
            let mut acc = vec![Complex64::new(0.0, 0.0); size];
            for i in 0..n {
                let gi: Vec<Complex64> = (0..size).map(|x| g_out[x * n + i]).collect();
                let ai = self.adjoint(&gi);
                for (a, z) in ai.into_iter().enumerate() {
                    if a >> i & 1 == 1 {
                        acc[a] += z;
                    }
                }
            }
            match self.mult {
                Some(_) => self.mult_coeffs(&acc, true),
                None => acc,
            }
        } else {
            self.mult_coeffs(&self.adjoint(&g_out), true)
        };
        let mut grad: Vec<Complex64> = d_out.iter().zip(&d_in).map(|(a, b)| a - b).collect();
        self.project(&mut grad);
        (value, Some(grad))
    }
}

/// Amplitudes of `T_m(1 - 2j/n)` restricted to the band, for `m` in the band.
fn chebyshev_basis(n: usize, band: SpectralBand) -> Vec<Vec<Complex64>> {
    (band.low..=band.high)
        .map(|m| {
            let f = RadialFunction::from_fn(n, |j| {
                Complex64::new(chebyshev_t(m, 1.0 - 2.0 * j as f64 / n as f64), 0.0)
            });
            let mut a = radial_to_levels(&f).amplitudes().to_vec();
            for (k, z) in a.iter_mut().enumerate() {
                if !band.contains(k) {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
            a
        })
        .collect()
}

fn finite_or_surrogate(p: Exponent, sur: f64) -> Option<f64> {
    match p {
        Exponent::Finite(p) => Some(p),
        Exponent::Infinity => Some(sur),
    }
}

fn exact(p: Exponent) -> Option<f64> {
    match p {
        Exponent::Finite(p) => Some(p),
        Exponent::Infinity => None,
    }
}

fn l2(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// One row of the optimization trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub restart: usize,
    pub iter: usize,
    /// Ratio at the optimized (possibly surrogate) exponents.
    pub ratio: f64,
    pub step: f64,
}

/// The best function found.
#[derive(Clone, Debug, PartialEq)]
pub enum Extremizer {
    Dense(CubeFunction),
    Radial(RadialFunction),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximizeResult {
    /// Ratio at the requested exponents.
    pub ratio: f64,
    pub best_restart: usize,
    /// Band coefficients (Walsh coefficients or level amplitudes).
    pub coefficients: Vec<Complex64>,
    pub function: Extremizer,
    pub trace: Vec<TracePoint>,
    /// Restarts stopped by a non-finite objective.
    pub aborted: Vec<usize>,
}

struct RestartOutcome {
    coeffs: Vec<Complex64>,
    ratio: f64,
    trace: Vec<TracePoint>,
    aborted: bool,
}

fn central_difference(
    obj: &Objective,
    c: &[Complex64],
    p_in: Option<f64>,
    p_out: Option<f64>,
    h: f64,
    complex: bool,
) -> Vec<Complex64> {
    let mut g = vec![Complex64::new(0.0, 0.0); c.len()];
    for i in 0..c.len() {
        if !obj.param_in_band(i) {
            continue;
        }
        let dirs: &[Complex64] = if complex {
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]
        } else {
            &[Complex64::new(1.0, 0.0)]
        };
        for (k, e) in dirs.iter().enumerate() {
            let mut a = c.to_vec();
            let mut b = c.to_vec();
            a[i] += e * h;
            b[i] -= e * h;
            let d = (obj.eval(&a, p_in, p_out, false).0 - obj.eval(&b, p_in, p_out, false).0) / (2.0 * h);
            if k == 0 {
                g[i].re = d;
            } else {
                g[i].im = d;
            }
        }
    }
    g
}

fn ascend(
    obj: &Objective,
    cfg: &OptimizerConfig,
    restart: usize,
    mut c: Vec<Complex64>,
    p_in: Option<f64>,
    p_out: Option<f64>,
    trace: &mut Vec<TracePoint>,
) -> (Vec<Complex64>, bool) {
    let mut step = cfg.step_init;
    let (mut val, _) = obj.eval(&c, p_in, p_out, false);
    if !val.is_finite() {
        return (c, true);
    }
    for iter in 0..cfg.max_iters {
        let grad = match cfg.grad_mode {
            GradMode::Analytic => obj.eval(&c, p_in, p_out, true).1,
            GradMode::CentralDifference { h } => Some(central_difference(obj, &c, p_in, p_out, h, cfg.complex)),
        };
        let mut grad = match grad {
            Some(g) => g,
            None => return (c, true),
        };
        if !cfg.complex {
            grad.iter_mut().for_each(|z| z.im = 0.0);
        }
        let gn = l2(&grad);
        if !gn.is_finite() {
            return (c, true);
        }
        if gn == 0.0 {
            break;
        }
        let scale = l2(&c) / gn;
        // Backtracking: halve until the objective does not decrease.
        let mut accepted = false;
        while step > 1e-14 {
            let cand: Vec<Complex64> = c.iter().zip(&grad).map(|(x, g)| x + g * (step * scale)).collect();
            let (v, _) = obj.eval(&cand, p_in, p_out, false);
            if v.is_finite() && v >= val {
                c = cand;
                val = v;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        trace.push(TracePoint {
            restart,
            iter,
            ratio: val.exp(),
            step,
        });
        if !accepted {
            break;
        }
        step *= cfg.step_decay;
        if (iter + 1) % cfg.normalize_every == 0 {
            let f = Sampled {
                vals: obj.values(&c),
                comp: 1,
            };
            let (ln, _) = ln_norm_grad(&f, &*obj.lw(), p_in, false);
            if ln.is_finite() {
                let s = (-ln).exp();
                c.iter_mut().for_each(|z| *z *= s);
            }
        }
    }
    (c, false)
}

fn run_restart(
    prob: &RatioProblem,
    obj: &Objective,
    cfg: &OptimizerConfig,
    restart: usize,
    init: Vec<Complex64>,
) -> RestartOutcome {
    let mut trace = Vec::new();
    let mut c = init;
    if prob.space == SearchSpace::Dense {
        obj.project(&mut c);
    }
    let needs_schedule = prob.p_in.is_infinite() || prob.p_out.is_infinite();
    let schedule: Vec<f64> = if needs_schedule {
        cfg.inf_schedule.clone()
    } else {
        vec![INF_SURROGATE]
    };
    for sur in schedule {
        let (next, aborted) = ascend(
            obj,
            cfg,
            restart,
            c,
            finite_or_surrogate(prob.p_in, sur),
            finite_or_surrogate(prob.p_out, sur),
            &mut trace,
        );
        c = next;
        if aborted {
            return RestartOutcome {
                coeffs: c,
                ratio: f64::NAN,
                trace,
                aborted: true,
            };
        }
    }
    let ratio = obj.eval(&c, exact(prob.p_in), exact(prob.p_out), false).0.exp();
    RestartOutcome {
        coeffs: c,
        ratio,
        aborted: !ratio.is_finite(),
        trace,
    }
}

fn random_init(len: usize, cfg: &OptimizerConfig, restart: usize) -> Vec<Complex64> {
    let mut rng = rng_for(cfg.seed, restart as u64);
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = if cfg.complex {
                StandardNormal.sample(&mut rng)
            } else {
                0.0
            };
            Complex64::new(re, im)
        })
        .collect()
}

/// Maximizes `||L f||_{p_out} / ||f||_{p_in}` over the band.
pub fn maximize_ratio(prob: &RatioProblem, cfg: &OptimizerConfig) -> Result<MaximizeResult> {
    maximize_ratio_from(prob, cfg, None)
}

/// As [`maximize_ratio`]; restart 0 starts from `warm` when given.
pub fn maximize_ratio_from(
    prob: &RatioProblem,
    cfg: &OptimizerConfig,
    warm: Option<Vec<Complex64>>,
) -> Result<MaximizeResult> {
    prob.validate()?;
    cfg.validate()?;
    let obj = Objective::new(prob);
    let len = obj.param_len();
    if let Some(w) = &warm {
        if w.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: w.len(),
            });
        }
    }
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let init = match (&warm, r) {
                (Some(w), 0) => w.clone(),
                _ => random_init(len, cfg, r),
            };
            run_restart(prob, &obj, cfg, r, init)
        })
        .collect();
    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if o.aborted {
            continue;
        }
        match best {
            Some(b) if outcomes[b].ratio >= o.ratio => {}
            _ => best = Some(i),
        }
    }
    let aborted: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.aborted)
        .map(|(i, _)| i)
        .collect();
    let b = best.ok_or_else(|| Error::Degenerate("every restart hit a non-finite objective".into()))?;
    let trace = outcomes.iter().flat_map(|o| o.trace.iter().copied()).collect();
    let coeffs = outcomes[b].coeffs.clone();
    let vals = obj.values(&coeffs);
    let function = match prob.space {
        SearchSpace::Dense => Extremizer::Dense(CubeFunction::new(prob.n, TargetSpace::Scalar, vals)?),
        SearchSpace::Radial => Extremizer::Radial(RadialFunction::new(prob.n, vals)?),
    };
    Ok(MaximizeResult {
        ratio: outcomes[b].ratio,
        best_restart: b,
        coefficients: match prob.space {
            SearchSpace::Dense => coeffs,
            SearchSpace::Radial => obj.coeffs(&coeffs),
        },
        function,
        trace,
        aborted,
    })
}

/// Lower estimates of `||w^Δ||_{L_p_in -> L_p_out}` for `m = 1..=n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorNormEstimate {
    pub w: [f64; 2],
    pub p_in: Exponent,
    pub p_out: Exponent,
    /// `(m, estimate)`; nondecreasing in `m` up to rounding.
    pub by_n: Vec<(usize, f64)>,
    pub estimate: f64,
}

/// Estimates `sup_f ||w^Δ f||_{p_out} / ||f||_{p_in}` on cubes of dimension
/// `1..=n`, warm-starting each dimension from the previous best (a function
/// of fewer coordinates keeps its ratio), so the estimates do not decrease.
pub fn estimate_operator_norm(
    w: Complex64,
    p_in: Exponent,
    p_out: Exponent,
    n: usize,
    cfg: &OptimizerConfig,
) -> Result<OperatorNormEstimate> {
    if !(w.norm() <= 1.0) {
        return Err(Error::OutsideDomain(format!("|w| = {} > 1", w.norm())));
    }
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut cfg = cfg.clone();
    cfg.complex = true;
    let mut by_n = Vec::with_capacity(n);
    let mut warm: Option<Vec<Complex64>> = None;
    for m in 1..=n {
        let prob = RatioProblem::new(
            RatioOperator::Multiplier(LevelMultiplier::power(m, w)?),
            p_in,
            SpectralBand::full(m),
            m,
        )
        .with_exponents(p_in, p_out);
        let start = warm.take().map(|prev: Vec<Complex64>| {
            let mut c = prev;
            c.resize(1 << m, Complex64::new(0.0, 0.0));
            c
        });
        let res = maximize_ratio_from(&prob, &cfg, start)?;
        by_n.push((m, res.ratio));
        warm = Some(res.coefficients);
    }
    let estimate = by_n.iter().fold(0.0f64, |a, &(_, r)| a.max(r));
    Ok(OperatorNormEstimate {
        w: [w.re, w.im],
        p_in,
        p_out,
        by_n,
        estimate,
    })
}

/// How the scan picks `n` from `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NRule {
    /// `n = c * d^2`.
    TimesDSquared(usize),
    Fixed(usize),
}

impl NRule {
    pub fn n_for(self, d: usize) -> usize {
        match self {
            NRule::TimesDSquared(c) => (c * d * d).max(1),
            NRule::Fixed(n) => n,
        }
    }
}

impl FromStr for NRule {
    type Err = Error;

    /// `"100d2"`, `"d2"` or a plain integer.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || invalid(format!("bad n rule {s:?} (use e.g. 100d2, d2, 64)"));
        if let Some(c) = s.strip_suffix("d2") {
            let c = if c.is_empty() { 1 } else { c.parse().map_err(|_| bad())? };
            Ok(NRule::TimesDSquared(c))
        } else {
            s.parse().map(NRule::Fixed).map_err(|_| bad())
        }
    }
}

impl fmt::Display for NRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NRule::TimesDSquared(1) => write!(f, "d2"),
            NRule::TimesDSquared(c) => write!(f, "{c}d2"),
            NRule::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub d: usize,
    pub n: usize,
    pub ratio: f64,
    pub bound: f64,
    pub ratio_over_bound: f64,
}

pub const SCAN_HEADER: [&str; 5] = ["d", "n", "ratio", "bound", "ratio_over_bound"];

/// Families [`sharpness_scan`] knows a radial witness for.
pub const SCAN_FAMILIES: [BoundId; 3] = [
    BoundId::MarkovD2,
    BoundId::GradInfEndpoint,
    BoundId::MarkovHigherK,
];

/// `sup`-norm ratio of the Chebyshev witness `T_d((e_1 + ... + e_n)/n)`
/// under the family's operator, computed layer by layer in `O(k n)`.
pub fn radial_witness_ratio(family: BoundId, n: usize, d: usize, k: usize) -> Result<f64> {
    let f = RadialFunction::chebyshev_witness(n, d)?;
    let inf = Exponent::Infinity;
    let num = match family {
        BoundId::MarkovD2 => radial_lp_norm(&radial_laplacian(&f), inf)?,
        BoundId::GradInfEndpoint => radial_lp_norm(&radial_gradient_norm(&f), inf)?,
        BoundId::MarkovHigherK => {
            if k == 0 {
                return Err(invalid("k must be >= 1"));
            }
            // Δ(Δ-1)...(Δ-k+1), one factor at a time.
            let mut g = f.clone();
            for i in 0..k {
                let lap = radial_laplacian(&g);
                let phi = lap.phi().iter().zip(g.phi()).map(|(a, b)| a - b * i as f64).collect();
                g = RadialFunction::new(n, phi)?;
            }
            radial_lp_norm(&g, inf)?
        }
        other => return Err(invalid(format!("no radial witness registered for {other}"))),
    };
    Ok(num / radial_lp_norm(&f, inf)?)
}

/// Ratio of the Chebyshev witness against the proven bound for each `d`.
pub fn sharpness_scan(family: BoundId, d_values: &[usize], rule: NRule, k: usize) -> Result<Vec<ScanRow>> {
    d_values
        .iter()
        .map(|&d| {
            let n = rule.n_for(d);
            let ratio = radial_witness_ratio(family, n, d, k)?;
            let bound = match family {
                BoundId::MarkovHigherK => chebyshev_deriv_at_one(d, k),
                _ => bound_value(family, &BoundParams::degree(d))?,
            };
            Ok(ScanRow {
                d,
                n,
                ratio,
                bound,
                ratio_over_bound: ratio / bound,
            })
        })
        .collect()
}

pub fn scan_rows(rows: &[ScanRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.d.to_string(),
                r.n.to_string(),
                format!("{:e}", r.ratio),
                format!("{:e}", r.bound),
                format!("{:e}", r.ratio_over_bound),
            ]
        })
        .collect()
}

pub const TRACE_HEADER: [&str; 3] = ["iter", "ratio", "step"];

pub fn trace_rows(trace: &[TracePoint]) -> Vec<Vec<String>> {
    trace
        .iter()
        .map(|t| vec![t.iter.to_string(), format!("{:e}", t.ratio), format!("{:e}", t.step)])
        .collect()
}
