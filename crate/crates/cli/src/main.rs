//! `cube-spectral`: command-line front end.
//!
//! Exit codes: 0 on success, 2 when a proven inequality fails its check,
//! 1 on usage or I/O errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use cube_spectral::classical::beckner::moment_comp1_constant;
use cube_spectral::classical::lens::{theta_and_radius, theta_p};
use cube_spectral::classical::BoundId;
use cube_spectral::extremal::{
    estimate_operator_norm, maximize_ratio, scan_rows, sharpness_scan, trace_rows, Extremizer,
    GradMode, NRule, OptimizerConfig, RatioOperator, RatioProblem, SCAN_HEADER, TRACE_HEADER,
};
use cube_spectral::io::{
    read_any, to_json_string, write_csv, AnyFunctionFile, FunctionFile, LevelFile, RadialFile,
};
use cube_spectral::radial::{levels_to_radial, radial_to_levels};
use cube_spectral::verify::{sweep, sweep_rows, CheckReport, SweepAxis, SWEEP_HEADER};
use cube_spectral::{
    fwht, CheckSpec, Exponent, LevelMultiplier, SpectralBand, TargetSpace, TheoremId,
};

const MAX_N_ENV: &str = "CUBE_SPECTRAL_MAX_N";
const DEFAULT_MAX_N: usize = 22;

#[derive(Parser, Debug)]
#[command(name = "cube-spectral", version, about = "Spectral analysis and inequality checks on the Hamming cube")]
struct Cli {
    /// Worker threads (default: all cores). Reports do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check one inequality on random (or witness) functions.
    #[command(after_long_help = theorem_help())]
    Verify {
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a check over a range of one parameter.
    #[command(after_long_help = theorem_help())]
    Sweep {
        #[command(flatten)]
        check: CheckArgs,
        /// Parameter to vary.
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated values of the axis; point i uses seed `seed ^ i`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Search for functions maximizing ||L f||_{p_out} / ||f||_p.
    Extremal(ExtremalArgs),
    /// Chebyshev witness ratios against the proven bound.
    Scan {
        /// MARKOV_D2, GRAD_INF_ENDPOINT or MARKOV_HIGHER_K.
        #[arg(long)]
        family: String,
        /// Comma-separated degrees.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<usize>,
        /// Dimension rule: `100d2` (n = 100 d^2), `d2`, or a fixed n.
        #[arg(long, default_value = "100d2")]
        n_rule: String,
        /// Derivative order for MARKOV_HIGHER_K.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Lens and comparison constants for an exponent.
    Constants {
        /// Exponent p >= 1 (`inf` allowed).
        #[arg(long)]
        p: Exponent,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Walsh transform of a function file (Krawtchouk levels for radial files).
    Transform {
        /// Input function, spectrum, radial or level file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Map a spectrum (or level file) back to values.
        #[arg(long)]
        inverse: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Lower estimate of ||w^Δ||_{L_p -> L_p_out} on cubes of dimension 1..=n.
    Opnorm {
        /// Complex time as `re,im` (|w| <= 1).
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        w: Vec<f64>,
        #[arg(long)]
        p: Exponent,
        /// Output exponent (default: p).
        #[arg(long)]
        p_out: Option<Exponent>,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Axis {
    N,
    D,
    P,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Inequality id (see the list below).
    #[arg(long)]
    thm: String,
    /// Cube dimension.
    #[arg(long)]
    n: usize,
    /// Degree bound (or lower band edge for REV_GRAD, DELTA_HALF_RATIO, HEAT_UPPER_TAIL).
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Band width for REV_GRAD and DELTA_HALF_RATIO (levels d..=d+m).
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Exponent p >= 1 (`inf` allowed where the inequality allows it).
    #[arg(long, default_value = "2")]
    p: Exponent,
    /// Second exponent for MOMENT_GENERAL, MOMENT_SCALAR and BONAMI.
    #[arg(long)]
    q: Option<Exponent>,
    /// Comma-separated heat times.
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// `scalar` or `lq:Q:M` (functions into l_Q^M).
    #[arg(long, default_value = "scalar")]
    target: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Derivative order for MARKOV_HIGHER_K.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Exponent β for NAOS_INTERP.
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Allowed excess of the worst ratio over 1.
    #[arg(long, default_value_t = cube_spectral::verify::DEFAULT_TOLERANCE)]
    tol: f64,
    /// Evaluate the registered witness instead of random trials.
    #[arg(long)]
    witness_only: bool,
    /// Record wall-clock time in `runtime_ms` (otherwise 0).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct OptimizerArgs {
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Initial step relative to the coefficient norm.
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    #[arg(long, default_value_t = 0.98)]
    decay: f64,
    /// `analytic` or `fd:H` (central differences with step H).
    #[arg(long, default_value = "analytic")]
    grad: String,
    #[arg(long, default_value_t = 10)]
    normalize_every: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ExtremalArgs {
    /// `laplacian`, `heat:T`, `power:RE:IM`, `fractional:G`, `falling:K`,
    /// `gradient` or `heat-gradient:T`.
    #[arg(long)]
    op: String,
    #[arg(long)]
    n: usize,
    /// Band as `LOW:HIGH` (default 0:n).
    #[arg(long)]
    band: Option<String>,
    /// Shorthand for the band 0:d.
    #[arg(long, conflicts_with = "band")]
    d: Option<usize>,
    #[arg(long, default_value = "2")]
    p: Exponent,
    /// Output exponent (default: p).
    #[arg(long)]
    p_out: Option<Exponent>,
    /// Search radial functions only.
    #[arg(long)]
    radial: bool,
    /// Search complex coefficients.
    #[arg(long)]
    complex: bool,
    #[command(flatten)]
    opt: OptimizerArgs,
    #[command(flatten)]
    out: OutputArgs,
}

fn theorem_help() -> String {
    let mut s = String::from("Inequality ids:\n");
    for t in TheoremId::all() {
        s.push_str(&format!("  {:<22} {}\n", t.name(), t.hypothesis()));
    }
    s
}

fn max_n() -> Result<usize> {
    match std::env::var(MAX_N_ENV) {
        Ok(v) => v
            .parse()
            .map_err(|_| anyhow!("{MAX_N_ENV} must be a positive integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn guard_n(n: usize) -> Result<()> {
    let max = max_n()?;
    if n > max {
        bail!("n = {n} exceeds {MAX_N_ENV} = {max}");
    }
    Ok(())
}

fn parse_target(s: &str) -> Result<TargetSpace> {
    if s == "scalar" {
        return Ok(TargetSpace::Scalar);
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["lq", q, m] => {
            let q: Exponent = q.parse().map_err(|e| anyhow!("target q: {e}"))?;
            let m: usize = m.parse().context("target m")?;
            Ok(TargetSpace::lq(q, m)?)
        }
        _ => bail!("target must be `scalar` or `lq:Q:M`, got {s:?}"),
    }
}

fn build_spec(a: &CheckArgs) -> Result<CheckSpec> {
    let theorem: TheoremId = a
        .thm
        .parse()
        .map_err(|_| anyhow!("unknown theorem id {:?}; run `verify --help` for the list", a.thm))?;
    let mut spec = CheckSpec::new(theorem, a.n, a.d)
        .with_m(a.m)
        .with_p(a.p)
        .with_trials(a.trials)
        .with_seed(a.seed)
        .with_target(parse_target(&a.target)?)
        .with_k(a.k)
        .with_beta(a.beta);
    if let Some(q) = a.q {
        spec = spec.with_q(q);
    }
    if let Some(t) = &a.t {
        spec = spec.with_t_grid(t.clone());
    }
    spec.tolerance = a.tol;
    spec.witness_only = a.witness_only;
    Ok(spec)
}

fn validate(spec: &CheckSpec) -> Result<()> {
    guard_n(spec.n)?;
    spec.validate().map_err(|e| {
        anyhow!(
            "{}: {e}\n  hypothesis: {}",
            spec.theorem,
            spec.theorem.hypothesis()
        )
    })
}

fn sink(out: &OutputArgs) -> Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn emit_json<T: serde::Serialize>(out: &OutputArgs, v: &T) -> Result<()> {
    let mut w = sink(out)?;
    w.write_all(to_json_string(v)?.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn emit_csv(out: &OutputArgs, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = sink(out)?;
    write_csv(&mut w, header, rows)?;
    w.flush()?;
    Ok(())
}

fn finish_reports(reports: &[CheckReport], out: &OutputArgs, single: bool) -> Result<ExitCode> {
    match out.format {
        Format::Json if single => emit_json(out, &reports[0])?,
        Format::Json => emit_json(out, &reports)?,
        Format::Csv => emit_csv(out, &SWEEP_HEADER, &sweep_rows(reports))?,
    }
    Ok(if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn strip_timing(mut r: CheckReport, timing: bool) -> CheckReport {
    if !timing {
        r.runtime_ms = 0;
    }
    r
}

fn parse_grad(s: &str) -> Result<GradMode> {
    if s == "analytic" {
        return Ok(GradMode::Analytic);
    }
    match s.strip_prefix("fd:") {
        Some(h) => Ok(GradMode::CentralDifference {
            h: h.parse().context("finite-difference step")?,
        }),
        None => bail!("--grad must be `analytic` or `fd:H`"),
    }
}

fn optimizer_config(a: &OptimizerArgs, complex: bool) -> Result<OptimizerConfig> {
    let cfg = OptimizerConfig {
        restarts: a.restarts,
        max_iters: a.iters,
        step_init: a.step,
        step_decay: a.decay,
        grad_mode: parse_grad(&a.grad)?,
        seed: a.seed,
        normalize_every: a.normalize_every,
        complex,
        ..Default::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_op(s: &str, n: usize) -> Result<RatioOperator> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| -> Result<f64> {
        parts
            .get(i)
            .ok_or_else(|| anyhow!("operator {s:?} is missing a parameter"))?
            .parse::<f64>()
            .with_context(|| format!("operator {s:?}"))
    };
    Ok(match parts[0] {
        "laplacian" => RatioOperator::Multiplier(LevelMultiplier::laplacian(n)),
        "heat" => RatioOperator::Multiplier(LevelMultiplier::heat(n, num(1)?)?),
        "power" => RatioOperator::Multiplier(LevelMultiplier::power(
            n,
            Complex64::new(num(1)?, num(2).unwrap_or(0.0)),
        )?),
        "fractional" => RatioOperator::Multiplier(LevelMultiplier::fractional(n, num(1)?)?),
        "falling" => {
            let k = num(1)?;
            if k < 0.0 || k.fract() != 0.0 {
                bail!("falling:K needs an integer K >= 0");
            }
            RatioOperator::Multiplier(LevelMultiplier::falling_factorial(n, k as usize))
        }
        "gradient" => RatioOperator::Gradient,
        "heat-gradient" => RatioOperator::HeatGradient(num(1)?),
        other => bail!("unknown operator {other:?}"),
    })
}

fn parse_band(a: &ExtremalArgs) -> Result<SpectralBand> {
    if let Some(d) = a.d {
        return Ok(SpectralBand::degree_at_most(d, a.n)?);
    }
    match &a.band {
        None => Ok(SpectralBand::full(a.n)),
        Some(b) => {
            let (lo, hi) = b
                .split_once(':')
                .ok_or_else(|| anyhow!("--band must be LOW:HIGH"))?;
            Ok(SpectralBand::new(lo.parse()?, hi.parse()?, a.n)?)
        }
    }
}

fn run_extremal(a: &ExtremalArgs) -> Result<ExitCode> {
    if !a.radial {
        guard_n(a.n)?;
    }
    let band = parse_band(a)?;
    let mut prob = RatioProblem::new(parse_op(&a.op, a.n)?, a.p, band, a.n)
        .with_exponents(a.p, a.p_out.unwrap_or(a.p));
    if a.radial {
        prob = prob.radial();
    }
    let cfg = optimizer_config(&a.opt, a.complex)?;
    let res = maximize_ratio(&prob, &cfg)?;
    match a.out.format {
        Format::Csv => emit_csv(&a.out, &TRACE_HEADER, &trace_rows(&res.trace))?,
        Format::Json => {
            let witness = match &res.function {
                Extremizer::Dense(f) => serde_json::to_value(FunctionFile::from_function(f))?,
                Extremizer::Radial(f) => serde_json::to_value(RadialFile::from_radial(f))?,
            };
            emit_json(
                &a.out,
                &json!({
                    "op": a.op,
                    "n": a.n,
                    "band": [band.low, band.high],
                    "p": a.p,
                    "p_out": a.p_out.unwrap_or(a.p),
                    "ratio": res.ratio,
                    "best_restart": res.best_restart,
                    "aborted_restarts": res.aborted,
                    "witness": witness,
                    "trace": res.trace,
                }),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_transform(input: &PathBuf, inverse: bool, out: &OutputArgs) -> Result<ExitCode> {
    if out.format != Format::Json {
        bail!("transform writes JSON function files only");
    }
    let file = read_any(input).with_context(|| format!("reading {}", input.display()))?;
    match (file, inverse) {
        (AnyFunctionFile::Dense(f), false) => {
            guard_n(f.n)?;
            let g = f.to_function()?;
            emit_json(out, &FunctionFile::from_spectrum(&fwht(&g)))?;
        }
        (AnyFunctionFile::Dense(f), true) => {
            guard_n(f.n)?;
            emit_json(out, &FunctionFile::from_function(&f.to_function()?))?;
        }
        (AnyFunctionFile::Radial(r), false) => {
            emit_json(out, &LevelFile::from_levels(&radial_to_levels(&r.to_radial()?)))?;
        }
        (AnyFunctionFile::Levels(l), true) => {
            emit_json(out, &RadialFile::from_radial(&levels_to_radial(&l.to_levels()?)))?;
        }
        (AnyFunctionFile::Radial(_), true) => bail!("--inverse expects a level file, got a radial function"),
        (AnyFunctionFile::Levels(_), false) => bail!("a level file is already a spectrum; use --inverse"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_constants(p: Exponent, out: &OutputArgs) -> Result<ExitCode> {
    let theta = theta_p(p)?;
    let r = match p {
        Exponent::Finite(v) if v > 1.0 => Some(theta_and_radius(v)?.1),
        _ => None,
    };
    let mc = moment_comp1_constant()?;
    let v = json!({
        "p": p,
        "theta_p": theta,
        "r_p": r,
        "momentComp1Constant": mc.value,
        "grid": {
            "p_min": mc.p_min,
            "p_max": mc.p_max,
            "points": mc.grid_points,
            "argmin_p": mc.argmin_p,
        },
    });
    match out.format {
        Format::Json => emit_json(out, &v)?,
        Format::Csv => {
            let f = |x: Option<f64>| x.map(|x| format!("{x:e}")).unwrap_or_default();
            emit_csv(
                out,
                &["p", "theta_p", "r_p", "momentComp1Constant"],
                &[vec![p.to_string(), f(Some(theta)), f(r), f(Some(mc.value))]],
            )?
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { check, out } => {
            let spec = build_spec(&check)?;
            validate(&spec)?;
            let r = strip_timing(cube_spectral::run_check(&spec)?, check.timing);
            finish_reports(&[r], &out, true)
        }
        Command::Sweep {
            check,
            axis,
            values,
            out,
        } => {
            let spec = build_spec(&check)?;
            let axis = match axis {
                Axis::N => SweepAxis::N,
                Axis::D => SweepAxis::D,
                Axis::P => SweepAxis::P,
                Axis::T => SweepAxis::T,
            };
            // Validate every point before running any.
            for (i, &v) in values.iter().enumerate() {
                let mut s = spec.clone();
                s.seed ^= i as u64;
                match axis {
                    SweepAxis::N => s.n = v as usize,
                    SweepAxis::D => s.d = v as usize,
                    SweepAxis::P => s.p = Exponent::from(v),
                    SweepAxis::T => s.t_grid = vec![v],
                }
                if matches!(axis, SweepAxis::N | SweepAxis::D) && (v < 0.0 || v.fract() != 0.0) {
                    bail!("sweep value {v} is not a non-negative integer");
                }
                validate(&s)?;
            }
            let reports: Vec<CheckReport> = sweep(&spec, axis, &values)?
                .into_iter()
                .map(|r| strip_timing(r, check.timing))
                .collect();
            finish_reports(&reports, &out, false)
        }
        Command::Extremal(a) => run_extremal(&a),
        Command::Scan {
            family,
            d,
            n_rule,
            k,
            out,
        } => {
            let fam: BoundId = family
                .parse()
                .map_err(|_| anyhow!("unknown family {family:?}"))?;
            let rule: NRule = n_rule.parse()?;
            let rows = sharpness_scan(fam, &d, rule, k)?;
            match out.format {
                Format::Csv => emit_csv(&out, &SCAN_HEADER, &scan_rows(&rows))?,
                Format::Json => emit_json(&out, &json!({ "family": fam, "n_rule": rule.to_string(), "rows": rows }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Constants { p, out } => run_constants(p, &out),
        Command::Transform {
            input,
            inverse,
            out,
        } => run_transform(&input, inverse, &out),
        Command::Opnorm {
            w,
            p,
            p_out,
            n,
            opt,
            out,
        } => {
            guard_n(n)?;
            if w.is_empty() || w.len() > 2 {
                bail!("--w takes `re` or `re,im`");
            }
            let w = Complex64::new(w[0], w.get(1).copied().unwrap_or(0.0));
            let cfg = optimizer_config(&opt, true)?;
            let est = estimate_operator_norm(w, p, p_out.unwrap_or(p), n, &cfg)?;
            match out.format {
                Format::Json => emit_json(&out, &est)?,
                Format::Csv => emit_csv(
                    &out,
                    &["n", "estimate"],
                    &est.by_n
                        .iter()
                        .map(|(m, e)| vec![m.to_string(), format!("{e:e}")])
                        .collect::<Vec<_>>(),
                )?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let pool = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(1);
        }
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
