//! The `nzflow` command line: subcommands that run the library's checks and
//! write reproducible JSON run manifests.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::conditioning as cond;
use crate::error::{Error, Result};
use crate::landscape as land;
use crate::moments::{self, Arithmetic};
use crate::numbers::{format_rational, rational_to_f64, rational_to_log};
use crate::orientation::{self as orient, FindOutcome};
use crate::pairing::{self, Pairing};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nzflow", version, about = "Valid orientations of random 5-regular graphs: counts, moments and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the JSON run manifest here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output on stdout: the JSON manifest, or a CSV table.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a uniform pairing (or simple graph) and print it.
    Sample(SampleArgs),
    /// Find a valid orientation of a pairing read from JSON.
    Orient(OrientArgs),
    /// Count valid orientations exactly: one pairing, all pairings at n=2, or a Monte Carlo mean.
    Count(CountArgs),
    /// First moment, second moment or their ratio.
    ///
    /// CSV columns: n,mode,which,value_log10,value,target,rel_err
    Moments(MomentsArgs),
    /// Checks on the exponent function f and the matrix B.
    Landscape(LandscapeArgs),
    /// Cycle-count constants, the variance series and Monte Carlo joint moments.
    ///
    /// CSV columns: k,lambda,mu,delta,mc_estimate,mc_stderr,finite_n
    Conditioning(ConditioningArgs),
    /// Merge run manifests into one verification report.
    ///
    /// CSV columns: source,check,target,value,residual,tolerance,pass
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    /// Reject until the multigraph is simple.
    #[arg(long)]
    pub simple: bool,
    #[arg(long, default_value_t = 100_000)]
    pub max_attempts: usize,
}

#[derive(Debug, Args)]
pub struct OrientArgs {
    /// Pairing JSON, or a manifest from `sample`.
    pub input: PathBuf,
    #[arg(long, default_value_t = orient::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Also count valid orientations exactly.
    #[arg(long)]
    pub count: bool,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Enumerate every pairing (n = 2 only) and compare with the exact moments.
    #[arg(long)]
    pub all_pairings: bool,
    /// Count one pairing read from JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Monte Carlo mean of Y over this many pairings.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Largest number of pairs counted exactly.
    #[arg(long, default_value_t = orient::DEFAULT_COUNT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    First,
    Second,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Log,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// One or more vertex counts.
    #[arg(long, required = true, num_args = 1..)]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Log)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Which::Ratio)]
    pub which: Which,
    /// Turn the comparison with the asymptotic target into a check with this relative tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LandscapeCheck {
    Grad,
    Hessian,
    Spectrum,
    Maximize,
    Boundary,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    /// Checks to run (default: all).
    #[arg(long, value_enum, num_args = 1..)]
    pub check: Vec<LandscapeCheck>,
    #[arg(long, default_value_t = 100)]
    pub starts: usize,
    /// Uniform samples of J for the global scan.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Random points for the gradient check.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct ConditioningArgs {
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
    /// Check the variance series against 5/sqrt(21).
    #[arg(long)]
    pub series: bool,
    /// Estimate E(Y X_k)/E Y by simulation.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub manifests: Vec<PathBuf>,
}

/// How a check's pass flag follows from its numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `|value - target| <= tolerance`
    Abs,
    /// `|value / target - 1| <= tolerance`
    Rel,
    /// `value <= target + tolerance`
    AtMost,
    /// `value < target`
    Below,
    /// `target / tolerance <= value <= target * tolerance`
    Factor,
    /// exact rational equality; `value` and `target` are float views
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub target: f64,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, kind: CheckKind, target: f64, value: f64, tolerance: f64) -> Self {
        let mut c = Check {
            name: name.into(),
            kind,
            target,
            value,
            tolerance,
            pass: false,
            note: None,
        };
        c.pass = c.expected_pass();
        c
    }

    pub fn exact(name: impl Into<String>, target: &BigRational, value: &BigRational) -> Self {
        Check {
            name: name.into(),
            kind: CheckKind::Exact,
            target: rational_to_f64(target),
            value: rational_to_f64(value),
            tolerance: 0.0,
            pass: target == value,
            note: Some(format!("target {} value {}", format_rational(target), format_rational(value))),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// The pass flag implied by `kind`, `target`, `value` and `tolerance`.
    pub fn expected_pass(&self) -> bool {
        let (t, v, tol) = (self.target, self.value, self.tolerance);
        match self.kind {
            CheckKind::Abs => (v - t).abs() <= tol,
            CheckKind::Rel => (v / t - 1.0).abs() <= tol,
            CheckKind::AtMost => v <= t + tol,
            CheckKind::Below => v < t,
            CheckKind::Factor => v >= t / tol && v <= t * tol,
            CheckKind::Exact => self.pass && v == t,
        }
    }

    pub fn residual(&self) -> f64 {
        match self.kind {
            CheckKind::Rel => (self.value / self.target - 1.0).abs(),
            CheckKind::Factor => self.value / self.target,
            _ => self.value - self.target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub start_unix_ms: u128,
    pub end_unix_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub seed: u64,
    pub version: String,
    pub environment: String,
    pub results: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Wall-clock times; excluded from [`RunManifest::deterministic_json`].
    pub timestamps: Timestamps,
}

impl RunManifest {
    /// The manifest as JSON with the timestamps zeroed.
    pub fn deterministic_json(&self) -> String {
        let mut m = self.clone();
        m.timestamps = Timestamps {
            start_unix_ms: 0,
            end_unix_ms: 0,
        };
        serde_json::to_string_pretty(&m).expect("manifest serialises")
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(r) = num.as_f64().map(sig12).and_then(serde_json::Number::from_f64) {
                *num = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn fmt12(x: f64) -> String {
    sig12(x).to_string()
}

/// What a subcommand produced.
struct Outcome {
    results: Value,
    checks: Vec<Check>,
    csv: Option<String>,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let command: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nzflow: {e}");
            match e {
                Error::SizeCap { .. } | Error::RetryExhausted { .. } => EXIT_RESOURCE,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn execute(cli: &Cli, command: Vec<String>) -> Result<i32> {
    let start = now_ms();
    let outcome = match &cli.command {
        Command::Sample(a) => sample(a, cli.seed)?,
        Command::Orient(a) => orient_cmd(a, cli.seed)?,
        Command::Count(a) => count(a, cli.seed)?,
        Command::Moments(a) => moments_cmd(a)?,
        Command::Landscape(a) => landscape(a, cli.seed)?,
        Command::Conditioning(a) => conditioning(a, cli.seed)?,
        Command::Report(a) => report(a)?,
    };
    let mut results = outcome.results;
    round_floats(&mut results);
    let checks: Vec<Check> = outcome
        .checks
        .into_iter()
        .map(|mut c| {
            c.target = sig12(c.target);
            c.value = sig12(c.value);
            c.tolerance = sig12(c.tolerance);
            c
        })
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    let manifest = RunManifest {
        command,
        seed: cli.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        environment: format!("{}-{}", std::env::consts::OS, std::env::consts::ARCH),
        results,
        checks,
        pass,
        timestamps: Timestamps {
            start_unix_ms: start,
            end_unix_ms: now_ms(),
        },
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    if let Some(path) = &cli.out {
        std::fs::write(path, &text)?;
    }
    match (cli.format, outcome.csv) {
        (Format::Csv, Some(csv)) => print!("{csv}"),
        _ => println!("{text}"),
    }
    for c in manifest.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: value {} target {} tolerance {}", c.name, c.value, c.target, c.tolerance);
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn sample(a: &SampleArgs, seed: u64) -> Result<Outcome> {
    let p = if a.simple {
        pairing::sample_simple_regular(a.n, seed, a.max_attempts)?
    } else {
        pairing::sample_pairing(a.n, seed)?
    };
    let g = p.to_multigraph();
    let cycles = pairing::cycle_counts(&g, 4.min(a.n))?;
    Ok(Outcome {
        results: json!({
            "n": a.n,
            "simple": g.is_simple(),
            "cycle_counts": cycles.counts,
            "pairing": p,
            "multigraph": g,
        }),
        checks: vec![],
        csv: None,
    })
}

/// A pairing from a raw pairing file or from a `sample` manifest.
fn read_pairing(path: &Path) -> Result<Pairing> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let inner = v.get("results").and_then(|r| r.get("pairing")).cloned().unwrap_or(v);
    Ok(serde_json::from_value(inner)?)
}

fn orient_cmd(a: &OrientArgs, seed: u64) -> Result<Outcome> {
    let p = read_pairing(&a.input)?;
    let outcome = orient::find_valid(&p, a.budget, seed);
    let mut checks = vec![];
    let mut results = json!({ "n": p.n() });
    match &outcome {
        FindOutcome::Found {
            orientation,
            steps,
            restarts,
        } => {
            let rep = orient::validate(&p, orientation)?;
            checks.push(Check::new("validated", CheckKind::Abs, 1.0, rep.valid as u8 as f64, 0.0));
            checks.push(Check::new("half are in-vertices", CheckKind::Abs, (p.n() / 2) as f64, rep.in_vertices() as f64, 0.0));
            results["found"] = json!(true);
            results["steps"] = json!(steps);
            results["restarts"] = json!(restarts);
            results["orientation"] = json!(orientation);
        }
        FindOutcome::Failed {
            best_potential,
            steps,
            restarts,
        } => {
            checks.push(Check::new("found", CheckKind::Abs, 1.0, 0.0, 0.0));
            results["found"] = json!(false);
            results["steps"] = json!(steps);
            results["restarts"] = json!(restarts);
            results["best_potential"] = json!(best_potential);
        }
    }
    if a.count {
        results["count"] = json!(orient::count_valid(&p)?);
    }
    Ok(Outcome { results, checks, csv: None })
}

fn count(a: &CountArgs, seed: u64) -> Result<Outcome> {
    if let Some(path) = &a.input {
        let p = read_pairing(path)?;
        let y = orient::count_valid_capped(&p, a.cap)?;
        return Ok(Outcome {
            results: json!({ "n": p.n(), "count": y }),
            checks: vec![],
            csv: None,
        });
    }
    let Some(n) = a.n else {
        return crate::error::domain("count needs --input or --n");
    };
    if a.all_pairings {
        let all = pairing::all_pairings(n)?;
        let m = all.len() as u64;
        let mut s1 = 0u64;
        let mut s2 = 0u64;
        for p in &all {
            let y = orient::count_valid_capped(p, a.cap)?;
            s1 += y;
            s2 += y * y;
        }
        let q = |x: u64| BigRational::new(x.into(), m.into());
        let (mean, second, fact) = (q(s1), q(s2), q(s2 - s1));
        let checks = vec![
            Check::exact("mean of Y equals E Y", &moments::first_moment_exact(n)?, &mean),
            Check::exact("mean of Y^2 equals the sum over I", &moments::second_moment_exact(n)?, &second),
        ];
        return Ok(Outcome {
            results: json!({
                "n": n,
                "pairings": m,
                "mean_y": format_rational(&mean),
                "mean_y_squared": format_rational(&second),
                "mean_y_y_minus_1": format_rational(&fact),
            }),
            checks,
            csv: None,
        });
    }
    let trials = a.trials.unwrap_or(10_000);
    let est = moments::mc_first_moment(n, trials, seed)?;
    let exact = rational_to_f64(&moments::first_moment_exact(n)?);
    let check = Check::new("MC mean of Y within 4 standard errors", CheckKind::Abs, exact, est.mean, 4.0 * est.stderr);
    Ok(Outcome {
        results: json!({ "n": n, "trials": trials, "mean": est.mean, "stderr": est.stderr, "exact": exact }),
        checks: vec![check],
        csv: None,
    })
}

fn moments_cmd(a: &MomentsArgs) -> Result<Outcome> {
    let mode = match a.mode {
        Mode::Exact => Arithmetic::Exact,
        Mode::Log => Arithmetic::Log,
    };
    let mut rows = vec![];
    let mut checks = vec![];
    let mut csv = String::from("n,mode,which,value_log10,value,target,rel_err\n");
    for &n in &a.n {
        let (value, rational) = match (a.which, mode) {
            (Which::First, Arithmetic::Exact) => {
                let q = moments::first_moment_exact(n)?;
                (rational_to_log(&q), Some(q))
            }
            (Which::First, Arithmetic::Log) => (moments::first_moment_log(n)?, None),
            (Which::Second, _) => match moments::second_moment(n, mode)? {
                moments::MomentValue::Exact(q) => (rational_to_log(&q), Some(q)),
                moments::MomentValue::Log(l) => (l, None),
            },
            (Which::Ratio, Arithmetic::Exact) => {
                let q = moments::moment_ratio_exact(n)?;
                (rational_to_log(&q), Some(q))
            }
            (Which::Ratio, Arithmetic::Log) => (crate::numbers::LogNumber::from_f64(moments::moment_ratio(n)?), None),
        };
        let target = match a.which {
            Which::First => moments::first_moment_asymptotic(n)?,
            Which::Second => moments::second_moment_asymptotic(n)?,
            Which::Ratio => crate::numbers::LogNumber::from_f64(moments::ratio_limit()),
        };
        let rel_err = (value / target).to_f64() - 1.0;
        let mode_name = if mode == Arithmetic::Exact { "exact" } else { "log" };
        let which = serde_json::to_value(a.which)?;
        csv.push_str(&format!(
            "{n},{mode_name},{},{},{},{},{}\n",
            which.as_str().unwrap_or(""),
            fmt12(value.log10_abs()),
            fmt12(value.to_f64()),
            fmt12(target.to_f64()),
            fmt12(rel_err.abs())
        ));
        let mut row = json!({
            "n": n,
            "mode": mode_name,
            "which": which,
            "value_log10": value.log10_abs(),
            "target": target.to_f64(),
            "target_log10": target.log10_abs(),
            "rel_err": rel_err.abs(),
        });
        if let Some(q) = rational {
            row["value_rational"] = json!(format_rational(&q));
        }
        if value.ln_abs().abs() < 700.0 {
            row["value"] = json!(value.to_f64());
        }
        rows.push(row);
        if let Some(tol) = a.tol {
            checks.push(Check::new(format!("n={n} relative error"), CheckKind::AtMost, 0.0, rel_err.abs(), tol));
        }
    }
    let results = if rows.len() == 1 { rows.pop().unwrap() } else { json!({ "rows": rows }) };
    Ok(Outcome {
        results,
        checks,
        csv: Some(csv),
    })
}

fn landscape(a: &LandscapeArgs, seed: u64) -> Result<Outcome> {
    use LandscapeCheck::*;
    let wanted = if a.check.is_empty() {
        vec![Grad, Hessian, Spectrum, Maximize, Boundary]
    } else {
        a.check.clone()
    };
    let mut results = serde_json::Map::new();
    let mut checks = vec![];
    let tilde = land::ZVector::tilde();
    for c in wanted {
        match c {
            Grad => {
                let g = land::grad_f(&tilde)?;
                let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let polys = land::stationary_polys(&tilde);
                let pmax = polys.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let fd = land::grad_fd_max_error(a.points, 1e-6, 1e-3, seed);
                let ident = land::exp_grad_identity_err(a.points, seed);
                let probe = land::ZVector::new(0.25, 0.1, 0.05, 0.05, 0.05);
                let (d1, d2) = (land::grad_f(&probe)?[1], land::dz00_expanded(&probe)?);
                checks.extend([
                    Check::new("gradient vanishes at z~", CheckKind::AtMost, 0.0, gmax, 1e-10),
                    Check::new("stationary polynomials vanish at z~", CheckKind::AtMost, 0.0, pmax, 1e-12),
                    Check::new("P6(z~) = 0", CheckKind::AtMost, 0.0, land::p6(&tilde).abs(), 1e-12),
                    Check::new("P7(1/4, 1/20) = 0", CheckKind::AtMost, 0.0, land::p7(0.25, 0.05).abs(), 1e-12),
                    Check::new("gradient vs central differences", CheckKind::AtMost, 0.0, fd, 1e-6),
                    Check::new("exp of partials vs rational forms", CheckKind::AtMost, 0.0, ident, 1e-12),
                    Check::new("df/dz00 two evaluations", CheckKind::Abs, d2, d1, 1e-14),
                ]);
                results.insert(
                    "grad".into(),
                    json!({ "grad_at_tilde": g, "polys_at_tilde": polys, "fd_max_error": fd, "points": a.points }),
                );
            }
            Hessian => {
                let hb = land::hessian_at(&tilde)?;
                let diff = hb.max_abs_diff(&land::HessianB::exact());
                let r2 = land::taylor_ratio(1e-2, 200, seed)?;
                let r3 = land::taylor_ratio(1e-3, 200, seed)?;
                checks.extend([
                    Check::new("B(z~) matches exact matrix", CheckKind::AtMost, 0.0, diff, 1e-6),
                    Check::new("finite-difference asymmetry", CheckKind::AtMost, 0.0, hb.raw_asymmetry, 1e-8),
                    Check::new("Taylor residual third-order decay", CheckKind::Factor, 1.0, r3 / r2, 3.0),
                ]);
                let rows: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| hb.entry(i, j)).collect()).collect();
                results.insert(
                    "hessian".into(),
                    json!({ "matrix": rows, "taylor_ratio_1e-2": r2, "taylor_ratio_1e-3": r3 }),
                );
            }
            Spectrum => {
                let s = land::spectrum_b();
                let closed = land::eigenvalues_closed_form();
                let ev_err = s.eigenvalues.iter().zip(closed).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                let product: f64 = s.eigenvalues.iter().product();
                let lc = land::laplace_coefficient();
                let det_target = BigRational::new((-328125).into(), 4.into());
                checks.extend([
                    Check::new("eigenvalues match closed forms", CheckKind::AtMost, 0.0, ev_err, 1e-8),
                    Check::exact("det B", &det_target, &s.determinant),
                    Check::new("largest eigenvalue below -2.6", CheckKind::Below, -2.6, s.eigenvalues[4], 0.0),
                    Check::new("product of eigenvalues equals det", CheckKind::Rel, s.determinant_f64, product, 1e-6),
                    Check::new("Laplace coefficient 25/sqrt(21)", CheckKind::Rel, 25.0 / 21f64.sqrt(), lc, 1e-10),
                    Check::new("coefficient / 5 = 5/sqrt(21)", CheckKind::Rel, moments::ratio_limit(), lc / 5.0, 1e-10),
                ]);
                results.insert(
                    "spectrum".into(),
                    json!({
                        "eigenvalues": s.eigenvalues,
                        "determinant": format_rational(&s.determinant),
                        "laplace_coefficient": lc,
                    }),
                );
            }
            Maximize => {
                let cands = land::maximize_f(a.starts, 1e-6, seed);
                let best = &cands[0];
                let top = cands.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
                let (scan_at, scan_max) = land::global_scan(a.samples, seed);
                let bvals: Vec<f64> = cands
                    .iter()
                    .filter(|c| c.kind == land::CandidateKind::Boundary)
                    .map(|c| c.value)
                    .collect();
                checks.extend([
                    Check::new("best point is z~", CheckKind::AtMost, 0.0, best.point.distance(&tilde), 1e-6),
                    Check::new("best value is log(25/8)", CheckKind::Abs, land::f_max(), best.value, 1e-9),
                    Check::new("no candidate above log(25/8)", CheckKind::AtMost, land::f_max(), top, 1e-9),
                    Check::new("uniform scan never above log(25/8)", CheckKind::AtMost, land::f_max(), scan_max, 1e-9),
                    Check::new("boundary candidates agree", CheckKind::Abs, bvals[0], bvals[1], 1e-12),
                ]);
                results.insert(
                    "maximize".into(),
                    json!({ "candidates": cands, "scan_max": scan_max, "scan_argmax": scan_at, "samples": a.samples }),
                );
            }
            Boundary => {
                let rep = land::boundary_report(seed);
                let worst = [rep.computed_value, rep.mirror_value, rep.f_bar_max]
                    .into_iter()
                    .chain(rep.diagonal_stationary.iter().map(|d| d.value))
                    .fold(f64::NEG_INFINITY, f64::max);
                checks.extend([
                    Check::new("boundary maxima below log(25/8)", CheckKind::Below, land::f_max(), worst, 0.0),
                    Check::new("Case 2 reduces to f_bar", CheckKind::AtMost, 0.0, rep.case2_identity_err, 1e-12),
                ]);
                let discrepancy = json!({
                    "point": [0.0, 0.0, 0.5, 0.5, 0.0],
                    "printed": "log(5/8)",
                    "printed_value": rep.printed_value,
                    "computed": "log(5/(2 sqrt 2))",
                    "computed_value": rep.computed_value,
                    "case1_diagonal_derivative": "2 log((3 + 4t) / (16 t)), zero at t = 1/4",
                });
                results.insert("boundary".into(), json!({ "report": rep, "discrepancy": discrepancy }));
            }
        }
    }
    Ok(Outcome {
        results: Value::Object(results),
        checks,
        csv: None,
    })
}

fn conditioning(a: &ConditioningArgs, seed: u64) -> Result<Outcome> {
    let k_max = a.k_max;
    let mut checks = vec![];
    for k in 1..=k_max {
        let lam = cond::lambda_k(k)?;
        let lam_closed = BigRational::new(num_bigint::BigInt::from(4).pow(k as u32), (2 * k).into());
        checks.push(Check::exact(format!("lambda_{k}"), &lam_closed, &lam));
        checks.push(Check::exact(format!("delta_{k}"), &cond::delta_k_closed(k)?, &cond::delta_k(k)?));
        checks.push(Check::exact(format!("mu_{k} two routes"), &cond::mu_k(k)?, &cond::mu_k_from_a(k)?));
    }
    for k in 1..=k_max.min(12) {
        let census = cond::cycle_orientation_census(k)?;
        let ok = census
            .iter()
            .enumerate()
            .all(|(i, &c)| cond::a_i(k, i).map(|a| a == c.into()).unwrap_or(false));
        checks.push(Check::new(format!("a_i census k={k}"), CheckKind::Abs, 1.0, ok as u8 as f64, 0.0));
    }
    let mut results = serde_json::Map::new();
    if a.series {
        let v = cond::ssc_constant(k_max)?;
        let tol = (4.0f64 / 25.0).powi(k_max as i32).max(1e-14);
        checks.push(Check::new("series constant 5/sqrt(21)", CheckKind::Abs, moments::ratio_limit(), v, tol));
        results.insert("ssc_constant".into(), json!(v));
    }
    let samples = if a.mc {
        let s = cond::sample_joint(a.n, a.trials, k_max.min(a.n), seed)?;
        for k in 1..=2.min(s.k_max) {
            let est = s.joint_moment(k);
            let mu = rational_to_f64(&cond::mu_k(k)?);
            let tol = (0.1 * mu).max(3.0 * est.stderr);
            checks.push(Check::new(format!("E(Y X_{k})/E Y near mu_{k}"), CheckKind::Abs, mu, est.estimate, tol));
        }
        let pair = s.factorial_moment(1, 2);
        let exact = rational_to_f64(&cond::loop_pair_moment_exact(a.n)?);
        checks.push(
            Check::new("E(Y [X_1]_2)/E Y at finite n", CheckKind::Abs, exact, pair.estimate, 3.0 * pair.stderr)
                .with_note(format!("limit mu_1^2 = {}", sig12(2.56))),
        );
        results.insert("loop_pairs".into(), json!({ "estimate": pair, "finite_n": exact, "limit": 2.56 }));
        Some(s)
    } else {
        None
    };
    let table = cond::cycle_moment_table(k_max, samples.as_ref())?;
    let mut csv = String::from("k,lambda,mu,delta,mc_estimate,mc_stderr,finite_n\n");
    for r in &table {
        let opt = |x: Option<f64>| x.map(fmt12).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            r.lambda,
            r.mu,
            r.delta,
            opt(r.mc.map(|m| m.estimate)),
            opt(r.mc.map(|m| m.stderr)),
            opt(r.finite_n)
        ));
    }
    results.insert("table".into(), serde_json::to_value(&table)?);
    if let Some(s) = &samples {
        results.insert("mc".into(), json!({ "n": s.n, "trials": s.y.len() }));
    }
    Ok(Outcome {
        results: Value::Object(results),
        checks,
        csv: Some(csv),
    })
}

fn report(a: &ReportArgs) -> Result<Outcome> {
    if a.manifests.is_empty() {
        return crate::error::domain("report needs at least one manifest");
    }
    let mut claims = vec![];
    let mut discrepancies = vec![];
    let mut all = vec![];
    let mut csv = String::from("source,check,target,value,residual,tolerance,pass\n");
    for path in &a.manifests {
        let m = RunManifest::read(path)?;
        let source = path.display().to_string();
        for c in &m.checks {
            let consistent = c.expected_pass() == c.pass;
            claims.push(json!({
                "source": source,
                "check": c.name,
                "kind": c.kind,
                "target": c.target,
                "value": c.value,
                "residual": c.residual(),
                "tolerance": c.tolerance,
                "pass": c.pass && consistent,
                "note": c.note,
            }));
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                source,
                c.name.replace(',', ";"),
                fmt12(c.target),
                fmt12(c.value),
                fmt12(c.residual()),
                fmt12(c.tolerance),
                c.pass && consistent
            ));
            all.push(Check {
                pass: c.pass && consistent,
                ..c.clone()
            });
        }
        if let Some(d) = m.results.get("boundary").and_then(|b| b.get("discrepancy")) {
            discrepancies.push(json!({ "source": source, "boundary": d }));
        }
    }
    let all_pass = all.iter().all(|c| c.pass);
    Ok(Outcome {
        results: json!({ "manifests": a.manifests.len(), "claims": claims, "discrepancies": discrepancies, "all_pass": all_pass }),
        checks: all,
        csv: Some(csv),
    })
}
