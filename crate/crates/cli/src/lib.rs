//! Command-line front end for the `cvbench` toolkit.
//!
//! Every command writes one report. JSON reports carry the tool version, the
//! command, the channel document, the benchmark parameters and the seed, and
//! contain nothing else that varies between runs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cvbench::benchmark::boundary_curve_normalized;
use cvbench::document::to_canonical_json;
use cvbench::fock::{oracle_average_noise, OracleConfig};
use cvbench::montecarlo::{certify, run_experiment, ExperimentConfig, Schedule};
use cvbench::{
    average_noise, classify_gaussian_channel, evaluate_bounds, find_violation, BenchmarkParams,
    Channel, ChannelDocument,
};

pub const TOOL: &str = "cvbench";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status of a command that ran to completion.
pub const EXIT_OK: i32 = 0;
/// Exit status for invalid input or a failed computation.
pub const EXIT_ERROR: i32 = 1;
/// Exit status when `certify` or `find-violation` reports a violation.
pub const EXIT_VIOLATION: i32 = 2;

pub const CSV_HEADER: &str = "eta_prime,Vx,Vp";

#[derive(Debug, Parser)]
#[command(name = "cvbench", version, about = "Uncertainty-product benchmark for continuous-variable channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic noises of a channel and both entanglement-breaking limits.
    Bound(BoundArgs),
    /// Boundary curve of the product limit as CSV.
    Sweep(SweepArgs),
    /// Monte Carlo estimate of the averaged noises.
    Simulate(SimulateArgs),
    /// Monte Carlo estimate with a confidence-level verdict; exits 2 on violation.
    Certify(SimulateArgs),
    /// Fock-basis evaluation of the averaged noises.
    Oracle(OracleArgs),
    /// Searches benchmark settings for a violation; exits 2 when one is found.
    FindViolation(FindArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bound(_) => "bound",
            Command::Sweep(_) => "sweep",
            Command::Simulate(_) => "simulate",
            Command::Certify(_) => "certify",
            Command::Oracle(_) => "oracle",
            Command::FindViolation(_) => "find-violation",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GainArgs {
    /// Symmetric gain product η (g_x = g_p = √η).
    #[arg(long, conflicts_with_all = ["gain_x", "gain_p"], required_unless_present_all = ["gain_x", "gain_p"])]
    pub eta: Option<f64>,
    #[arg(long, requires = "gain_p")]
    pub gain_x: Option<f64>,
    #[arg(long, requires = "gain_x")]
    pub gain_p: Option<f64>,
    /// Prior concentration λ.
    #[arg(long)]
    pub lambda: f64,
}

impl GainArgs {
    fn params(&self, allow_flat_prior: bool) -> Result<BenchmarkParams> {
        if !allow_flat_prior && !(self.lambda > 0.0) {
            bail!("--lambda must be positive for this command, got {}", self.lambda);
        }
        let params = match (self.eta, self.gain_x, self.gain_p) {
            (Some(eta), None, None) => BenchmarkParams::symmetric(eta, self.lambda)?,
            (None, Some(gx), Some(gp)) => BenchmarkParams::new(self.lambda, gx, gp)?,
            _ => bail!("give either --eta or both --gain-x and --gain-p"),
        };
        Ok(params)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[command(flatten)]
    pub gains: GainArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Normalized gain η/(1+λ).
    #[arg(long)]
    pub eta_prime: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    /// Preparation squeezing runs over [-r_max, r_max].
    #[arg(long, default_value_t = 2.0)]
    pub r_max: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Alternate,
    Random,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Alternate => Schedule::Alternate,
            ScheduleArg::Random => Schedule::Random,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[command(flatten)]
    pub gains: GainArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Alternate)]
    pub schedule: ScheduleArg,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[command(flatten)]
    pub gains: GainArgs,
    /// Fock cutoff D.
    #[arg(long, default_value_t = 40)]
    pub cutoff: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FindArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Finished command: the report text and the exit status it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub code: i32,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Self { report, code: EXIT_OK }
    }

    fn flagged(report: String, violation: bool) -> Self {
        let code = if violation { EXIT_VIOLATION } else { EXIT_OK };
        Self { report, code }
    }
}

fn load_channel(path: &Path) -> Result<(ChannelDocument, Channel)> {
    let doc = ChannelDocument::load(path)?;
    let channel = doc.to_channel()?;
    Ok((doc, channel))
}

fn provenance(command: &str, doc: Option<&ChannelDocument>, params: Option<&BenchmarkParams>, seed: Option<u64>) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "channel": doc,
        "params": params,
        "seed": seed,
    })
}

fn render(mut report: Value, prov: Value) -> String {
    report["provenance"] = prov;
    to_canonical_json(&report)
}

/// Runs a parsed command without touching the filesystem beyond reading the
/// channel document.
pub fn execute(command: &Command) -> Result<Outcome> {
    let name = command.name();
    match command {
        Command::Bound(a) => {
            let (doc, channel) = load_channel(&a.channel)?;
            let params = a.gains.params(true)?;
            let noise = average_noise(&channel, &params)?;
            let bounds = evaluate_bounds(&noise, &params)?;
            let class = match channel {
                Channel::Gaussian(spec) => Some(classify_gaussian_channel(&spec)),
                Channel::MeasurePrepare(_) => None,
            };
            let report = json!({
                "noise": noise,
                "bounds": bounds,
                "violated": bounds.violated(),
                "channel_class": class,
            });
            Ok(Outcome::ok(render(report, provenance(name, Some(&doc), Some(&params), None))))
        }
        Command::Sweep(a) => Ok(Outcome::ok(sweep_csv(a)?)),
        Command::Simulate(a) | Command::Certify(a) => {
            let (doc, channel) = load_channel(&a.channel)?;
            let params = a.gains.params(false)?;
            let config = ExperimentConfig::new(a.samples, a.seed, params)?.with_schedule(a.schedule.into());
            let estimate = run_experiment(&channel, &config)?;
            let verdict = certify(&estimate, &params, a.confidence)?;
            let analytic = average_noise(&channel, &params).ok();
            let report = json!({
                "schedule": Schedule::from(a.schedule),
                "estimate": estimate,
                "analytic": analytic,
                "certification": verdict,
                "certified": verdict.certified(),
            });
            let text = render(report, provenance(name, Some(&doc), Some(&params), Some(a.seed)));
            if matches!(command, Command::Certify(_)) {
                Ok(Outcome::flagged(text, verdict.certified()))
            } else {
                Ok(Outcome::ok(text))
            }
        }
        Command::Oracle(a) => {
            let (doc, channel) = load_channel(&a.channel)?;
            let params = a.gains.params(false)?;
            let config = OracleConfig::default().with_cutoff(a.cutoff);
            let oracle = oracle_average_noise(&channel, &params, &config)?;
            let analytic = average_noise(&channel, &params)?;
            let report = json!({
                "config": config,
                "oracle": oracle,
                "analytic": analytic,
                "deviation": [oracle.v_x - analytic.v_x, oracle.v_p - analytic.v_p],
            });
            Ok(Outcome::ok(render(report, provenance(name, Some(&doc), Some(&params), None))))
        }
        Command::FindViolation(a) => {
            let (doc, channel) = load_channel(&a.channel)?;
            let Channel::Gaussian(spec) = channel else {
                bail!("find-violation needs a gaussian channel document");
            };
            let found = find_violation(&spec)?;
            let report = json!({
                "channel_class": classify_gaussian_channel(&spec),
                "search": found,
                "violated": found.verdict.violated,
            });
            let text = render(report, provenance(name, Some(&doc), Some(&found.params), None));
            Ok(Outcome::flagged(text, found.verdict.violated))
        }
    }
}

fn sweep_csv(a: &SweepArgs) -> Result<String> {
    if a.points == 0 {
        bail!("--points must be at least 1");
    }
    if !(a.r_max.is_finite() && a.r_max >= 0.0) {
        bail!("--r-max must be finite and nonnegative, got {}", a.r_max);
    }
    let balances: Vec<f64> = match a.points {
        1 => vec![0.0],
        n => (0..n)
            .map(|i| -a.r_max + 2.0 * a.r_max * i as f64 / (n - 1) as f64)
            .collect(),
    };
    let curve = boundary_curve_normalized(a.eta_prime, &balances)?;
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (vx, vp) in curve {
        out.push_str(&format!("{:.16e},{vx:.16e},{vp:.16e}\n", a.eta_prime));
    }
    Ok(out)
}

fn output_path(command: &Command) -> Option<&Path> {
    match command {
        Command::Bound(a) => a.output.as_deref(),
        Command::Sweep(a) => a.output.as_deref(),
        Command::Simulate(a) | Command::Certify(a) => a.output.as_deref(),
        Command::Oracle(a) => a.output.as_deref(),
        Command::FindViolation(a) => a.output.as_deref(),
    }
}

/// Executes the command and writes its report to `--output` or `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let outcome = execute(&cli.command)?;
    let mut text = outcome.report;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output_path(&cli.command) {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(outcome.code)
}
