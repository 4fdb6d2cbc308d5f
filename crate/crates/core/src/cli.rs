//! Command-line front end shared by the `ptres` binary and the tests.
//!
//! Every subcommand reads its parameters from flags, falling back to a JSON
//! run file given with `--config`. Exit codes: 0 on success, 1 for usage or
//! configuration problems, 2 when a computation fails.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::experiments::{
    run_kmax_bound_check, run_kmin_experiment, run_moments_experiment, run_vgrowth_experiment, run_weyl_experiment,
    ExperimentReport, RunOptions,
};
use crate::exppoly::{analyze, CanonicalExpPoly, DEFAULT_N_MAX};
use crate::geometry::{Configuration, Point3};
use crate::rootfind::{counting_report, extract_k_numeric, find_resonances, CountingReport, KEstimate, ResonanceSet};
use crate::sampler::{sample, SampleSet, SamplerConfig, SamplerKind};

pub const WORKERS_ENV: &str = "PTRES_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ptres", version, about = "Resonances of point interactions in three dimensions")]
pub struct Cli {
    /// JSON run file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate resonances in a disc and tabulate counting functions.
    Resonances(ResonanceArgs),
    /// Size, diameter, density and chain parameters from the exponential polynomial.
    Asymptotics(AsymptoticsArgs),
    /// Draw a random configuration.
    Sample(SampleArgs),
    /// Run a Monte Carlo experiment.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    /// Inline JSON array of points, e.g. '[[0,0,0],[1,0,0]]'.
    #[arg(long)]
    pub points: Option<String>,
    /// Configuration file: `{"alpha":[re,im],"points":[...]}` or a bare point array.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Coupling as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ResonanceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Radii at which counts are tabulated (comma separated); default 20 equal steps up to the radius.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Upper end of the default h-grid (step 0.02).
    #[arg(long)]
    pub h_max: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Where to write the counting report (JSON) when the main output is CSV.
    #[arg(long)]
    pub counting_output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SamplerChoice {
    UniformBall,
    MixedBinomial,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub kind: Option<SamplerChoice>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Mixing law as "count:prob" pairs, e.g. "0:0.25,1:0.75"; defaults to uniform on {0,1,2}.
    #[arg(long, value_delimiter = ',')]
    pub mixing: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub stream_id: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Weyl,
    Kmin,
    Vgrowth,
    Kmax,
    Moments,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: Option<ExperimentKind>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub ks_tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Full report as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Per-trial rows as CSV.
    #[arg(long)]
    pub csv_output: Option<PathBuf>,
    /// Empirical CDF table as two-column CSV.
    #[arg(long)]
    pub cdf_output: Option<PathBuf>,
}

/// Contents of a `--config` run file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub kind: Option<String>,
    pub points: Option<Vec<Point3>>,
    pub input: Option<PathBuf>,
    pub alpha: Option<String>,
    pub radius: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub h_max: Option<f64>,
    pub h_grid: Option<Vec<f64>>,
    pub n_max: Option<usize>,
    pub m: Option<usize>,
    pub r: Option<f64>,
    pub trials: Option<usize>,
    pub pairs: Option<usize>,
    pub t_grid: Option<Vec<f64>>,
    pub mixing: Option<Vec<(usize, f64)>>,
    pub seed: Option<u64>,
    pub stream_id: Option<u64>,
    pub workers: Option<usize>,
    pub ks_tol: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub counting_output: Option<PathBuf>,
    pub csv_output: Option<PathBuf>,
    pub cdf_output: Option<PathBuf>,
}

/// JSON written by `asymptotics`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsOutput {
    #[serde(rename = "V")]
    pub v: f64,
    pub diam: f64,
    #[serde(rename = "Ad")]
    pub ad: f64,
    #[serde(rename = "K")]
    pub k: Vec<f64>,
    pub weyl: bool,
    pub assignment: Vec<usize>,
    pub canonical: CanonicalExpPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// JSON written by `resonances --format json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceOutput {
    pub resonances: ResonanceSet,
    pub counting: CountingReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_estimates: Option<Vec<KEstimate>>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Compute(Error::TooLarge { what, n, limit }) => write!(
                f,
                "error: {what} has {n} points, above the limit {limit}; raise it with --n-max {n}"
            ),
            CliError::Compute(e) => write!(f, "error: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Input errors are configuration problems; everything else is a failed computation.
fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidInput(_)
        | Error::DuplicatePoints(..)
        | Error::EmptyConfiguration
        | Error::InsufficientRadius(..)
        | Error::RegionExceeded { .. } => CliError::Usage(e.to_string()),
        other => CliError::Compute(other),
    }
}

/// Parses "re,im" (a lone real part is accepted as well).
pub fn parse_alpha(s: &str) -> CliResult<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| usage(format!("invalid alpha {s:?}, expected re,im")));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(usage(format!("invalid alpha {s:?}, expected re,im"))),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(usage(format!("alpha must be finite, got {s:?}")));
    }
    Ok(z)
}

fn parse_mixing(items: &[String]) -> CliResult<Vec<(usize, f64)>> {
    items
        .iter()
        .map(|it| {
            let (c, p) = it
                .split_once(':')
                .ok_or_else(|| usage(format!("mixing entry {it:?} is not count:prob")))?;
            let c = c.trim().parse().map_err(|_| usage(format!("bad count in {it:?}")))?;
            let p = p.trim().parse().map_err(|_| usage(format!("bad probability in {it:?}")))?;
            Ok((c, p))
        })
        .collect()
}

fn load_run_config(path: Option<&Path>, command: &str) -> CliResult<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid run file {}: {e}", path.display())))?;
    if let Some(c) = &cfg.command {
        if c != command {
            return Err(usage(format!("run file is for command {c:?}, not {command:?}")));
        }
    }
    Ok(cfg)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    Full(Configuration),
    Points(Vec<Point3>),
}

fn load_configuration(args: &InputArgs, file: &RunConfig) -> CliResult<Configuration> {
    let (points, input) = if args.points.is_some() || args.input.is_some() {
        (args.points.clone(), args.input.clone())
    } else {
        (None, file.input.clone())
    };
    let alpha = args.alpha.as_deref().or(file.alpha.as_deref()).map(parse_alpha).transpose()?;
    let (pts, file_alpha) = match (points, input, &file.points) {
        (Some(_), Some(_), _) => return Err(usage("give either --points or --input, not both")),
        (Some(p), None, _) => (
            serde_json::from_str::<Vec<Point3>>(&p).map_err(|e| usage(format!("invalid --points: {e}")))?,
            None,
        ),
        (None, Some(path), _) => {
            let text =
                fs::read_to_string(&path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            match serde_json::from_str::<ConfigFile>(&text) {
                Ok(ConfigFile::Full(c)) => (c.points().to_vec(), Some(c.alpha())),
                Ok(ConfigFile::Points(p)) => (p, None),
                Err(e) => return Err(usage(format!("invalid configuration file {}: {e}", path.display()))),
            }
        }
        (None, None, Some(p)) => (p.clone(), None),
        (None, None, None) => return Err(usage("no configuration given; use --points or --input")),
    };
    let alpha = alpha.or(file_alpha).unwrap_or(Complex64::new(1.0, 0.0));
    Configuration::new(pts, alpha).map_err(classify)
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn ascending_grid(name: &str, g: &[f64]) -> CliResult<()> {
    if g.is_empty() || g.iter().any(|x| !x.is_finite()) || g.windows(2).any(|w| w[1] <= w[0]) {
        return Err(usage(format!("{name} must be a nonempty increasing list")));
    }
    Ok(())
}

pub fn cmd_resonances(args: &ResonanceArgs, file: &RunConfig) -> CliResult<()> {
    let c = load_configuration(&args.input, file)?;
    let radius = args
        .radius
        .or(file.radius)
        .ok_or_else(|| usage("missing --radius\n\nUsage: ptres resonances --points <JSON> --radius <R> [--alpha re,im]"))?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(usage(format!("radius must be positive, got {radius}")));
    }
    let radii = args
        .radii
        .clone()
        .or_else(|| file.radii.clone())
        .unwrap_or_else(|| (1..=20).map(|i| radius * i as f64 / 20.0).collect());
    ascending_grid("radii", &radii)?;
    let h_grid = match args.h_grid.clone().or_else(|| file.h_grid.clone()) {
        Some(g) => g,
        None => {
            let h_max = args.h_max.or(file.h_max).unwrap_or(8.0);
            if !(h_max > 0.0 && h_max.is_finite()) {
                return Err(usage(format!("h-max must be positive, got {h_max}")));
            }
            let steps = (h_max / 0.02).round() as usize;
            (0..=steps).map(|j| j as f64 * 0.02).collect()
        }
    };
    ascending_grid("h-grid", &h_grid)?;

    let rs = find_resonances(&c, radius).map_err(classify)?;
    let counting = counting_report(&rs, &radii, &h_grid).map_err(classify)?;
    let k_estimates = extract_k_numeric(&counting).ok();
    let format = args.format.or(file.format).unwrap_or(Format::Csv);
    let output = args.output.clone().or_else(|| file.output.clone());
    match format {
        Format::Csv => {
            write_output(output.as_deref(), &rs.to_csv())?;
            let counting_path = args
                .counting_output
                .clone()
                .or_else(|| file.counting_output.clone())
                .or_else(|| output.as_ref().map(|p| p.with_extension("counting.json")));
            if let Some(p) = counting_path {
                let out = ResonanceOutput {
                    resonances: rs.clone(),
                    counting,
                    k_estimates,
                };
                write_output(Some(&p), &to_json(&out))?;
            }
        }
        Format::Json => {
            let out = ResonanceOutput {
                resonances: rs,
                counting,
                k_estimates,
            };
            write_output(output.as_deref(), &to_json(&out))?;
        }
    }
    Ok(())
}

pub fn asymptotics_output(c: &Configuration, n_max: usize) -> crate::error::Result<AsymptoticsOutput> {
    let a = analyze(c, n_max)?;
    let note = match c.len() {
        0 => Some("no point interactions: no resonances".to_string()),
        1 => Some(format!("single resonance at k = {}", -4.0 * std::f64::consts::PI * Complex64::i() * c.alpha())),
        _ => None,
    };
    Ok(AsymptoticsOutput {
        v: a.size.value,
        diam: a.diameter,
        ad: a.ad_symbolic.unwrap_or(0.0),
        k: a.k.values,
        weyl: a.weyl,
        assignment: a.size.argmax_permutation,
        canonical: a.canonical,
        note,
    })
}

pub fn cmd_asymptotics(args: &AsymptoticsArgs, file: &RunConfig) -> CliResult<()> {
    let c = load_configuration(&args.input, file)?;
    let n_max = args.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX);
    let out = asymptotics_output(&c, n_max).map_err(classify)?;
    write_output(args.output.as_deref().or(file.output.as_deref()), &to_json(&out))
}

pub fn cmd_sample(args: &SampleArgs, file: &RunConfig) -> CliResult<SampleSet> {
    let kind = match args.kind {
        Some(k) => k,
        None => match file.kind.as_deref() {
            None | Some("uniform_ball") => SamplerChoice::UniformBall,
            Some("mixed_binomial") => SamplerChoice::MixedBinomial,
            Some(other) => return Err(usage(format!("unknown sampler kind {other:?}"))),
        },
    };
    let seed = args
        .seed
        .or(file.seed)
        .ok_or_else(|| usage("missing --seed (sampling is always explicitly seeded)"))?;
    let stream_id = args.stream_id.or(file.stream_id).unwrap_or(0);
    let kind = match kind {
        SamplerChoice::UniformBall => SamplerKind::UniformBall {
            m: args.m.or(file.m).ok_or_else(|| usage("missing --m"))?,
            r: args.r.or(file.r).unwrap_or(1.0),
        },
        SamplerChoice::MixedBinomial => SamplerKind::MixedBinomial {
            mixing: match &args.mixing {
                Some(items) => parse_mixing(items)?,
                None => file.mixing.clone().unwrap_or_else(SamplerConfig::example_mixing),
            },
        },
    };
    let cfg = SamplerConfig { kind, seed, stream_id };
    let s = sample(&cfg).map_err(classify)?;
    write_output(args.output.as_deref().or(file.output.as_deref()), &to_json(&s))?;
    Ok(s)
}

pub fn cmd_experiment(args: &ExperimentArgs, file: &RunConfig) -> CliResult<ExperimentReport> {
    let kind = match args.kind {
        Some(k) => k,
        None => {
            let name = file
                .kind
                .as_deref()
                .ok_or_else(|| usage("missing experiment kind (weyl|kmin|vgrowth|kmax|moments)"))?;
            ExperimentKind::from_str(name, true).map_err(|_| usage(format!("unknown experiment kind {name:?}")))?
        }
    };
    let seed = args
        .seed
        .or(file.seed)
        .ok_or_else(|| usage("missing --seed (experiments are always explicitly seeded)"))?;
    let mut opts = RunOptions {
        workers: args.workers.or(file.workers).unwrap_or(0),
        n_max: args.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX),
        ..RunOptions::default()
    };
    if let Some(tol) = args.ks_tol.or(file.ks_tol) {
        opts.ks_tol = tol;
    }
    if let Some(a) = args.alpha.as_deref().or(file.alpha.as_deref()) {
        opts.alpha = parse_alpha(a)?;
    }
    let r = args.r.or(file.r).unwrap_or(1.0);
    let m = || args.m.or(file.m).ok_or_else(|| usage("missing --m"));
    let trials = |default: usize| args.trials.or(file.trials).unwrap_or(default);
    let report = match kind {
        ExperimentKind::Weyl => run_weyl_experiment(m()?, r, trials(100), seed, &opts),
        ExperimentKind::Kmax => run_kmax_bound_check(m()?, r, trials(100), seed, &opts),
        ExperimentKind::Kmin => run_kmin_experiment(m()?, r, trials(1000), seed, &opts),
        ExperimentKind::Vgrowth => {
            let grid = args.t_grid.clone().or_else(|| file.t_grid.clone()).unwrap_or(vec![0.0, 1.0]);
            run_vgrowth_experiment(m()?, r, trials(500), &grid, seed, &opts)
        }
        ExperimentKind::Moments => {
            let pairs = args.pairs.or(file.pairs).unwrap_or(1_000_000);
            run_moments_experiment(pairs, r, seed, &opts)
        }
    }
    .map_err(classify)?;

    write_output(args.output.as_deref().or(file.output.as_deref()), &report.to_json())?;
    let write_csv = |path: &Path, f: &dyn Fn(&mut Vec<u8>) -> crate::error::Result<()>| -> CliResult<()> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(classify)?;
        fs::write(path, buf).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
    };
    if let Some(p) = args.csv_output.as_deref().or(file.csv_output.as_deref()) {
        write_csv(p, &|b| report.write_trials_csv(b))?;
    }
    if let Some(p) = args.cdf_output.as_deref().or(file.cdf_output.as_deref()) {
        write_csv(p, &|b| report.write_cdf_csv(b))?;
    }
    for v in &report.verdicts {
        eprintln!(
            "{} {}: observed {:.6} target {:?} {:.6} (tol {:.3e})",
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.observed,
            v.relation,
            v.target,
            v.tolerance
        );
    }
    Ok(report)
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let name = match &cli.command {
        Command::Resonances(_) => "resonances",
        Command::Asymptotics(_) => "asymptotics",
        Command::Sample(_) => "sample",
        Command::Experiment(_) => "experiment",
    };
    let result = load_run_config(cli.config.as_deref(), name).and_then(|file| match &cli.command {
        Command::Resonances(a) => cmd_resonances(a, &file),
        Command::Asymptotics(a) => cmd_asymptotics(a, &file),
        Command::Sample(a) => cmd_sample(a, &file).map(|_| ()),
        Command::Experiment(a) => cmd_experiment(a, &file).map(|_| ()),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
