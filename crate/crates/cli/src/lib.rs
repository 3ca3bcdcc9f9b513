//! Argument handling and dispatch for the `mvcs` binary.
//!
//! Exit codes: `0` success, `1` data or validation error, `2` usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mvcs::json::{num, to_pretty};
use mvcs::scoring::config_json;
use mvcs::{
    corrupt_dataset, detect_noisy_view, generate_synthetic, hopkins_dataset, load_dataset,
    perturbation_profile, save_dataset, score_dataset, CorruptionSpec, MvcsError, NoiseMode,
    ScoreConfig, SynthSpec,
};
use serde_json::{json, Value};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "MVCS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mvcs", version, about = "Multi-view clusterability scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a dataset and print the full report.
    Score(ManifestArgs),
    /// Drop each view in turn and report the noisy-view candidates.
    Detect(ManifestArgs),
    /// Score every view dropped, permuted and conflict-corrupted.
    Profile(ManifestArgs),
    /// Write a copy of a dataset with some views corrupted.
    Corrupt(CorruptArgs),
    /// Write a synthetic multi-view Gaussian-blob dataset.
    Synth(SynthArgs),
    /// Hopkins statistic of the concatenated standardized views.
    Hopkins(HopkinsArgs),
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Sensitivity of the bandwidth-to-score transform
    #[arg(long, default_value_t = ScoreConfig::DEFAULT_TAU)]
    tau: f64,
    /// Neighbor count for cross-view consistency
    #[arg(long, default_value_t = ScoreConfig::DEFAULT_K)]
    k: usize,
    /// Weight of the per-view component
    #[arg(long, default_value_t = ScoreConfig::DEFAULT_ALPHA)]
    alpha: f64,
    /// Weight of the joint-space component
    #[arg(long, default_value_t = ScoreConfig::DEFAULT_BETA)]
    beta: f64,
    /// Weight of the neighborhood component
    #[arg(long, default_value_t = ScoreConfig::DEFAULT_GAMMA)]
    gamma: f64,
    /// Scale of the final calibration
    #[arg(long, default_value_t = ScoreConfig::DEFAULT_ETA)]
    eta: f64,
    /// KDE evaluation grid size
    #[arg(long = "grid-points", default_value_t = ScoreConfig::DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Relative tolerance of the critical-bandwidth bisection
    #[arg(long, default_value_t = ScoreConfig::DEFAULT_BISECT_REL_TOL)]
    tol: f64,
    /// Seed for every randomized step
    #[arg(long, default_value_t = ScoreConfig::DEFAULT_SEED)]
    seed: u64,
}

impl ConfigArgs {
    fn config(&self) -> ScoreConfig {
        ScoreConfig {
            tau: self.tau,
            k: self.k,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            eta: self.eta,
            grid_points: self.grid_points,
            bisect_rel_tol: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
struct ManifestArgs {
    /// Dataset manifest (JSON)
    manifest: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Per,
    Con,
}

impl From<ModeArg> for NoiseMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Per => NoiseMode::Per,
            ModeArg::Con => NoiseMode::Con,
        }
    }
}

#[derive(Debug, Args)]
struct CorruptArgs {
    /// Dataset manifest (JSON)
    manifest: PathBuf,
    /// Views to corrupt, 1-based, comma separated
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_view)]
    views: Vec<usize>,
    /// Noise type
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Noise seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the corrupted manifest and CSVs
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    /// Write the summary JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_view(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("views are numbered from 1".into()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("{s:?} is not a view number")),
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Instances
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Views
    #[arg(long, default_value_t = 3)]
    v: usize,
    /// Clusters shared by all views
    #[arg(long, default_value_t = 4)]
    clusters: usize,
    /// Features per view, one value for all views or one per view
    #[arg(long, value_delimiter = ',', default_value = "10")]
    dims: Vec<usize>,
    /// Distance between the closest cluster centers
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    /// Within-cluster standard deviation of every feature
    #[arg(long, default_value_t = SynthSpec::DEFAULT_NOISE)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the manifest and CSVs
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    /// Write the summary JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HopkinsArgs {
    /// Dataset manifest (JSON)
    manifest: PathBuf,
    /// Probe count (default: N/10 clamped to [1, 100])
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(MvcsError),
}

impl From<MvcsError> for Failure {
    fn from(e: MvcsError) -> Self {
        Failure::Data(e)
    }
}

/// Runs the CLI against the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI; `argv[0]` is the program name.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return 2;
    }
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    #[cfg(feature = "parallel")]
    {
        // A pool may already exist when run() is called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let (value, target) = match command {
        Command::Score(a) => {
            let cfg = a.config.config();
            let ds = load_dataset(&a.manifest)?;
            (score_dataset(&ds, &cfg)?.to_json(), a.out)
        }
        Command::Detect(a) => {
            let cfg = a.config.config();
            cfg.validate()?;
            let ds = load_dataset(&a.manifest)?;
            let mut v = detect_noisy_view(&ds, &cfg)?.to_json();
            v["config_echo"] = config_json(&cfg);
            (v, a.out)
        }
        Command::Profile(a) => {
            let cfg = a.config.config();
            cfg.validate()?;
            let ds = load_dataset(&a.manifest)?;
            let mut v = perturbation_profile(&ds, &cfg, cfg.seed)?.to_json();
            v["config_echo"] = config_json(&cfg);
            (v, a.out)
        }
        Command::Corrupt(a) => {
            let ds = load_dataset(&a.manifest)?;
            if let Some(&v) = a.views.iter().find(|&&v| v > ds.n_views()) {
                return Err(Failure::Data(MvcsError::InvalidSelection(format!(
                    "--views {v} is out of range for {} views",
                    ds.n_views()
                ))));
            }
            let spec = CorruptionSpec {
                target_views: a.views.iter().map(|&v| v - 1).collect(),
                mode: a.mode.into(),
                seed: a.seed,
            };
            let noisy = corrupt_dataset(&ds, &spec)?;
            let provenance = spec.provenance(&ds);
            let path = save_dataset(&noisy, &a.out_dir, Some(provenance.clone()))?;
            (summary(&path, provenance), a.out)
        }
        Command::Synth(a) => {
            let mut spec = SynthSpec::new(a.n, a.v, a.clusters, a.dims, a.separation, a.seed);
            spec.noise = a.noise;
            let ds = generate_synthetic(&spec)?;
            let provenance = spec.provenance();
            let path = save_dataset(&ds, &a.out_dir, Some(provenance.clone()))?;
            (summary(&path, provenance), a.out)
        }
        Command::Hopkins(a) => {
            if a.m == Some(0) {
                return Err(Failure::Usage("--m must be at least 1".into()));
            }
            let ds = load_dataset(&a.manifest)?;
            let h = hopkins_dataset(&ds, a.m, a.seed)?;
            let v = json!({
                "value": num(h.value),
                "m": h.m,
                "seed": h.seed,
                "sum_u": num(h.sum_u),
                "sum_w": num(h.sum_w),
            });
            (v, a.out)
        }
    };
    emit(&value, target.as_deref(), out)
}

fn summary(manifest: &Path, provenance: Value) -> Value {
    json!({
        "manifest": manifest.display().to_string(),
        "provenance": provenance,
    })
}

fn emit(value: &Value, target: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let text = to_pretty(value);
    match target {
        Some(path) => fs::write(path, text).map_err(|source| {
            Failure::Data(MvcsError::Io {
                path: path.to_path_buf(),
                source,
            })
        }),
        None => out.write_all(text.as_bytes()).map_err(|source| {
            Failure::Data(MvcsError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }),
    }
}
