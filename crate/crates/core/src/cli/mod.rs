//! The `speckle` command line: argument definitions, config-file merging and
//! dispatch. Every command writes a machine-readable record that embeds the
//! toolkit version and the fully resolved arguments.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 partial batch
//! failure.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::distances::DistanceSettings;
use crate::estimators::{
    Bandwidth, KdeSettings, DEFAULT_AMPLITUDE_POINTS, DEFAULT_CUTOFF, DEFAULT_FREQUENCY_MAX,
    DEFAULT_FREQUENCY_POINTS,
};
use crate::ingest::{ImageFormat, RoiSpec, DEFAULT_DYNAMIC_RANGE};
use crate::pipeline::PixelMapping;

pub use config::{merge_config, parse_config};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "speckle", version, about = "Speckle amplitude statistics against the normalized Rayleigh benchmark")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for batch runs.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// File of `key = value` lines used as default flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Draw amplitudes from the phasor-sum simulator.
    Simulate(SimulateArgs),
    /// Four distances between a sample and the benchmark.
    Distances(DistancesArgs),
    /// Maximum-likelihood fits ranked by goodness of fit.
    Fit(FitArgs),
    /// Distances for every row of a path,roi,label manifest.
    Batch(BatchArgs),
    /// Distances over nested centered sub-ROIs.
    RoiSweep(RoiSweepArgs),
    /// Pearson correlation and regression of a two-column CSV.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimModel {
    /// Fixed number of phasors per sample.
    Fixed,
    /// Negative-binomial number of phasors (K-distributed amplitude).
    Negbin,
    /// Benchmark Rayleigh draws.
    Rayleigh,
    /// K-distribution draws with unit mean square.
    K,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: SimModel,
    /// Number of amplitudes.
    #[arg(long)]
    pub n: usize,
    /// Phasor count (fixed) or mean phasor count (negbin).
    #[arg(long)]
    pub scatterers: Option<f64>,
    /// Shape of the negative binomial or K law.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Image (PNG, PGM, CSV matrix) or amplitude CSV with header `amplitude`.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Region of interest `x0,y0,width,height`; required for images.
    #[arg(long)]
    pub roi: Option<RoiSpec>,
    #[command(flatten)]
    pub image: ImageArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ImageArgs {
    /// Decades of dynamic range used when the image was log-compressed.
    #[arg(long, default_value_t = DEFAULT_DYNAMIC_RANGE)]
    pub dynamic_range: f64,
    /// Pixels are linear amplitudes; skip the inverse log transform.
    #[arg(long)]
    pub linear: bool,
    /// Override the format guessed from the file extension.
    #[arg(long)]
    pub image_format: Option<ImageFormat>,
}

impl ImageArgs {
    pub fn mapping(&self) -> PixelMapping {
        if self.linear {
            PixelMapping::Linear
        } else {
            PixelMapping::Log {
                decades: self.dynamic_range,
            }
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Points on the amplitude grid.
    #[arg(long, default_value_t = DEFAULT_AMPLITUDE_POINTS)]
    pub grid_n: usize,
    /// Upper end of the frequency grid.
    #[arg(long, default_value_t = DEFAULT_FREQUENCY_MAX)]
    pub freq_max: f64,
    /// Points on the frequency grid.
    #[arg(long, default_value_t = DEFAULT_FREQUENCY_POINTS)]
    pub freq_n: usize,
    /// Amplitudes below this are excluded from density comparisons.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: f64,
    /// Fixed KDE bandwidth; automatic when absent.
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

impl GridArgs {
    pub fn settings(&self) -> Result<DistanceSettings, CliError> {
        let kde = KdeSettings {
            bandwidth: self.bandwidth.map_or(Bandwidth::Auto, Bandwidth::Fixed),
            boundary_cutoff: self.cutoff,
        };
        kde.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if self.grid_n < 2 || self.freq_n < 2 {
            return Err(CliError::Usage("grid sizes must be at least 2".into()));
        }
        if !(self.freq_max > 0.0 && self.freq_max.is_finite()) {
            return Err(CliError::Usage("--freq-max must be positive".into()));
        }
        Ok(DistanceSettings {
            grid_points: self.grid_n,
            freq_points: self.freq_n,
            freq_max: self.freq_max,
            kde,
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistancesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Family tag or `all`.
    #[arg(long, default_value = "all")]
    pub family: String,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BatchArgs {
    /// CSV with columns path,roi,label; relative paths resolve against the
    /// manifest's directory and roi may be empty for amplitude CSVs.
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub image: ImageArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RoiSweepArgs {
    /// Image file.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Base ROI `x0,y0,width,height`.
    #[arg(long)]
    pub roi: RoiSpec,
    /// Comma-separated area fractions such as `1/16,1/4,1`.
    #[arg(long, default_value = "1/64,1/32,1/16,1/8,1/4,1/2,1")]
    pub fractions: String,
    #[command(flatten)]
    pub image: ImageArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorrelateArgs {
    /// Two numeric columns; a non-numeric first row is taken as a header.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Correlation from another cohort to compare against (Fisher z test).
    #[arg(long, requires = "compare_n")]
    pub compare_r: Option<f64>,
    /// Sample size behind `--compare-r`.
    #[arg(long, requires = "compare_r")]
    pub compare_n: Option<usize>,
}

/// Parses arguments (after config merging) and runs the command, writing
/// results to `stdout` unless `--out` is set. Returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    match commands::execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point used by the `speckle` binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args(), &mut stdout.lock(), &mut stderr.lock())
}
