//! Batch front end for `gmtkit-core`: file formats, JSON/CSV reports and SVG
//! plots. Every number in a report comes from a library call with the same
//! parameters.

pub mod commands;
pub mod error;
pub mod formats;
pub mod plot;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "gmtkit", version, about = "Measure-theoretic numerics in batch")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Directory for the report, extra files and plots. Without it the
    /// report goes to stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every random choice (batteries, sample pairs, fields).
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value_t = PlotMode::None)]
    pub plot: PlotMode,
    /// Leave the timestamp out of the JSON report.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotMode {
    None,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kernel {
    Standard,
    Ball,
}

/// `a..b`, inclusive: dyadic scales `2^-a, ..., 2^-b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleRange {
    pub lo: i32,
    pub hi: i32,
}

impl FromStr for ScaleRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got `{s}`"))?;
        let lo = a.trim().parse().map_err(|_| format!("bad scale exponent `{a}`"))?;
        let hi = b.trim().parse().map_err(|_| format!("bad scale exponent `{b}`"))?;
        if hi <= lo {
            return Err(format!("scale range `{s}` must increase"));
        }
        Ok(ScaleRange { lo, hi })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total variation, Jordan/Hahn and Radon–Nikodym for an atomic measure.
    Measure {
        /// Measure JSON.
        #[arg(long)]
        input: PathBuf,
        /// Reference measure for the Radon–Nikodym split.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Comma-separated atom ids.
        #[arg(long)]
        subset: Option<String>,
    },
    /// Box-counting dimension of an IFS attractor or a point cloud.
    Dim {
        /// IFS JSON.
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        ifs: Option<PathBuf>,
        /// Point cloud CSV.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "3..10")]
        scales: ScaleRange,
        /// IFS generation depth.
        #[arg(long)]
        depth: Option<usize>,
        /// Also report the s-dimensional premeasure at every scale.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Lebesgue density of a raster set at a point.
    Density {
        /// Raster CSV.
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Radii `2^-a, ..., 2^-b`.
        #[arg(long, conflicts_with = "radii", required_unless_present = "radii")]
        scales: Option<ScaleRange>,
        /// Comma-separated decreasing radii.
        #[arg(long)]
        radii: Option<String>,
    },
    /// Mollify a grid function; writes mollified.csv.
    Mollify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Kernel::Standard)]
        kernel: Kernel,
    },
    /// Weak partial derivative against a test-function battery.
    Weakdiff {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        axis: usize,
        /// Battery JSON; seeded from --seed when absent.
        #[arg(long)]
        battery: Option<PathBuf>,
        /// Grid to test as the derivative.
        #[arg(long)]
        candidate: Option<PathBuf>,
    },
    /// Sobolev norms and the embedding check of the regime of p.
    Sobolev {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        /// Dyadic cube generations for the BMO check.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Sample pairs for the Morrey check.
        #[arg(long, default_value_t = 200)]
        pairs: usize,
    },
    /// Variation and BV norm; 1D grids are also decomposed.
    Bv {
        #[arg(long)]
        input: PathBuf,
        /// gradient-integral, coarea or divergence-sup.
        #[arg(long, default_value = "gradient-integral")]
        method: String,
        /// Jump threshold for the 1D decomposition.
        #[arg(long, default_value_t = gmtkit_core::sobolev_bv::DEFAULT_JUMP_THRESHOLD)]
        threshold: f64,
    },
    /// Length, area and multiplicity integrals of a built-in map.
    Area {
        /// helix, circle, polar, sphere, fold, square, sine or identity.
        #[arg(long)]
        map: String,
        /// Parameter box `a,b` or `a1,b1,a2,b2`.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// JSON object with laps, height, omega, r_max.
        #[arg(long)]
        params: Option<String>,
        /// Quadrature cells per parameter axis.
        #[arg(long)]
        cells: Option<usize>,
        /// y-grid points per target axis.
        #[arg(long)]
        y_grid: Option<usize>,
        /// Lipschitz constant for the bound `∫N ≤ Lip^k Λ^k(E)`.
        #[arg(long)]
        lip: Option<f64>,
        /// Deepest multiplicity refinement.
        #[arg(long)]
        depth: Option<u32>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Measure { .. } => "measure",
            Command::Dim { .. } => "dim",
            Command::Density { .. } => "density",
            Command::Mollify { .. } => "mollify",
            Command::Weakdiff { .. } => "weakdiff",
            Command::Sobolev { .. } => "sobolev",
            Command::Bv { .. } => "bv",
            Command::Area { .. } => "area",
        }
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(cli: &Cli, report: &Report) -> CliResult<()> {
    let g = &cli.global;
    let svg = match g.plot {
        PlotMode::None => None,
        PlotMode::Svg => {
            let series = report
                .series
                .as_ref()
                .ok_or_else(|| CliError::Usage(format!("`{}` report has no plottable series", report.command)))?;
            Some(plot::render(series, report.command)?)
        }
    };
    let timestamp = (!g.no_timestamp)
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    let (text, name) = match g.format {
        Format::Json => (report.to_json(g.seed, timestamp), "report.json"),
        Format::Csv => (report.to_csv(), "report.csv"),
    };
    match &g.output {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
            write_file(&dir.join(name), &text)?;
            for (file, contents) in &report.files {
                write_file(&dir.join(file), contents)?;
            }
            if let Some(svg) = svg {
                write_file(&dir.join("plot.svg"), &svg)?;
            }
        }
        None => {
            if svg.is_some() || !report.files.is_empty() {
                return Err(CliError::Usage(format!("`{}` writes files; pass --output DIR", report.command)));
            }
            print!("{text}");
        }
    }
    Ok(())
}

pub fn run(cli: &Cli) -> ExitCode {
    match commands::execute(&cli.command, cli.global.seed).and_then(|r| emit(cli, &r)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

/// Error JSON on stdout, a one-line message on stderr.
pub fn fail(e: &CliError) -> ExitCode {
    println!("{}", serde_json::to_string_pretty(&e.to_json()).expect("error serializes"));
    eprintln!("gmtkit: {e}");
    ExitCode::from(e.exit_code())
}
