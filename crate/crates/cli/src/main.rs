//! `mact`: color space conversion, error sweeps, minimax regeneration,
//! lookup tables and timing from the command line.

mod commands;
mod error;
mod ppm;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mact", version, about = "Fast color space transforms through minimax approximations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a binary PPM image into a destination color space.
    Convert(ConvertArgs),
    /// Measure a backend's error against the exact transform.
    Errors(ErrorsArgs),
    /// Fraction of inputs reaching each approximated function.
    Probabilities(ProbabilitiesArgs),
    /// Compute a minimax approximant by the Remez exchange.
    Remez(RemezArgs),
    /// Build a lookup table and write it to disk.
    LutBuild(LutBuildArgs),
    /// Measure lookup-table interpolation errors.
    LutErrors(LutErrorsArgs),
    /// Time a backend against the exact transform.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    #[value(alias = "lab")]
    Cielab,
    Hsi,
    Sct,
}

impl From<SpaceArg> for mact::Space {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::Cielab => mact::Space::Lab,
            SpaceArg::Hsi => mact::Space::Hsi,
            SpaceArg::Sct => mact::Space::Sct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Markdown,
    Ppm,
    BinaryF64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Standard,
    Caching,
}

impl From<VariantArg> for mact::lut::Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => mact::lut::Variant::Standard,
            VariantArg::Caching => mact::lut::Variant::Caching,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PopulationArg {
    Cube,
    Subsample,
}

/// `exact`, `mact` or `lut:<method>:<grid>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BackendSpec {
    Exact,
    Mact,
    Lut { method: mact::lut::Method, grid: usize },
}

fn parse_backend(s: &str) -> Result<BackendSpec, String> {
    match s {
        "exact" => Ok(BackendSpec::Exact),
        "mact" | "fast" => Ok(BackendSpec::Mact),
        _ => {
            let parts: Vec<&str> = s.split(':').collect();
            let ["lut", method, grid] = parts[..] else {
                return Err("expected exact, mact or lut:<method>:<grid>".into());
            };
            let method = mact::lut::Method::from_name(method)
                .ok_or_else(|| format!("unknown method {method:?}; use trilinear, prism, pyramidal or tetrahedral"))?;
            let grid: usize = grid.parse().map_err(|_| format!("bad grid size {grid:?}"))?;
            if !mact::lut::SUPPORTED_GRIDS.contains(&grid) {
                return Err(format!("grid size {grid} is not one of 9, 17, 33"));
            }
            Ok(BackendSpec::Lut { method, grid })
        }
    }
}

/// Comma-separated approximant degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Degrees(Vec<usize>);

fn parse_degrees(s: &str) -> Result<Degrees, String> {
    s.split(',')
        .map(|d| d.trim().parse().map_err(|_| format!("bad degree {d:?}")))
        .collect::<Result<_, _>>()
        .map(Degrees)
}

/// Accepts plain integers and float notation such as `1e6`.
fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 1.0 && v.fract() == 0.0 && v <= 16_777_216.0 => Ok(v as usize),
        _ => Err(format!("bad count {s:?}")),
    }
}

#[derive(Debug, Args)]
struct BackendArgs {
    /// Destination color space.
    #[arg(long, value_enum, default_value = "cielab")]
    space: SpaceArg,
    /// Transform backend: exact, mact or lut:<method>:<grid>.
    #[arg(long, value_parser = parse_backend, default_value = "mact")]
    backend: BackendSpec,
    /// Approximant degrees: `n,m` for cielab, `n` for hsi, `n,m,r` for sct.
    #[arg(long, value_parser = parse_degrees)]
    degrees: Option<Degrees>,
    /// Load the lookup table from a file written by `lut-build` instead of
    /// building it.
    #[arg(long)]
    lut: Option<PathBuf>,
    /// Lookup-table evaluation variant.
    #[arg(long, value_enum, default_value = "standard")]
    variant: VariantArg,
}

#[derive(Debug, Args)]
struct PopulationArgs {
    /// Input population [default: cube].
    #[arg(long, value_enum)]
    population: Option<PopulationArg>,
    /// Measure a uniform random subsample of this many distinct colors. The
    /// result is flagged as non-certifying.
    #[arg(long, value_parser = parse_count)]
    subsample: Option<usize>,
    /// Subsample seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// Input binary PPM (P6, maxval 255).
    #[arg(long, short)]
    input: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendArgs,
    /// Output format: csv, binary-f64 (little-endian triples) or ppm.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write a PPM preview with each channel rescaled to 0..255.
    #[arg(long, conflicts_with = "format")]
    visualize: bool,
}

#[derive(Debug, Args)]
struct ErrorsArgs {
    #[command(flatten)]
    backend: BackendArgs,
    #[command(flatten)]
    population: PopulationArgs,
    /// Output format: csv or markdown.
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProbabilitiesArgs {
    #[command(flatten)]
    population: PopulationArgs,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RemezArgs {
    /// Target: cbrt, atan-sqrt3, asin-half, acos-half, atan-f or atan-g.
    #[arg(long = "fn")]
    target: String,
    /// Approximation interval; defaults to the target's standard interval.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    interval: Option<Vec<f64>>,
    /// Numerator degree.
    #[arg(long)]
    n: usize,
    /// Denominator degree; 0 gives a polynomial.
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = mact::remez::DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
    #[arg(long, default_value_t = mact::remez::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LutBuildArgs {
    #[arg(long, value_enum, default_value = "cielab")]
    space: SpaceArg,
    /// Lattice points per axis: 9, 17 or 33.
    #[arg(long, default_value_t = 33)]
    grid: usize,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct LutErrorsArgs {
    #[arg(long, value_enum, default_value = "cielab")]
    space: SpaceArg,
    /// Grid sizes to build; ignored with `--lut`.
    #[arg(long, value_delimiter = ',', default_value = "9,17,33")]
    grids: Vec<usize>,
    /// Interpolation methods.
    #[arg(long, value_delimiter = ',', default_value = "trilinear,prism,pyramidal,tetrahedral")]
    methods: Vec<String>,
    /// Measure a table read from disk instead of building tables.
    #[arg(long)]
    lut: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "standard")]
    variant: VariantArg,
    #[command(flatten)]
    population: PopulationArgs,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Spaces to time.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cielab,hsi,sct")]
    spaces: Vec<SpaceArg>,
    /// Candidate backend timed against exact.
    #[arg(long, value_parser = parse_backend, default_value = "mact")]
    backend: BackendSpec,
    /// Approximant degrees, applied to every timed space (see `errors`).
    #[arg(long, value_parser = parse_degrees)]
    degrees: Option<Degrees>,
    #[arg(long, value_enum, default_value = "standard")]
    variant: VariantArg,
    /// Timed passes per image and backend.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Edge lengths of the synthetic corpus images.
    #[arg(long, value_delimiter = ',', default_value = "512,1024,2048")]
    sizes: Vec<usize>,
    /// Synthetic corpus seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Time these PPM images instead of a synthetic corpus.
    #[arg(long, num_args = 1..)]
    images: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convert(a) => commands::convert(a),
        Command::Errors(a) => commands::errors(a),
        Command::Probabilities(a) => commands::probabilities(a),
        Command::Remez(a) => commands::remez(a),
        Command::LutBuild(a) => commands::lut_build(a),
        Command::LutErrors(a) => commands::lut_errors(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mact: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
