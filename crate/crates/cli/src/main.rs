//! `mingeo`: distances, geodesics and minimal curves on matrix manifolds.
//!
//! Exit codes: 0 success, 1 a check failed or a curve was refuted, 2 the
//! input could not be parsed or validated, 3 the inputs are well formed but
//! violate a geometric precondition.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mingeo_core::minimal::PerturbationMode;
use mingeo_core::{GeoError, SchattenIndex, SpaceTag};

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Geo(GeoError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Geo(e) if e.is_precondition() => 3,
            CliError::Geo(_) => 2,
        }
    }
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        CliError::Geo(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "PARSE_ERROR: {msg}"),
            CliError::Geo(e) => write!(f, "{}: {e}", e.code()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "mingeo",
    version,
    about = "Finsler distances, geodesics and minimal curves on matrix manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two points.
    Dist {
        #[arg(long, value_parser = parse_space)]
        space: SpaceTag,
        #[arg(long, short, value_parser = parse_norm, default_value = "inf")]
        p: SchattenIndex,
        a: PathBuf,
        b: PathBuf,
    },
    /// Sampled geodesic between two points.
    Geodesic {
        #[arg(long, value_parser = parse_space)]
        space: SpaceTag,
        /// Norm index under which the length is recorded.
        #[arg(long, short, value_parser = parse_norm, default_value = "inf")]
        p: SchattenIndex,
        #[arg(long, default_value_t = mingeo_core::curves::OUTPUT_STEPS)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        a: PathBuf,
        b: PathBuf,
    },
    /// A seeded member of a family of minimal curves.
    Family(FamilyArgs),
    /// Checks curves and pairs, or runs the full battery.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
    /// Tests geodesic convexity of the intermediate set between two points.
    Midpoints {
        #[arg(long, value_parser = parse_space)]
        space: SpaceTag,
        #[arg(long, short, value_parser = parse_norm, default_value = "inf")]
        p: SchattenIndex,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 8)]
        pairs: usize,
        #[arg(long)]
        seed: u64,
        a: PathBuf,
        b: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long, value_parser = parse_space)]
    pub space: SpaceTag,
    /// Target (the curve starts at the base point of the space) or a pair
    /// of endpoints.
    #[arg(num_args = 1..=2, required = true)]
    pub points: Vec<PathBuf>,
    #[arg(long, value_parser = parse_mode, default_value = "detour")]
    pub mode: PerturbationMode,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub detour_scale: f64,
    /// Number of linear segments of a trace-norm family member.
    #[arg(long, default_value_t = 4)]
    pub segments: usize,
    /// Comma-separated ±1 signs for the `±π` eigenvalues of an antipodal
    /// target.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub signs: Option<Vec<i8>>,
    #[arg(long, default_value_t = mingeo_core::curves::OUTPUT_STEPS)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Trace-norm minimality test for a Hermitian curve starting at 0.
    Minimality {
        curve: PathBuf,
        #[arg(long, default_value_t = mingeo_core::minimal::DEFAULT_ENDPOINT_TOLERANCE)]
        tolerance: f64,
    },
    /// Whether exactly one minimal curve joins two points.
    Unique {
        #[arg(long, value_parser = parse_space)]
        space: SpaceTag,
        a: PathBuf,
        b: PathBuf,
    },
    /// Monotonicity of the eigenvalue (or phase) curves of a curve.
    Eigencurves { curve: PathBuf },
    /// Monotonicity of the diagonal entries of a Hermitian curve with
    /// diagonal endpoint.
    Diagonal { curve: PathBuf },
    /// The full named battery.
    Report {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_space(s: &str) -> Result<SpaceTag, String> {
    s.parse().map_err(|e: GeoError| e.to_string())
}

fn parse_norm(s: &str) -> Result<SchattenIndex, String> {
    s.parse().map_err(|e: GeoError| e.to_string())
}

fn parse_mode(s: &str) -> Result<PerturbationMode, String> {
    s.parse().map_err(|e: GeoError| e.to_string())
}

/// Multiplier for every pass tolerance, from `MINGEO_TOLERANCE_SCALE`.
fn tolerance_scale() -> Result<f64, CliError> {
    match std::env::var("MINGEO_TOLERANCE_SCALE") {
        Err(_) => Ok(1.0),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
            _ => Err(CliError::Parse(format!(
                "MINGEO_TOLERANCE_SCALE must be a positive number, got '{v}'"
            ))),
        },
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let scale = tolerance_scale()?;
    match cli.command {
        Command::Dist { space, p, a, b } => commands::dist(space, p, &a, &b),
        Command::Geodesic {
            space,
            p,
            samples,
            out,
            a,
            b,
        } => commands::geodesic(space, p, samples, &a, &b, out.as_deref()),
        Command::Family(args) => commands::family(&args),
        Command::Verify { command } => match command {
            VerifyCommand::Minimality { curve, tolerance } => commands::verify_minimality(&curve, tolerance * scale),
            VerifyCommand::Unique { space, a, b } => commands::verify_unique(space, &a, &b),
            VerifyCommand::Eigencurves { curve } => commands::verify_eigencurves(&curve, scale),
            VerifyCommand::Diagonal { curve } => commands::verify_diagonal(&curve, scale),
            VerifyCommand::Report { seed, max_dim, out } => {
                commands::verify_report(seed, max_dim, scale, out.as_deref())
            }
        },
        Command::Midpoints {
            space,
            p,
            t,
            pairs,
            seed,
            a,
            b,
        } => commands::midpoints(space, p, t, pairs, seed, &a, &b, scale),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
