//! `polycond`: eigenvalue condition numbers of matrix polynomials from the shell.
//!
//! Exit codes: 0 success, 1 a verification found violations, 2 unreadable or
//! malformed input / invalid flags, 3 singular polynomial, 4 numerical failure
//! or undefined quantity, 5 ambiguous eigenvalue match after perturbation.

mod commands;
mod document;
mod error;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "polycond", version, about = "Eigenvalue condition numbers for matrix polynomials")]
struct Cli {
    /// Relative tolerance for the regularity and zero-coefficient tests.
    #[arg(long, global = true, env = "POLYCOND_TOL")]
    tol: Option<f64>,

    /// Significant digits in text and CSV output.
    #[arg(long, global = true, default_value_t = format::DEFAULT_DIGITS)]
    digits: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Condition numbers of every eigenvalue of a polynomial document.
    Analyze(AnalyzeArgs),
    /// Residuals of the exact relations between the condition numbers.
    Verify(VerifyArgs),
    /// Compare formula values with measured eigenvalue displacements.
    Empirical(EmpiricalArgs),
    /// Condition numbers of the two-by-two example pencil across ε, as CSV.
    Sweep(SweepArgs),
    /// Chordal distance and angle between the lines through (a, b) and (c, d).
    Chordal(ChordalArgs),
    /// Write a polynomial document.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum WeightArg {
    Coeff,
    Max,
    Abs,
    Custom,
}

#[derive(Args)]
pub struct WeightOptions {
    /// Perturbation weights; defaults to the document's, else `coeff`.
    #[arg(long, value_enum)]
    weights: Option<WeightArg>,

    /// Comma-separated ω_0..ω_k for `--weights custom`.
    #[arg(long, value_delimiter = ',')]
    weight_values: Option<Vec<f64>>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    #[command(flatten)]
    weights: WeightOptions,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Polynomial document; omit when using `--random`.
    #[arg(required_unless_present = "random")]
    file: Option<PathBuf>,

    /// Verify seeded random polynomials instead: N K SEED.
    #[arg(long, num_args = 3, value_names = ["N", "K", "SEED"], conflicts_with = "file")]
    random: Option<Vec<u64>>,

    /// Number of random polynomials, with seeds SEED, SEED+1, ...
    #[arg(long, default_value_t = 1, requires = "random")]
    count: u64,

    /// Largest acceptable relative residual.
    #[arg(long, default_value_t = 1e-9)]
    max_residual: f64,

    /// Multiply every computed κ_θ by (1 + REL) before checking (negative control).
    #[arg(long, hide = true, value_name = "REL")]
    corrupt_kappa_theta: Option<f64>,

    #[command(flatten)]
    weights: WeightOptions,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TargetArg {
    A,
    R,
    Theta,
}

#[derive(Args)]
pub struct EmpiricalArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "theta")]
    target: TargetArg,
    #[command(flatten)]
    weights: WeightOptions,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1e-6)]
    eps_min: f64,
    #[arg(long, default_value_t = 1e-1)]
    eps_max: f64,
    #[arg(long, default_value_t = 11)]
    points: usize,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write a gnuplot script plotting the CSV (requires --output).
    #[arg(long, requires = "output")]
    gnuplot: Option<PathBuf>,
}

#[derive(Args)]
pub struct ChordalArgs {
    /// Complex literals such as `2`, `-1.5i`, `1+2i`.
    #[arg(allow_hyphen_values = true)]
    a: String,
    #[arg(allow_hyphen_values = true)]
    b: String,
    #[arg(allow_hyphen_values = true)]
    c: String,
    #[arg(allow_hyphen_values = true)]
    d: String,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Random polynomial: N K SEED.
    #[arg(long, num_args = 3, value_names = ["N", "K", "SEED"], required_unless_present = "example")]
    random: Option<Vec<u64>>,
    /// The example pencil at this ε instead.
    #[arg(long, conflicts_with = "random")]
    example: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context::new(cli.tol, cli.digits);
    let result = ctx.and_then(|ctx| match &cli.command {
        Command::Analyze(a) => commands::analyze(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Empirical(a) => commands::empirical(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Chordal(a) => commands::chordal(&ctx, a),
        Command::Generate(a) => commands::generate(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polycond: {e}");
            e.exit_code()
        }
    }
}
