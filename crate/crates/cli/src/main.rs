use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod report;

use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "gaborlike",
    version,
    about = "Gabor-like filters from Gaussians on logarithmic frequency axes"
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize one filter: weights, complex filter and D = 2 images.
    Filter(FilterArgs),
    /// Build a filter bank from a JSON config.
    Bank(BankArgs),
    /// Sum the frequency coverage of a bank and measure the identity residual.
    Coverage(CoverageArgs),
    /// Apply a bank directory to a signal.
    Apply(ApplyArgs),
    /// Run the invariant suite; exits 1 if any check fails.
    Check(CheckArgs),
}

#[derive(clap::Args, Debug)]
pub struct FilterArgs {
    /// JSON file with n, d, mu, sigma; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Center as comma-separated reals, e.g. 20,20.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    /// Scale re and im to unit energy.
    #[arg(long)]
    normalize: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct BankArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct CoverageArgs {
    #[arg(long)]
    config: PathBuf,
    /// Use the full-circle layout even if the config does not ask for it.
    #[arg(long)]
    full_circle: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Circular,
    Padded,
}

#[derive(clap::Args, Debug)]
pub struct ApplyArgs {
    /// Directory written by `bank`.
    #[arg(long)]
    bank: PathBuf,
    /// Signal as an LGFB1 tensor or a binary PGM image.
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, value_enum, default_value = "circular")]
    mode: ModeArg,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct CheckArgs {}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (report, ok) = match cli.command {
        Command::Filter(a) => (commands::filter(a)?, true),
        Command::Bank(a) => (commands::bank(a)?, true),
        Command::Coverage(a) => (commands::coverage(a)?, true),
        Command::Apply(a) => (commands::apply(a)?, true),
        Command::Check(_) => commands::check()?,
    };
    report::emit(&report, cli.report.as_deref())?;
    Ok(ok)
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
