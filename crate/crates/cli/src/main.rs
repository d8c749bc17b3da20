mod commands;
mod model;
mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Invalid(_) => 3,
        }
    }
}

impl From<qwire_core::Error> for CliError {
    fn from(e: qwire_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FluxSource {
    /// The unitary section if present, otherwise the potential.
    Auto,
    Unitary,
    Potential,
}

/// Boundary conditions, isotropy groups and magnetic fluxes on metric graphs.
///
/// MODEL arguments are JSON model files; `-` reads standard input.
#[derive(Debug, Parser)]
#[command(name = "qwire", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, default_value = "1e-10", global = true)]
    tol_rank: f64,
    /// Tolerance for subspace, matrix and phase equality.
    #[arg(long, default_value = "1e-9", global = true)]
    tol_eq: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Self-adjointness and locality of the boundary conditions.
    Check { model: PathBuf },
    /// Identity component of the isotropy group; membership of the model's
    /// unitary if it has one.
    Isotropy { model: PathBuf },
    /// Cycle basis and spanning tree of the internal graph.
    Homology { model: PathBuf },
    /// Fluxes through the basis cycles.
    Flux {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        source: FluxSource,
    },
    /// A unitary with the given fluxes, written back into the model.
    Realize {
        model: PathBuf,
        /// Target phases, one per basis cycle, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        targets: Vec<f64>,
    },
    /// Whether two models define the same operator.
    Equal { first: PathBuf, second: PathBuf },
    /// Eigenvalues `k²` with `0 < k ≤ kmax` of a compact graph.
    Spectrum {
        model: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        kmax: f64,
        #[arg(long, default_value_t = 0.01)]
        grid: f64,
    },
}

fn read_input(path: &PathBuf) -> Result<(String, String), CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Parse(format!("<stdin>: {e}")))?;
        return Ok((s, "<stdin>".into()));
    }
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{name}: {e}")))?;
    Ok((text, name))
}

fn load(path: &PathBuf) -> Result<model::Model, CliError> {
    let (text, origin) = read_input(path)?;
    model::parse(&text, &origin)?.resolve()
}

fn run(cli: Cli) -> Result<String, CliError> {
    let tol = model::tolerances(cli.tol_rank, cli.tol_eq)?;
    let fmt = cli.format;
    match cli.command {
        Command::Check { model } => commands::check(&load(&model)?, &tol, fmt),
        Command::Isotropy { model } => commands::isotropy(&load(&model)?, &tol, fmt),
        Command::Homology { model } => commands::homology(&load(&model)?, fmt),
        Command::Flux { model, source } => commands::flux(&load(&model)?, source, fmt),
        Command::Realize { model, targets } => commands::realize(load(&model)?, &targets, fmt),
        Command::Equal { first, second } => {
            if first.as_os_str() == "-" && second.as_os_str() == "-" {
                return Err(CliError::Usage("only one model can be read from stdin".into()));
            }
            commands::equal(&load(&first)?, &load(&second)?, &tol, fmt)
        }
        Command::Spectrum { model, kmax, grid } => commands::spectrum(&load(&model)?, kmax, grid, fmt),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qwire: {e}");
            ExitCode::from(e.code())
        }
    }
}
