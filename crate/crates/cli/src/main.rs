use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdilate::Tolerance;
use qdilate_cli::commands::{self, Response, XiChoice};
use qdilate_cli::CliError;

#[derive(Parser)]
#[command(name = "qdilate", version, about = "Dilations and measurement models for discrete quantum instruments")]
struct Cli {
    /// Residual tolerance.
    #[arg(long, global = true, env = "QDILATE_TOL_RESIDUAL", default_value_t = Tolerance::DEFAULT_RESIDUAL)]
    tol_residual: f64,
    /// Relative rank cutoff.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_RANK)]
    tol_rank: f64,
    /// Write the result document here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigen-decompose the effects of a POVM.
    Decompose { povm: PathBuf },
    /// Build the minimal Stinespring dilation of an instrument.
    Dilate { instrument: PathBuf },
    /// Extend a dilation to a measurement model.
    Extend {
        dilation: PathBuf,
        /// `auto`, a pointer basis index, or a path to a xi document.
        #[arg(long, default_value = "auto")]
        xi: String,
        /// Add a sink outcome to the apparatus.
        #[arg(long)]
        augment: bool,
    },
    /// Check a model against an instrument.
    Verify { model: PathBuf, instrument: PathBuf },
    /// Sample outcomes of a model on a state.
    Simulate {
        model: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide unitary extendability of a symbolic case.
    Decide { symbolic: PathBuf },
}

fn run(cli: &Cli) -> Result<Response, CliError> {
    let tol = Tolerance::new(cli.tol_residual, cli.tol_rank)?;
    match &cli.command {
        Command::Decompose { povm } => commands::decompose(povm, tol),
        Command::Dilate { instrument } => commands::dilate(instrument, tol),
        Command::Extend { dilation, xi, augment } => commands::extend(dilation, &XiChoice::parse(xi), *augment, tol),
        Command::Verify { model, instrument } => commands::verify(model, instrument, tol),
        Command::Simulate {
            model,
            state,
            shots,
            seed,
        } => commands::simulate(model, state, *shots, *seed, tol),
        Command::Decide { symbolic } => commands::decide(symbolic),
    }
}

fn emit(cli: &Cli, document: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, document).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(document.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "standard output".into(),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|resp| emit(&cli, &resp.document).map(|_| resp));
    match result {
        Ok(resp) => {
            eprintln!("{}", resp.summary);
            ExitCode::from(resp.exit_code as u8)
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
