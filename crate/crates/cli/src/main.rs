use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use soulcheck_cli::{exit_code, render_json, render_text, report, scan, verify, CliError, Options, SUITES};

#[derive(Parser)]
#[command(
    name = "soulcheck",
    version,
    about = "Numerical checks for the soul inequality of a biquotient normal bundle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base seed; every suite derives its own streams from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the suite's default sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Override the suite's default tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sample-heavy suites. Results do not depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite.
    Verify { id: String },
    /// Random nonnegativity scan with zero-locus classification.
    Scan,
    /// Run every suite with its defaults.
    Report,
    /// List suite ids.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let opts = Options { seed: cli.seed, samples: cli.samples, tol: cli.tol, jobs: cli.jobs };
    let results = match &cli.command {
        Command::Verify { id } => vec![verify(id, &opts)?],
        Command::Scan => vec![scan(&opts)?],
        Command::Report => report(&opts)?,
        Command::List => {
            for s in SUITES {
                println!("{:<17} {}", s.id, s.summary);
            }
            return Ok(0);
        }
    };
    let text = match cli.format {
        Format::Text => render_text(&results),
        Format::Json => render_json(&results)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(exit_code(&results))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
