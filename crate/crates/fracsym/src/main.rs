use clap::{Parser, Subcommand};
use fracsym::cli::{self, Command as RunCommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Invariant solutions of time-fractional diffusion-wave equations:
/// classify coefficient families, evaluate solutions, verify residuals.
#[derive(Parser)]
#[command(name = "fracsym", version, about)]
struct Args {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Classify sampled (omega, c) data into a coefficient family
    Classify(CommonArgs),
    /// Evaluate a solution on a grid and write CSV
    Eval(CommonArgs),
    /// Run a residual or invariant-surface verification
    Verify(CommonArgs),
    /// Compare the general form against its classical limit
    Reduce(CommonArgs),
    /// Dump the generator list of a case
    Export(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the key-value config file
    #[arg(long)]
    config: PathBuf,
    /// Output path (overrides output.path from the config)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    cli::init_threads_from_env();
    let args = Args::parse();
    let (command, common) = match &args.command {
        CliCommand::Classify(c) => (RunCommand::Classify, c),
        CliCommand::Eval(c) => (RunCommand::Eval, c),
        CliCommand::Verify(c) => (RunCommand::Verify, c),
        CliCommand::Reduce(c) => (RunCommand::Reduce, c),
        CliCommand::Export(c) => (RunCommand::Export, c),
    };
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("fracsym: cannot read config {}: {e}", common.config.display());
            return ExitCode::from(2);
        }
    };
    let config = match cli::parse_config(command, &text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("fracsym: {e}");
            return ExitCode::from(2);
        }
    };
    match cli::run(&config, common.out.as_deref()) {
        Ok(output) => {
            print!("{}", output.stdout);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fracsym: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
