use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tailor_cli::{cmd_apply, cmd_compare, cmd_serve, ApplyFlags, CliError};
use tailor_core::flatten::AsapMode;

#[derive(Parser)]
#[command(name = "tailor", version, about = "Scale-preserving sewing pattern adjustment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay an edit script on a document and save the result.
    Apply {
        doc: PathBuf,
        script: PathBuf,
        out: PathBuf,
        /// Write per-op solver energy traces here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Export the resulting pattern as SVG here.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        asap: AsapMode,
    },
    /// Replay a script and compare scale-preserving and uniform flattening.
    Compare {
        doc: PathBuf,
        script: PathBuf,
        out: PathBuf,
        #[arg(long, default_value = "auto")]
        asap: AsapMode,
    },
    /// Serve an editing session for a document on localhost.
    Serve {
        doc: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Apply {
            doc,
            script,
            out,
            trace,
            svg,
            asap,
        } => {
            let flags = ApplyFlags {
                trace: trace.as_deref(),
                svg: svg.as_deref(),
                asap,
            };
            cmd_apply(&doc, &script, &out, &flags)
        }
        Command::Compare { doc, script, out, asap } => cmd_compare(&doc, &script, &out, asap).map(|_| ()),
        Command::Serve { doc, port } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError {
                code: 1,
                message: e.to_string(),
            })?;
            runtime.block_on(cmd_serve(&doc, port))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code as u8)
        }
    }
}
