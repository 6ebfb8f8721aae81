//! `torelli`: JSON front end for the lattice, period-domain, wall, LLV and
//! Čech toolkits.
//!
//! Every subcommand reads one JSON object and prints
//! `{"ok": …, "result": …, "diagnostics": …}`. Exit codes: 0 success,
//! 1 domain or validation error, 2 numerical failure, 3 usage error.

mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::Value;

use commands::Command;
use config::{Config, ConfigFile};
use io::{CliError, Reply};

#[derive(Debug, Parser)]
#[command(
    name = "torelli",
    version,
    about = "Lattice, period-domain and LLV computations with JSON I/O"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Default configuration (JSON with tol_*, seed, workers)
    #[arg(long, global = true, env = "TORELLI_CONFIG")]
    config: Option<PathBuf>,
    /// Seed for sampling commands
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "tol-iso", global = true)]
    tol_iso: Option<f64>,
    #[arg(long = "tol-orth", global = true)]
    tol_orth: Option<f64>,
    #[arg(long = "tol-pos", global = true)]
    tol_pos: Option<f64>,
    #[arg(long = "tol-lie", global = true)]
    tol_lie: Option<f64>,
    #[arg(long = "tol-wall", global = true)]
    tol_wall: Option<f64>,
    /// Worker threads for enumeration and closure
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Also write the output object to this file
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Single-line output
    #[arg(long, global = true)]
    compact: bool,
}

impl Cli {
    fn config(&self) -> Result<Config, CliError> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            tol_iso: self.tol_iso,
            tol_orth: self.tol_orth,
            tol_pos: self.tol_pos,
            tol_lie: self.tol_lie,
            tol_wall: self.tol_wall,
            seed: self.seed,
            workers: self.workers,
        };
        Config::resolve(file.merge(flags))
    }

    fn execute(&self) -> Result<Reply, CliError> {
        let cfg = self.config()?;
        let args = self.command.input();
        let input = io::read_input(args.input.as_deref(), args.json.as_deref())?;
        self.command.run(&input, &cfg)
    }
}

fn render(body: &Value, compact: bool) -> String {
    let mut s = if compact {
        serde_json::to_string(body)
    } else {
        serde_json::to_string_pretty(body)
    }
    .expect("JSON values always serialize");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            let err = CliError::Usage(e.kind().to_string());
            print!("{}", render(&err.envelope(), false));
            return ExitCode::from(3);
        }
    };
    let (body, code) = match cli.execute() {
        Ok(reply) => (reply.body, reply.code),
        Err(e) => (e.envelope(), e.exit_code()),
    };
    let text = render(&body, cli.compact);
    print!("{text}");
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(3);
        }
    }
    ExitCode::from(code as u8)
}
