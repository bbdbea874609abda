//! Command-line front end for fuzzy de Sitter operator construction and checks.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error,
//! 4 verification failure, 5 expression parse/evaluation error.

pub mod commands;
pub mod config;
pub mod error;
pub mod matrix_file;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;
pub use matrix_file::MatrixFile;

#[derive(Debug, Parser)]
#[command(name = "fuzzyds", version, about = "Coherent-state quantization of de Sitter spacetimes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON file with default values for any of the flags below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

impl Common {
    fn resolve(self) -> Result<RunConfig, CliError> {
        match &self.config {
            Some(path) => Ok(self.run.over(RunConfig::load(path)?)),
            None => Ok(self.run),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build operator matrices and write them to --out (a directory).
    Build(Common),
    /// Check commutators, Casimir and identity resolution.
    Verify {
        /// Directory holding x0.json, x1.json, x2.json to check instead of
        /// freshly built operators.
        #[arg(long)]
        matrices: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Quantize an expression f (+ i f_im) and write the matrix to --out.
    Quantize {
        #[arg(long)]
        f: String,
        #[arg(long)]
        f_im: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Commutator norms or Casimir residuals along the classical-limit path.
    LimitScan(Common),
}

/// Runs one invocation, writing the JSON report to `stdout` and diagnostics
/// to `stderr`; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (outcome, verdict_checked) = match command {
        Command::Build(common) => (commands::build(&common.resolve()?)?, false),
        Command::Verify { matrices, common } => {
            let cfg = common.resolve()?;
            let outcome = commands::verify(&cfg, matrices.as_deref())?;
            commands::save_report(&cfg, &outcome.report)?;
            (outcome, true)
        }
        Command::Quantize { f, f_im, common } => {
            (commands::quantize(&common.resolve()?, &f, f_im.as_deref())?, false)
        }
        Command::LimitScan(common) => (commands::limit_scan(&common.resolve()?)?, false),
    };
    for w in &outcome.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
    writeln!(stdout, "{text}").map_err(|e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    })?;
    if verdict_checked && outcome.report["verdict"] != "pass" {
        let violated = outcome.report["violations"]
            .as_array()
            .map(|v| {
                v.iter()
                    .filter_map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .unwrap_or_default();
        return Err(CliError::VerifyFailed(violated));
    }
    Ok(())
}
