//! `nqfa`: builds finite quantum groups, runs the verification suites and
//! writes versioned JSON or CSV reports.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! usage, input or construction errors.

mod commands;
mod output;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "nqfa", version, about = "Fourier analysis and crossed products for finite quantum groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Hopf,
    Pentagon,
    Peterweyl,
    Fejer,
    Bimodule,
    Fubini,
    All,
}

/// Options shared by the commands that build a quantum group.
#[derive(clap::Args, Debug, Clone)]
pub struct HostArgs {
    /// Builtin group (`trivial`, `c<n>`, `s3`, `d4`, `q8`), a group file or
    /// a structure-tensor file. `verify` without it runs the default hosts.
    #[arg(long)]
    pub group: Option<String>,
    /// `function` for C(G), `group` for the group algebra.
    #[arg(long, default_value = "function")]
    pub side: String,
}

#[derive(clap::Args, Debug, Clone)]
pub struct OutArgs {
    /// Write the report here (atomically) instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct the quantum group, its dual and the Peter–Weyl data.
    Build {
        #[command(flatten)]
        host: HostArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        host: HostArgs,
        #[arg(long, value_enum, num_args = 1.., default_values_t = [Suite::All])]
        suite: Vec<Suite>,
        /// Pass threshold applied to every selected suite.
        #[arg(long, allow_negative_numbers = true)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fejér partial-sum residuals for every crossed-product basis element.
    Fejer {
        /// Bundled action name or action file.
        #[arg(long)]
        action: String,
        #[arg(long, allow_negative_numbers = true)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare Bim(J⊥) with Ran(J)⊥ for one or many ideals.
    Bimodule {
        #[command(flatten)]
        host: HostArgs,
        /// `enumerate`, `random:<k>` or an ideal file.
        #[arg(long, default_value = "enumerate")]
        ideal: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Slice-map check for an invariant subspace of an action's target.
    Fubini {
        #[arg(long)]
        action: String,
        /// `random`, `random:<seed>`, `fixed`, `full`, `zero` or a file.
        #[arg(long, default_value = "random")]
        x: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Summarise the JSON reports in a directory.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Outcome of a command: the rendered report and whether every check passed.
pub struct Outcome {
    pub body: String,
    pub passed: bool,
}

fn run(cli: Cli) -> Result<Outcome, commands::CliError> {
    match cli.command {
        Command::Build { host, out } => commands::build(&host, &out),
        Command::Verify { host, suite, tol, seed, out } => commands::verify(&host, &suite, tol, seed, &out),
        Command::Fejer { action, tol, out } => commands::fejer(&action, tol, &out),
        Command::Bimodule { host, ideal, seed, out } => commands::bimodule(&host, &ideal, seed, &out),
        Command::Fubini { action, x, out } => commands::fubini(&action, &x, &out),
        Command::Report { input, out } => commands::report(&input, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Build { out, .. }
        | Command::Verify { out, .. }
        | Command::Fejer { out, .. }
        | Command::Bimodule { out, .. }
        | Command::Fubini { out, .. }
        | Command::Report { out, .. } => out.out.clone(),
    };
    match run(cli) {
        Ok(outcome) => {
            if let Err(e) = output::emit(out.as_deref(), &outcome.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
