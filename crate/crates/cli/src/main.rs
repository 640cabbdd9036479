//! `edgeshift`: command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 spec or input error,
//! 3 budget exceeded, 4 numeric failure, 5 I/O.

mod exit;
mod report;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use edgeshift::langmodel::{Budget, ShiftSpec};
use edgeshift::measures::MeasureRoute;
use edgeshift::specfile::SpecFile;
use edgeshift::spectral::SpectralOptions;
use edgeshift::verify::VerifyOptions;

use exit::CliError;
use report::Report;

#[derive(Parser)]
#[command(name = "edgeshift", version, about = "Multigraph edge shifts from forbidden and repeated words")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Spec document (JSON); `-` reads standard input.
    #[arg(long)]
    spec: PathBuf,
    /// Print a plain-text table instead of JSON.
    #[arg(long, conflicts_with = "json")]
    table: bool,
    /// Print JSON (the default).
    #[arg(long)]
    json: bool,
    /// Node budget for enumeration.
    #[arg(long)]
    budget: Option<u64>,
}

impl Common {
    fn budget(&self) -> Budget {
        self.budget.map_or_else(Budget::default, Budget::nodes)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    All,
    Parry,
    ShannonParry,
    Combinatorial,
}

#[derive(Subcommand)]
enum Command {
    /// Counts f(n), g(n) and f_a(n) from the enumeration oracle.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Generating functions solved from the correlation system.
    Genfun {
        #[command(flatten)]
        common: Common,
        /// Number of series coefficients to print.
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Perron root, eigenvectors and normalization.
    Perron {
        #[command(flatten)]
        common: Common,
        /// Analyse a reducible matrix component by component.
        #[arg(long)]
        allow_reducible: bool,
    },
    /// Parry measure of a cylinder: a symbol word, or `X*Y#j` edges.
    Measure {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        cylinder: String,
        #[arg(long, value_enum, default_value = "all")]
        route: RouteArg,
        /// Use the combinatorial route without a property (P) witness.
        #[arg(long)]
        assume_property_p: bool,
    },
    /// Path counts avoiding a hole and the escape-rate estimate.
    Escape {
        #[command(flatten)]
        common: Common,
        /// Hole as `X*Y#j` edges, or a symbol word (branch 1 on every edge).
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
    /// Runs every invariant check; exit code 1 when one fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// Edge count of the cylinders in the measure checks.
        #[arg(long, default_value_t = 4)]
        measure_len: usize,
    },
}

fn load(path: &PathBuf) -> Result<(SpecFile, ShiftSpec), CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(io)?
    };
    let doc = SpecFile::from_json(&text)?;
    let spec = doc.to_spec()?;
    Ok((doc, spec))
}

/// A closed reader (`| head`) is not an error.
fn emit(r: &Report, table: bool) -> Result<(), CliError> {
    let text = if table { r.table.clone() } else { serde_json::to_string_pretty(&r.json).expect("report serializes") + "\n" };
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io { path: "stdout".into(), source: e }),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let spectral_opts = |c: &Common, allow_reducible: bool| SpectralOptions { allow_reducible, budget: c.budget(), ..SpectralOptions::default() };
    match cli.command {
        Command::Enumerate { common, max_n } => {
            let (doc, spec) = load(&common.spec)?;
            emit(&report::enumerate(&doc, &spec, max_n, &common.budget())?, common.table)?;
        }
        Command::Genfun { common, max_n } => {
            let (doc, spec) = load(&common.spec)?;
            emit(&report::genfun(&doc, &spec, max_n)?, common.table)?;
        }
        Command::Perron { common, allow_reducible } => {
            let (doc, spec) = load(&common.spec)?;
            emit(&report::perron(&doc, &spec, &spectral_opts(&common, allow_reducible))?, common.table)?;
        }
        Command::Measure { common, cylinder, route, assume_property_p } => {
            let (doc, spec) = load(&common.spec)?;
            let routes = match route {
                RouteArg::All => MeasureRoute::ALL.to_vec(),
                RouteArg::Parry => vec![MeasureRoute::Parry],
                RouteArg::ShannonParry => vec![MeasureRoute::ShannonParry],
                RouteArg::Combinatorial => vec![MeasureRoute::Combinatorial],
            };
            let r = report::measure(&doc, &spec, &cylinder, &routes, assume_property_p, &spectral_opts(&common, false))?;
            emit(&r, common.table)?;
        }
        Command::Escape { common, word, max_n } => {
            let (doc, spec) = load(&common.spec)?;
            emit(&report::escape(&doc, &spec, &word, max_n, &common.budget())?, common.table)?;
        }
        Command::Verify { common, max_n, measure_len } => {
            let (doc, spec) = load(&common.spec)?;
            let opts = VerifyOptions { max_n, measure_len, budget: common.budget() };
            let (r, passed) = report::verify(&doc, &spec, &opts)?;
            emit(&r, common.table)?;
            if !passed {
                return Err(CliError::Verify);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Verify) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code() as u8)
        }
    }
}
