//! `qgscatter`: scattering matrices of quantum graphs from the command line.
//!
//! Exit codes: 0 success, 1 tolerance failure, 2 parse or validation error,
//! 3 the graph cannot be cut into stars.

mod commands;
mod input;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qgscatter::sweep::KGrid;
use qgscatter::Error;

use report::Format;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn new(code: u8, message: String) -> Self {
        Self { code, message }
    }

    pub fn from_error(e: &Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::InvalidGraph(_)
            | Error::InvalidLink(_)
            | Error::InvalidGrid(_)
            | Error::InvalidMomentum(_)
            | Error::DimensionMismatch { .. } => 2,
            Error::CutInsidePotential { .. } => 3,
            _ => 1,
        };
        Self::new(code, e.to_string())
    }

    pub fn context(self, what: &str) -> Self {
        Self::new(self.code, format!("{what}: {}", self.message))
    }
}

#[derive(Parser)]
#[command(name = "qgscatter", version, about = "Scattering matrices of quantum graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// S(k) of a graph by the direct boundary-value solve
    Smatrix {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// S(k) of several graphs joined along ray pairs
    Compose {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        /// JSON file `{"links": [{"a": {"graph": 0, "ray": 1}, "b": {...}, "length": 1.0}]}`
        #[arg(long)]
        links: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Direct solve against composition of the graph's stars
    Compare {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues embedded in the continuous spectrum
    Embedded {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Single momentum
    #[arg(long, conflicts_with_all = ["k_min", "k_max", "steps"], allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, requires_all = ["k_max", "steps"], allow_hyphen_values = true)]
    k_min: Option<f64>,
    #[arg(long, requires_all = ["k_min", "steps"], allow_hyphen_values = true)]
    k_max: Option<f64>,
    #[arg(long, requires_all = ["k_min", "k_max"])]
    steps: Option<usize>,
    /// Tolerance on unitarity (smatrix, compose) or on the deviation (compare)
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; `-` or `stdout` for standard output
    #[arg(long, default_value = "-")]
    output: String,
}

impl Common {
    fn momenta(&self) -> Result<Vec<f64>, CliError> {
        match (self.k, self.k_min, self.k_max, self.steps) {
            (Some(k), ..) => Ok(vec![k]),
            (None, Some(lo), Some(hi), Some(steps)) => KGrid::new(lo, hi, steps)
                .map(|g| g.points())
                .map_err(|e| CliError::from_error(&e)),
            _ => Err(CliError::new(2, "give either --k or --k-min, --k-max and --steps".into())),
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::new(2, format!("--tol {} must be positive", self.tol)));
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        if self.output == "-" || self.output == "stdout" {
            let mut out = std::io::stdout().lock();
            return match out.write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::new(1, format!("writing output: {e}")))
                }
                _ => Ok(()),
            };
        }
        fs::write(&self.output, text).map_err(|e| CliError::new(1, format!("{}: {e}", self.output)))
    }
}

fn tolerance_failure(what: &str, value: f64, tol: f64) -> CliError {
    CliError::new(1, format!("{what} {value:.3e} exceeds tolerance {tol:.3e}"))
}

fn check_unitarity(report: &report::MatrixReport, tol: f64) -> Result<(), CliError> {
    let worst = report
        .rows
        .iter()
        .filter_map(|r| r.unitarity)
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(tolerance_failure("unitarity residual", worst, tol));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Smatrix { graph, common } => {
            common.check()?;
            let input = input::load_graph(&graph)?;
            let report = commands::smatrix(&input, &common.momenta()?)?;
            common.emit(&report.render(common.format))?;
            check_unitarity(&report, common.tol)
        }
        Command::Compose {
            graphs,
            links,
            common,
        } => {
            common.check()?;
            let pieces = graphs
                .iter()
                .map(|g| input::load_graph(g))
                .collect::<Result<Vec<_>, _>>()?;
            let links = input::load_links(&links, &pieces)?;
            let report = commands::compose(&pieces, &links, &common.momenta()?)?;
            common.emit(&report.render(common.format))?;
            check_unitarity(&report, common.tol)
        }
        Command::Compare { graph, common } => {
            common.check()?;
            let input = input::load_graph(&graph)?;
            let report = commands::compare(&input, &common.momenta()?, common.tol)?;
            common.emit(&report.render(common.format))?;
            let max = report.max_deviation();
            if max > common.tol {
                return Err(tolerance_failure("max deviation", max, common.tol));
            }
            Ok(())
        }
        Command::Embedded { graph, common } => {
            common.check()?;
            let input = input::load_graph(&graph)?;
            let report = commands::embedded(&input, &common.momenta()?)?;
            common.emit(&report.render(common.format))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qgscatter: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
