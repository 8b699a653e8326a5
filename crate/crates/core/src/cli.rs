//! Command-line front end. Exit codes: 0 pass or success, 1 fail, 2 usage or
//! input error, 3 vacuous.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::check::{estimate_k, lookup, run_check, Bound, CheckOptions, EstimateError, Verdict};
use crate::harness::{cross_validate, default_hubs, lattice, refinement_study, ExperimentPlan};
use crate::model::Curvature;
use crate::space::{io, sprinkle, validate_space, Diamond};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VACUOUS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lorentz-bounds", version, about = "Timelike curvature bounds on finite Lorentzian spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoundArg {
    Lower,
    Upper,
}

impl From<BoundArg> for Bound {
    fn from(b: BoundArg) -> Bound {
        match b {
            BoundArg::Lower => Bound::Lower,
            BoundArg::Upper => Bound::Upper,
        }
    }
}

#[derive(Debug, clap::Args)]
struct Tolerances {
    /// Absolute tolerance on time separations
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Absolute tolerance on angles
    #[arg(long, default_value_t = 1e-7)]
    tol_ang: f64,
    /// Slack when deciding whether a four-point configuration is straight
    #[arg(long, default_value_t = 1e-9)]
    eps_straight: f64,
    /// Extra tolerance for checks built on approximated limit angles
    #[arg(long, default_value_t = 0.0)]
    limit_slack: f64,
    /// Use the comparison-angle form of the four-point conditions
    #[arg(long)]
    angle_version: bool,
}

impl From<&Tolerances> for CheckOptions {
    fn from(t: &Tolerances) -> CheckOptions {
        CheckOptions { tol: t.tol, tol_ang: t.tol_ang, eps_straight: t.eps_straight, limit_slack: t.limit_slack, angle_version: t.angle_version }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sprinkle points into the causal diamond of a model space
    Sprinkle {
        /// Model curvature
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// Number of points
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Height (time separation of the tips) of the causal diamond
        #[arg(long)]
        region: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Geodesic lattice on hub points of a model space
    Lattice {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// Hubs as `time,space` pairs separated by `;`, e.g. "0,0;1,-0.6;2.2,0"
        #[arg(long, allow_hyphen_values = true)]
        hubs: Option<String>,
        /// Samples per hub geodesic
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the Lorentzian pre-length space axioms of a space file
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run one curvature checker and print its report
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// Checker name, e.g. triangle or four-point-timelike
        #[arg(long)]
        sense: String,
        #[arg(long, value_enum)]
        bound: BoundArg,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[command(flatten)]
        tolerances: Tolerances,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket the threshold curvature of a checker by bisection
    EstimateK {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sense: String,
        #[arg(long, value_enum)]
        bound: BoundArg,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long)]
        tol_k: f64,
        #[command(flatten)]
        tolerances: Tolerances,
    },
    /// Run an experiment plan and print the agreement matrix
    CrossValidate {
        #[arg(long)]
        plan: PathBuf,
        /// Also write the matrix as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit-angle refinement study on model lattices
    Refine {
        #[arg(long, allow_hyphen_values = true)]
        k0: f64,
        /// angle, hinge, monotonicity or one-sided-monotonicity
        #[arg(long)]
        sense: String,
        /// Comma-separated lattice resolutions
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<usize>,
        /// Hubs as for `lattice`; a standard quadruple by default
        #[arg(long, allow_hyphen_values = true)]
        hubs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure that maps to the usage exit code.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Usage> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => {
            // a closed pipe downstream is not an error of ours
            if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

fn parse_hubs(text: &str) -> Result<Vec<[f64; 2]>, Usage> {
    text.split(';')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [t, x] => Ok([t.parse::<f64>()?, x.parse::<f64>()?]),
                _ => Err(Usage(format!("hub {pair:?} is not a time,space pair"))),
            }
        })
        .collect()
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Vacuous => EXIT_VACUOUS,
    }
}

fn execute(command: Command) -> Result<i32, Usage> {
    match command {
        Command::Sprinkle { k, n, seed, region, out } => {
            let s = sprinkle(Curvature::new(k), Diamond { height: region }, n, seed)?;
            io::write_space(&s, &out)?;
            Ok(EXIT_OK)
        }
        Command::Lattice { k, hubs, m, out } => {
            let k = Curvature::new(k);
            let hubs = match hubs {
                Some(text) => parse_hubs(&text)?,
                None => default_hubs(k),
            };
            io::write_space(&lattice(k, &hubs, m)?, &out)?;
            Ok(EXIT_OK)
        }
        Command::Validate { input } => {
            let report = validate_space(&io::read_space(&input)?);
            emit(&serde_json::to_string_pretty(&report)?, None)?;
            Ok(if report.is_valid() { EXIT_OK } else { EXIT_USAGE })
        }
        Command::Check { input, sense, bound, k, tolerances, out } => {
            let s = io::read_space(&input)?;
            let report = run_check(&sense, &s, Curvature::new(k), bound.into(), (&tolerances).into())?;
            emit(&report.to_json(), out.as_deref())?;
            Ok(verdict_code(report.verdict))
        }
        Command::EstimateK { input, sense, bound, lo, hi, tol_k, tolerances } => {
            let s = io::read_space(&input)?;
            let check = lookup(&sense)?;
            match estimate_k(&s, check.as_ref(), bound.into(), (&tolerances).into(), (lo, hi), tol_k) {
                Ok(interval) => {
                    emit(&serde_json::to_string_pretty(&interval)?, None)?;
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(match e {
                        EstimateError::VacuousBracket => EXIT_VACUOUS,
                        EstimateError::InvalidBracket => EXIT_USAGE,
                        EstimateError::NonMonotoneVerdicts(_) | EstimateError::NotBracketed(_) => EXIT_FAIL,
                    })
                }
            }
        }
        Command::CrossValidate { plan, csv, out } => {
            let text = std::fs::read_to_string(&plan)?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            let plan: ExperimentPlan = serde_path_to_error::deserialize(de)?;
            let matrix = cross_validate(&plan)?;
            emit(&matrix.to_json(), out.as_deref())?;
            if let Some(path) = csv {
                std::fs::write(path, matrix.to_csv())?;
            }
            Ok(if matrix.disagreements.is_empty() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Refine { k0, sense, m_list, hubs, out } => {
            let hubs = match hubs {
                Some(text) => parse_hubs(&text)?,
                None => default_hubs(Curvature::new(k0)),
            };
            let table = refinement_study(k0, &hubs, &m_list, &sense, CheckOptions::default())?;
            emit(&table.to_json(), out.as_deref())?;
            Ok(if table.errors_decrease() { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["lorentz-bounds"]), EXIT_USAGE);
        assert_eq!(run(["lorentz-bounds", "check", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["lorentz-bounds", "validate", "--in", "/nonexistent/space.json"]), EXIT_USAGE);
        assert_eq!(run(["lorentz-bounds", "--help"]), EXIT_OK);
    }

    #[test]
    fn hub_lists() {
        assert_eq!(parse_hubs("0,0; 1.5,-0.5").ok(), Some(vec![[0.0, 0.0], [1.5, -0.5]]));
        assert!(parse_hubs("0,0;1").is_err());
        assert!(parse_hubs("a,b").is_err());
    }
}
