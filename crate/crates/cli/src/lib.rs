//! Front end of `dirac-warp`: configuration layering, the six commands and
//! their CSV/JSON/SVG output.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use dirac_warp::error::BlockingZero;
use dirac_warp::Error;

/// Failure of a command, carrying the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("{0}")]
    NonInvertible(String),
    #[error("{}", touching_report(.0))]
    Nontransverse(Vec<BlockingZero>),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(String),
}

fn touching_report(zeros: &[BlockingZero]) -> String {
    let mut s = format!(
        "{} nontransverse boundary zero(s); rerun with --exclude-touching to count them as 0:",
        zeros.len()
    );
    for z in zeros {
        s.push_str(&format!(
            "\n  k = {}, s = {:.12}, A' = {:.3e}, A'' = {:.3e}",
            z.k, z.s, z.a_prime, z.a_second
        ));
    }
    s
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::NonInvertible(_) => 2,
            CliError::Nontransverse(_) => 3,
            CliError::Numerical(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonInvertibleBoundary(_) => CliError::NonInvertible(e.to_string()),
            Error::NontransverseCrossing(z) => CliError::Nontransverse(z),
            Error::Domain { .. }
            | Error::InvalidParameter(_)
            | Error::ZeroSpectralParameter
            | Error::DegenerateDelta { .. }
            | Error::PathFormat { .. } => CliError::Config(vec![e.to_string()]),
            Error::StepUnderflow { .. }
            | Error::StepLimit { .. }
            | Error::Numerical(_)
            | Error::NotBoundaryZero { .. } => CliError::Numerical(e.to_string()),
        }
    }
}
