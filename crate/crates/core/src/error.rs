//! Error type shared by every solver stage.

use std::path::PathBuf;

use crate::fixed_point::SolverReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the domain of a transform or evaluation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A characteristic speed vanished (c = 0 or lambda = 0).
    #[error("sonic degeneracy: {0}")]
    Sonic(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Time step violates the CFL bound.
    #[error("CFL violation: dt = {dt:e} exceeds limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    /// A state left the subsonic neighbourhood of the baseline.
    #[error("regime violation: {0}")]
    Regime(String),

    #[error("fixed-point iteration did not converge after {} sweeps (last difference {:e})",
        .0.iterations, .0.sup_diffs.last().copied().unwrap_or(f64::NAN))]
    NonConvergence(Box<SolverReport>),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures that say something about the mathematics (regime,
    /// convergence, sonic states) rather than about the caller's input.
    pub fn is_regime(&self) -> bool {
        matches!(
            self,
            Error::Sonic(_) | Error::Regime(_) | Error::NonConvergence(_) | Error::Numeric(_)
        )
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Sonic(_) => "sonic",
            Error::Numeric(_) => "numeric",
            Error::Cfl { .. } => "cfl",
            Error::Regime(_) => "regime",
            Error::NonConvergence(_) => "non-convergence",
            Error::InsufficientData(_) => "insufficient-data",
            Error::Precondition(_) => "precondition",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }
}
