use std::fmt;
use std::path::PathBuf;

/// Failure modes shared across the crate. `Domain` and `Precondition` mean the
/// caller passed something outside the admissible parameter region; the rest
/// report numerical trouble and carry enough context to diagnose it.
#[derive(Debug)]
pub enum Error {
    /// Parameters outside the mathematical domain of the requested quantity.
    Domain { what: String },
    /// An input object violates a stated precondition (e.g. a profile that
    /// should have unit norm but does not).
    Precondition { what: String },
    /// No sign change found on the search interval.
    Bracket { lo: f64, hi: f64, what: String },
    /// An iteration stopped before reaching the requested tolerance.
    /// `best` is the last iterate, `error_estimate` its estimated error.
    Convergence {
        what: String,
        best: f64,
        error_estimate: f64,
    },
    /// The ODE integrator was forced below its minimum step size.
    Stiffness { location: f64, step: f64 },
    /// A multi-stage solve gave up (carries the stage that failed).
    Solver { what: String },
    /// File system failure, with the offending path.
    Io { path: PathBuf, source: std::io::Error },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what } => write!(f, "domain error: {what}"),
            Error::Precondition { what } => write!(f, "precondition violated: {what}"),
            Error::Bracket { lo, hi, what } => {
                write!(f, "no sign change in [{lo:e}, {hi:e}]: {what}")
            }
            Error::Convergence {
                what,
                best,
                error_estimate,
            } => write!(
                f,
                "did not converge: {what} (best {best:e}, error estimate {error_estimate:e})"
            ),
            Error::Stiffness { location, step } => write!(
                f,
                "step size underflow at t = {location:e} (h = {step:e}); problem too stiff"
            ),
            Error::Solver { what } => write!(f, "solver failure: {what}"),
            Error::Io { path, source } => write!(f, "i/o error on {}: {source}", path.display()),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    pub fn domain(what: impl Into<String>) -> Self {
        Error::Domain { what: what.into() }
    }

    pub fn precondition(what: impl Into<String>) -> Self {
        Error::Precondition { what: what.into() }
    }

    /// Exit code the CLI maps this error to: 1 for bad parameters, 2 for
    /// numerical failures (including i/o, which is an operational failure).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. } | Error::Precondition { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
