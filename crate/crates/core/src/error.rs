use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("{func}: domain error: {msg}")]
    Domain { func: &'static str, msg: String },

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    #[error("{func}: quadrature did not converge (estimate {estimate:e}, error {error:e}, {subdivisions} subdivisions)")]
    Quadrature {
        func: &'static str,
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    /// The quantity is +infinity at this point (e.g. a potential density at 0+).
    #[error("{func}: value is infinite at {at}")]
    Infinite { func: &'static str, at: f64 },

    /// A ratio was requested with a zero denominator.
    #[error("{func}: zero denominator ({msg})")]
    ZeroDenominator { func: &'static str, msg: String },

    /// The simulated horizon did not cover the event that was asked for.
    #[error("horizon too short: {0}")]
    HorizonTooShort(String),

    /// The small-jump cutoff is too coarse for the compensating drift to be accurate.
    #[error("jump cutoff too large: {0}")]
    CutoffTooLarge(String),

    /// A construction was asked for outside the hypotheses under which it is valid.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A rejection sampler exhausted its attempt budget.
    #[error("budget exceeded after {attempts} attempts ({accepted} accepted, rate {rate:e})")]
    BudgetExceeded {
        attempts: u64,
        accepted: u64,
        rate: f64,
    },

    /// A statistic could not be computed from the supplied sample.
    #[error("{0}")]
    Sample(String),

    /// Fitting a regression or exponent failed.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Invalid experiment configuration; every problem found is listed.
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    /// Filesystem or serialization failure while writing reports.
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        func,
        msg: msg.into(),
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
