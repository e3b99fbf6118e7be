use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("q-indicator maps take class-tagged points, not plain reals")]
    WrongPointKind,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("map does not send its domain into itself: image [{img_lo}, {img_hi}] escapes [{lo}, {hi}]")]
    NotSelfMap {
        img_lo: f64,
        img_hi: f64,
        lo: f64,
        hi: f64,
    },

    #[error("empty sampling grid")]
    EmptyDomain,

    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },

    #[error("f(x) - x does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no fixed point found: all strategies exhausted")]
    NotFound,

    #[error("contraction rate {0} is not in (0, 1)")]
    InvalidRate(f64),

    #[error("no known bound applies: {0}")]
    NotApplicable(String),

    #[error("gave up generating a certified map after {attempts} attempts")]
    GenerationExhausted { attempts: usize },

    #[error("predicate is not monotone: true again at grid index {index}")]
    NotMonotone { index: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Validation-class errors, as opposed to parse or solver failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameters(_) | Error::NotSelfMap { .. } | Error::OutOfDomain { .. }
        )
    }
}
