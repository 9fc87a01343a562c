use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("state {state} out of range for an MDP with {num_states} states")]
    StateOutOfRange { state: usize, num_states: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear system is numerically singular")]
    Singular,

    #[error("{what} did not converge within {limit} iterations")]
    IterationLimit { what: &'static str, limit: usize },

    #[error("ergodicity not certified: {0}")]
    Uncertified(String),

    #[error("{count} policy sequences exceed the enumeration guard of {guard}; use m = 1 certification")]
    GuardExceeded { count: f64, guard: f64 },

    #[error("bound is vacuous for beta = {0}")]
    VacuousBound(f64),

    #[error("no mixing time found within horizon {n_max}; retry with n_max >= {suggested}")]
    HorizonExhausted { n_max: usize, suggested: usize },
}

impl Error {
    /// True for failures that stem from arithmetic rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular
                | Error::IterationLimit { .. }
                | Error::HorizonExhausted { .. }
                | Error::VacuousBound(_)
        )
    }
}
