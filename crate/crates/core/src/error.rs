use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the library. CLI exit codes are derived from the variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("sigma = {sigma} is a pole of the model (|P(sigma)| = {magnitude:.3e})")]
    Pole { sigma: Complex64, magnitude: f64 },

    #[error("no reduced model of order {r}: rank of constraint rows is {rank_a}, rank with target row is {rank_full}")]
    Infeasible {
        r: usize,
        rank_a: usize,
        rank_full: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
