use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("non-finite values in {0}")]
    NonFinite(&'static str),

    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("not Hermitian: max |rho - rho^dagger| = {0:e}")]
    NotHermitian(f64),

    #[error("trace is not 1: tr rho = {0}")]
    Trace(f64),

    #[error("not positive semidefinite: minimum eigenvalue {0:e}")]
    Negative(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cell theta[{theta_index}] = {theta}, w[{w_index}] = {w}: {source}")]
    Cell {
        theta_index: usize,
        theta: f64,
        w_index: usize,
        w: f64,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::Domain { name, value, range }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
