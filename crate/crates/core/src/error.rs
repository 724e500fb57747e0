use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("{what} needs {needed} steps, over the enumeration budget of {budget}")]
    ResourceLimit {
        what: &'static str,
        needed: u128,
        budget: u64,
    },

    #[error("group axiom violated: {0}")]
    GroupAxiom(String),

    #[error("invalid group spec {0:?}")]
    InvalidGroupSpec(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime must be odd here, got {0}")]
    EvenPrime(u64),

    #[error("expolynomials over different base primes ({0} and {1})")]
    MismatchedPrimes(u64, u64),

    #[error("moore complex sizes mix the primes {0} and {1}")]
    MixedPrimes(u64, u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("space is not connected: {0}")]
    NotConnected(String),

    #[error("power series has zero constant term")]
    ZeroConstantTerm,

    #[error("skeleton formulas disagree at n = {n}: {alternating} vs {direct}")]
    SkeletonMismatch {
        n: usize,
        alternating: String,
        direct: String,
    },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
