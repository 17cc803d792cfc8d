use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },

    #[error("Jacobi symbol requires an odd modulus, got {0}")]
    EvenModulus(u64),

    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("operands live in different rings (Z/{0} vs Z/{1})")]
    ModulusMismatch(u64, u64),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    CapacityExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("no isotropic vector in dimension {0}")]
    NoIsotropicVector(usize),

    #[error("integer reconstruction drifted by {0:e}")]
    RoundingDrift(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
