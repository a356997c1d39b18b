use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRatError {
    #[error("malformed rational {0:?}")]
    Malformed(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {modulus} is not allowed for semigroup {kind}")]
    IncompatibleModulus { kind: String, modulus: u64 },
    #[error("grid is empty: delta_max {delta_max} is below 1/{modulus}")]
    EmptyGrid { modulus: u64, delta_max: Rat },
    #[error("{value} lies outside (0, {delta_max}]")]
    OutOfRange { value: Rat, delta_max: Rat },
    #[error("{0} is not an element of the grid")]
    NotGridElement(Rat),
    #[error("constant {value} is not a multiple of 1/{modulus}")]
    UnrepresentableConstant { value: Rat, modulus: u64 },
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("rung {rung} is infeasible: {reason}")]
    InfeasibleRung { rung: usize, reason: String },
    #[error("base set is not syndetic at rung {rung}")]
    NotSyndeticBase { rung: usize },
    #[error("invalid ladder: {0}")]
    InvalidLadder(String),
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("depth {depth} needs rung windows of at least two grid points (modulus {modulus})")]
    DepthBeyondResolution { depth: usize, modulus: u64 },
    #[error("configurations live on different grids")]
    GridMismatch,
    #[error("comparison prefix {prefix} exceeds the available domain {available}")]
    PrefixTooLong { prefix: usize, available: usize },
    #[error("set has no elements below {delta}")]
    NotNearZero { delta: Rat },
    #[error("no shift keeps a broken-IP certificate at step {step}")]
    CertificateExhausted { step: usize },
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
