use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cyclic order must be at least 2, got {0}")]
    InvalidLambda(usize),

    #[error("{what}: expected {expected} entries, got {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("kappa_{index} is not the conjugate of kappa_{partner} (deviation {deviation:e})")]
    ConjugationViolation {
        index: usize,
        partner: usize,
        deviation: f64,
    },

    #[error("alpha must sum to zero, sum is {sum:e}")]
    SumNotZero { sum: f64 },

    #[error("no unitary Fock representation: F({index}) = {value} is negative before any zero")]
    NonUnitary { index: usize, value: f64 },

    #[error("truncation reaches a non-unitary state: F({index}) = {value}")]
    NonUnitaryTruncation { index: usize, value: f64 },

    #[error("truncation dimension {dim} exceeds the finite representation dimension {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("truncation dimension must be positive")]
    EmptyTruncation,

    #[error("interior margin {margin} leaves no states in dimension {dim}")]
    MarginTooLarge { margin: usize, dim: usize },

    #[error("sector {mu} out of range for lambda = {lambda}")]
    InvalidSector { mu: usize, lambda: usize },

    #[error("representation is not bounded from below")]
    NotBoundedFromBelow,

    #[error("supercharge order p = {p} requires lambda = {}, got lambda = {lambda}", p + 1)]
    OrderMismatch { p: usize, lambda: usize },

    #[error("eta coefficient {index} is zero")]
    ZeroEta { index: usize },

    #[error("sum of |eta|^2 is {norm}, expected 2p = {expected}")]
    EtaNormViolation { norm: f64, expected: f64 },

    #[error("this check requires lambda = {expected}, got {found}")]
    WrongLambda { expected: usize, found: usize },

    #[error("this check requires order p = {expected}, got {found}")]
    WrongOrder { expected: usize, found: usize },

    #[error("invalid sampling box [{lo}, {hi}]")]
    InvalidBox { lo: f64, hi: f64 },

    #[error("no admissible alpha found after {tries} draws")]
    SamplerExhausted { tries: usize },

    #[error("sector shifts violate the commutation chain (residual {residual:e})")]
    RecursionViolation { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
