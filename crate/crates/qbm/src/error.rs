//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by operator construction, model evaluation and training.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("{n_qubits} qubits exceeds the size guard of {guard} (2^{n_qubits} dense rows)")]
    SizeGuardExceeded { n_qubits: usize, guard: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },

    #[error("matrix is not symmetric: relative asymmetry {asymmetry:.3e} exceeds 1e-12")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("eigensolver failed to converge")]
    EigensolverFailure,

    #[error("spin value {value} is not +1 or -1")]
    InvalidSpin { value: i64 },

    #[error("duplicate clamp on qubit {index}")]
    DuplicateClamp { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coupling ({a},{b}) is excluded by the connectivity mask")]
    MaskedCoupling { a: usize, b: usize },

    #[error("connectivity mask enables hidden-hidden pair ({a},{b}) in a semi-restricted model")]
    RestrictionViolated { a: usize, b: usize },

    #[error("probability underflow: state weight for a data-supported state is zero")]
    ProbabilityUnderflow,

    #[error("conditional is undefined: P(x) = {px:.3e} is below 1e-300")]
    UndefinedConditional { px: f64 },

    #[error("support violation: model probability is zero at a state with data mass {data_mass:.3e}")]
    SupportViolation { data_mass: f64 },

    #[error("probabilities sum to {sum} instead of 1")]
    NotNormalized { sum: f64 },

    #[error("negative probability {value:.3e} at state {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("label {label} does not fit in {width} output bits")]
    LabelWidthExceeded { label: u64, width: usize },

    #[error("{0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
