//! Crate-wide error type.
//!
//! All fallible operations in the library return [`Result`]. Variants carry
//! enough context (dimensions, tolerances, offending values) for a caller to
//! report the failure without re-deriving it.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the tomography toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix dimension was not a power of two.
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    /// Two operands had incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Qubit counts of two objects disagree.
    #[error("qubit count mismatch: expected {expected}, got {actual}")]
    QubitCountMismatch { expected: usize, actual: usize },

    /// A qubit count exceeded [`crate::MAX_QUBITS`].
    #[error("{n} qubits exceeds the supported maximum of {max}")]
    TooManyQubits { n: usize, max: usize },

    /// A matrix entry was NaN or infinite.
    #[error("matrix contains a non-finite entry")]
    NonFinite,

    /// Hermiticity check failed.
    #[error("matrix is not Hermitian: max |A - A^dagger| entry = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// Trace-one check failed.
    #[error("matrix trace {trace} is not 1 within {tolerance:.1e}")]
    NotUnitTrace { trace: f64, tolerance: f64 },

    /// Positive-semidefiniteness check failed.
    #[error("matrix has eigenvalue {min_eigenvalue:.3e} below the tolerance {tolerance:.1e}")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    /// A string could not be parsed as a Pauli string, basis, bitstring,
    /// subset, or state spec.
    #[error("parse error: {0}")]
    Parse(String),

    /// A Pauli expectation came out with a non-negligible imaginary part,
    /// which indicates a corrupted (non-Hermitian) input matrix.
    #[error("expectation has imaginary part {imaginary:.3e} exceeding {tolerance:.1e}")]
    NonRealExpectation { imaginary: f64, tolerance: f64 },

    /// A Pauli string is not compatible with a measurement basis.
    #[error("pauli {pauli} is not compatible with basis {basis}")]
    Incompatible { pauli: String, basis: String },

    /// A subset was empty, unsorted, duplicated, or out of range.
    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    /// A numeric parameter fell outside its documented range.
    #[error("parameter {name} = {value} out of range ({expected})")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// Reconstruction requested with an empty accumulator slot.
    #[error("no shots compatible with pauli {pauli}; cannot form its estimate")]
    ZeroCount { pauli: String },

    /// A subset reconstruction found a restricted Pauli with no compatible
    /// shots.
    #[error("insufficient coverage for subset {subset}: no shots compatible with restricted basis pattern \"{pattern}\"")]
    InsufficientCoverage { subset: String, pattern: String },

    /// A probability vector failed validation.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Experiment configuration was missing or malformed.
    #[error("config error: {0}")]
    Config(String),

    /// An input collection that must be non-empty was empty.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Wrapped I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Wrapped JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
