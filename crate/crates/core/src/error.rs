use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("string of length {len} exceeds basis bound n = {n}")]
    StringTooLong { len: usize, n: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("invalid binary string {0:?}")]
    InvalidBitString(String),
    #[error("string basis bound n = {n} exceeds the supported maximum {max}")]
    BasisTooLarge { n: usize, max: usize },
    #[error("matrix is {rows}x{cols}, expected {expected}x{expected}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace {trace:.12} differs from 1")]
    TraceNotOne { trace: f64 },
    #[error("vector norm {norm:.12} differs from 1")]
    NotNormalized { norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operators live on different spaces ({left} vs {right})")]
    SpaceMismatch { left: String, right: String },
    #[error("operator is not defined over a qubit-string basis")]
    NotStringSpace,
    #[error("no basis string has diagonal weight above {tol:e}")]
    DegenerateOperator { tol: f64 },
    #[error("empty Kraus family")]
    EmptyKraus,
    #[error("Kraus operators have inconsistent shapes")]
    KrausShape,
    #[error("Kraus completeness violated: max |ΣK†K − I| = {residual:.3e}")]
    NotTracePreserving { residual: f64 },
    #[error("vectors are not orthonormal (max Gram deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },
    #[error("tolerance {delta} outside [0, 1/(2e)) = [0, {limit:.6})")]
    DeltaOutOfRange { delta: f64, limit: f64 },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("unknown machine family {0:?}")]
    UnknownFamily(String),
    #[error("machine bound n = {n} exceeds the envelope n ≤ {max}")]
    MachineTooLarge { n: usize, max: usize },
    #[error("input base length {len} exceeds machine bound n = {n}")]
    InputTooLong { len: usize, n: usize },
    #[error(
        "net certificate failed: {violations} of {checked} samples farther than epsilon = {epsilon}; \
         worst sample #{worst_sample} at trace distance {worst_distance:.6}"
    )]
    CoverageFailed {
        epsilon: f64,
        checked: usize,
        violations: usize,
        worst_sample: usize,
        worst_distance: f64,
    },
    #[error(
        "tolerance δ = {delta} must exceed the net radius ε = {epsilon}: \
         only strings reachable within δ − ε are guaranteed to be found (δ_eff = δ + ε)"
    )]
    DeltaBelowNetEpsilon { delta: f64, epsilon: f64 },
    #[error("index {index} beyond output count {count}")]
    IndexBeyondOutputs { index: usize, count: usize },
    #[error("adaptive tolerance loop did not settle after {halvings} halvings")]
    AdaptiveNoSettle { halvings: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("json: {0}")]
    Json(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
