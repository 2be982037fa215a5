use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the qnmc library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    Shape {
        dim: usize,
        expected: usize,
        got: usize,
    },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("density matrix trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("matrix is singular (eigenvalue {min:e} against largest {max:e})")]
    Singular { min: f64, max: f64 },

    #[error("feature vector must have at least one component")]
    EmptyFeatureVector,

    #[error("feature {index} is not finite ({value})")]
    NonFiniteFeature { index: usize, value: f64 },

    #[error("rescaling weight {index} must be positive and finite, got {value}")]
    InvalidWeight { index: usize, value: f64 },

    #[error("informative encoding is undefined for the zero vector")]
    ZeroNorm,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("class '{0}' has no patterns")]
    EmptyClass(String),

    #[error("class '{label}' has {size} patterns, at least {required} required")]
    ClassTooSmall {
        label: String,
        size: usize,
        required: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid classifier spec: {0}")]
    InvalidSpec(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("{path}: column '{column}' not found in header")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: row {row}, column '{column}': empty cell")]
    EmptyCell {
        path: PathBuf,
        row: usize,
        column: String,
    },

    #[error("{path}: row {row}, column '{column}': cannot parse '{value}' as a number")]
    ParseCell {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("unknown feature '{0}'")]
    UnknownFeature(String),

    #[error("run {run}: {source}")]
    Run {
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("model document: {0}")]
    ModelFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
