use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("repeated index in quartic tuple ({0}, {1}, {2}, {3}); reduce to lower order first")]
    RepeatedIndex(usize, usize, usize, usize),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("matrix is not antisymmetric: max |A + A^T| = {defect:.3e}")]
    NotAntisymmetric { defect: f64 },
    #[error("matrix is not orthogonal: ||O O^T - I||_F = {defect:.3e}")]
    NotOrthogonal { defect: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid mode layout: {0}")]
    Layout(String),
    #[error("invalid model configuration: {0}")]
    Model(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("Fock space too large: {modes} modes (limit {limit})")]
    FockTooLarge { modes: usize, limit: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
