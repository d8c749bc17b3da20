use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("graph is invalid: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("tolerance `{name}` = {value} is outside (0, 1)")]
    BadTolerance { name: &'static str, value: f64 },

    #[error("boundary conditions are not self-adjoint")]
    NotSelfAdjoint,

    #[error("boundary conditions are not local")]
    NotLocal,

    #[error("unitary is not in the isotropy group")]
    NotInIsotropyGroup,

    #[error("matrix is singular")]
    Singular,

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("potential on edge `{edge}`: piece lengths sum to {sum}, edge length is {length}")]
    PotentialLength { edge: String, sum: f64, length: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("graph has external lines; the spectral solver needs a compact graph")]
    NotCompact,

    #[error("spectra were computed on different windows")]
    WindowMismatch,

    #[error("invalid scan parameters: {0}")]
    InvalidScan(String),

    #[error("numerical check failed: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
