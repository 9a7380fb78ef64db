use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |H - H^†| = {defect:e}, max |H| = {scale:e})")]
    NotHermitian { defect: f64, scale: f64 },
    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DickeError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("operator split into J±1/J±2 requires odd N, got {0}")]
    EvenQubitCount(u32),
    #[error("M = {twice_m}/2 is not an admissible Dicke index for N = {n}")]
    InvalidIndex { n: u32, twice_m: i64 },
    #[error("full-space oracle limited to N <= {max}, got {n}")]
    TooLarge { n: u32, max: u32 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("N must be odd and at least 3, got {0}")]
    InvalidQubitCount(u32),
    #[error("parameter {name} = {value} violates {rule}")]
    OutOfDomain { name: &'static str, value: f64, rule: &'static str },
    #[error("battery splittings must satisfy 0 < eps1 < eps2 (eps1 = {eps1}, eps2 = {eps2})")]
    BatteryOrdering { eps1: f64, eps2: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Dicke(#[from] DickeError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("state dims {state:?} do not match model dims {model:?}")]
    DimensionMismatch { state: Vec<usize>, model: Vec<usize> },
    #[error("series has no ergotropy data")]
    MissingErgotropy,
    #[error("scaling fit needs at least 3 achieved points, got {0}")]
    TooFewPoints(usize),
}
