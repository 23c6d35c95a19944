use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid root: {0}")]
    InvalidRoot(String),
    #[error("root subset is not contained in the ambient root system")]
    NotSubset,
    #[error("root subset is not closed")]
    NotClosed,
    #[error("unknown generator label `{0}`")]
    UnknownLabel(String),
    #[error("index {index} out of range for truncation {truncation}")]
    IndexOutOfRange { index: usize, truncation: usize },
    #[error("basis is not closed under multiplication (residual {residual:.3e})")]
    NotMultiplicativelyClosed { residual: f64 },
    #[error("numerically inconclusive: {0}")]
    Inconclusive(String),
    #[error("quadrature underresolved: Gram deviation {deviation:.3e}")]
    QuadratureUnderresolved { deviation: f64 },
    #[error("truncation overflow: occupied index {occupied} + {steps} steps exceeds {truncation}")]
    TruncationOverflow {
        occupied: usize,
        steps: usize,
        truncation: usize,
    },
    #[error("wrong intertwiner path: {0}")]
    WrongPath(String),
    #[error("degenerate sample grid: {0}")]
    DegenerateGrid(String),
    #[error("eigenvalue computation failed to converge")]
    NoConvergence,
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
