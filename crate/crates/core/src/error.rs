use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite value {value} at node (x={x}, y={y})")]
    NonFinite { x: f64, y: f64, value: f64 },
    #[error("unknown {what}: {name}")]
    Unknown { what: &'static str, name: String },
    #[error("K undefined: {0}")]
    UndefinedConstant(String),
    #[error("degenerate pair: |K| = {0:e} is below 1e-10")]
    DegeneratePair(f64),
    #[error("grid too coarse: {0}")]
    TooCoarse(String),
    #[error("indeterminate degree: {0}")]
    Indeterminate(String),
    #[error("unbounded within search range: {0}")]
    Unbounded(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
