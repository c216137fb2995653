use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter domain: {0}")]
    ParameterDomain(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("empty or degenerate interval ({lo}, {hi})")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("non-finite integrand value {value} at t = {t}")]
    NonFinite { t: f64, value: f64 },
    #[error("branch mismatch: {0}")]
    BranchMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("too many columns for the brute-force oracle: {0} > 3")]
    TooManyColumns(usize),
    #[error("criterion set incomplete: missing {0}")]
    IncompleteCriterionSet(String),
    #[error("span extension required: {0}")]
    SpanExtension(String),
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
