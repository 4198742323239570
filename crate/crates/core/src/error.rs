use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field of order {p}^{k} exceeds the arithmetic cap")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("no irreducible polynomial of degree {k} found over F_{p}")]
    NoIrreducible { p: u64, k: u32 },
    #[error("{0} is not the order of a subfield")]
    NotSubfield(u64),
    #[error("fields are incompatible: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("singular curve: {0}")]
    Singular(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("{what} too large for exhaustive enumeration ({size} > {cap})")]
    TooLarge {
        what: &'static str,
        size: u64,
        cap: u64,
    },
    #[error("law disagrees with the oracle: {0}")]
    OracleDisagreement(String),
    #[error("inconsistent law: {0}")]
    InconsistentLaw(String),
    #[error("no nonzero solution")]
    NoSolution,
    #[error("solution space dimension {0} > 1")]
    Underdetermined(usize),
    #[error("interpolation dimension did not stabilise after {0} sample batches")]
    Unstable(usize),
    #[error("not defined over the subfield: {0}")]
    NotRational(String),
    #[error("search exhausted: {0}")]
    Exhausted(String),
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
