use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside the domain ({reason})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("degenerate secant: {0}")]
    DegenerateSecant(&'static str),

    #[error("invalid point representation: {0}")]
    InvalidPoint(String),

    #[error("invalid tangent vector: {0}")]
    InvalidTangent(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("point lies in the cut locus band: distance {distance} vs injectivity radius {inj}")]
    CutLocus { distance: f64, inj: f64 },

    #[error("data point {index} is in the cut locus of the evaluation point (distance {distance})")]
    DataCutLocus { index: usize, distance: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid exponent p = {0}; need 2 <= p < inf")]
    InvalidExponent(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point outside the chart domain: {0}")]
    ChartDomain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no intersection found: {0}")]
    NoIntersection(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
