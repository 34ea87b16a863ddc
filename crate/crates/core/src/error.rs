use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parent graph contains a cycle through `{0}`")]
    CycleDetected(String),
    #[error("variable `{var}` is missing a CPT row for parent configuration {config}")]
    MissingRow { var: String, config: usize },
    #[error("variable `{var}` has a non-positive Dirichlet hyperparameter")]
    NonPositiveAlpha { var: String },
    #[error("invalid variable `{0}`: {1}")]
    InvalidVariable(String, String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value `{value}` is not in the domain of `{var}`")]
    UnknownValue { var: String, value: String },
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("effective sample size must be positive, got {0}")]
    NonPositiveM(f64),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveFactor(f64),
    #[error("mean row for `{var}` does not sum to one (sum = {sum})")]
    RowNotNormalized { var: String, sum: f64 },
    #[error(
        "parent configuration {config} of `{var}` has zero probability under the mean parameters"
    )]
    ZeroParentProbability { var: String, config: usize },
    #[error("scope mismatch: {0}")]
    ScopeMismatch(String),
    #[error("evidence has probability zero; the query is undefined")]
    ZeroEvidenceProbability,
    #[error("numerical instability: {0}")]
    NumericalInstability(String),
    #[error("degenerate query: {0}")]
    DegenerateQuery(String),
    #[error("singular or indefinite scale matrix")]
    SingularPsi,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
