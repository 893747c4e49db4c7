use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has no rows or no columns")]
    EmptyMatrix,

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("rank deficient design: rank {rank} of {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("input has zero variance")]
    ZeroVariance,

    #[error("insufficient data: {n} observations for {params} parameters")]
    InsufficientData { n: usize, params: usize },

    #[error("perfect collinearity in predictor {column}")]
    PerfectCollinearity { column: usize },

    #[error("degrees of freedom must be positive, got {0}")]
    InvalidDf(u64),

    #[error("dictionary would hold {count} terms, budget is {budget}; lower alpha or the mixture number")]
    DictionaryTooLarge { count: u128, budget: usize },

    #[error("term {factor} is not defined at row {row}")]
    DomainViolation { row: usize, factor: String },

    #[error("no dictionary column survived screening (max |corr| = {max_abs_corr})")]
    AllColumnsDropped { max_abs_corr: f64 },

    #[error(
        "exhaustive search needs {required} candidate fits, budget is {budget}; tighten delta/varsigma or use greedy_forward"
    )]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("no candidate subset satisfies the rank and VIF constraints")]
    NoFeasibleSubset,

    #[error("parse error at line {line}, column '{column}': {value:?}")]
    Parse {
        line: usize,
        column: String,
        value: String,
    },

    #[error("non-finite value at line {line}, column '{column}'")]
    NonFiniteCell { line: usize, column: String },

    #[error("response column '{0}' not found")]
    MissingResponse(String),

    #[error("duplicate column name '{0}'")]
    DuplicateHeader(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{stage} stage failed")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
