use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column `{0}`")]
    MissingColumn(&'static str),
    #[error("treatment must be 0 or 1, found `{value}` in data row {row}")]
    NonBinaryTreatment { row: usize, value: String },
    #[error("cannot parse `{value}` as a number (data row {row}, column `{column}`)")]
    ParseCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("design matrix is rank deficient ({0})")]
    SingularDesign(String),
    #[error("perfect separation detected along direction {direction:?}")]
    Separation { direction: Vec<f64> },
    #[error("log-posterior is not finite at the sampler's initial point")]
    SamplerInit,
    #[error("degenerate variance: every influence value is zero")]
    DegenerateVariance,
    #[error("both treatment arms must be non-empty")]
    EmptyArm,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("standard error must be positive, got {0}")]
    NonPositiveSe(f64),
    #[error("unstable bootstrap: {n_failed} of {total} resamples failed")]
    UnstableBootstrap { n_failed: usize, total: usize },
    #[error("invalid randomization design: {0}")]
    InvalidDesign(String),
    #[error("observed statistic is undefined: {0}")]
    ObservedStatistic(String),
    #[error("unreliable study: {failed} of {total} replications failed")]
    UnreliableStudy { failed: usize, total: usize },
    #[error("dataset has no retained generator variables (W columns)")]
    NoGeneratorColumns,
}
