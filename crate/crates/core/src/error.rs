use std::fmt;

use crate::monoplane::GrowthTrace;
use crate::perceptron::TrainingTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: feature {feature} = {value} lies outside [0, 1]")]
    OutOfRange {
        line: usize,
        feature: usize,
        value: f64,
    },

    #[error("split references patterns not in the dataset: {0:?}")]
    UnknownIndices(Vec<usize>),

    #[error("split is inconsistent: {0}")]
    InvalidSplit(String),

    #[error("cannot compute statistics of an empty pattern set")]
    EmptySet,

    #[error("feature {0} is constant over the learning set")]
    ConstantFeature(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("weight vector has zero norm")]
    ZeroNorm,

    #[error("non-finite weight component")]
    NonFinite,

    #[error("temperature must be positive, got {0}")]
    Temperature(f64),

    #[error("invalid training configuration: {0}")]
    Config(String),

    #[error("descent diverged at epoch {epoch}")]
    Diverged {
        epoch: usize,
        trace: Box<TrainingTrace>,
    },

    #[error("{reason}")]
    GrowthStall {
        reason: StallReason,
        trace: Box<GrowthTrace>,
    },

    #[error("unknown published weight vector {0:?}")]
    UnknownWeights(String),

    #[error("malformed artifact: {0}")]
    Artifact(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StallReason {
    /// Unit `unit` finished with `errors` internal errors, not fewer than the
    /// `previous` count it was meant to improve on.
    NoProgress {
        unit: usize,
        errors: usize,
        previous: usize,
    },
    /// The hidden-unit cap was reached with training errors remaining.
    Budget { max_hidden: usize, remaining: usize },
}

impl fmt::Display for StallReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StallReason::NoProgress {
                unit,
                errors,
                previous,
            } => write!(
                f,
                "growth stalled: hidden unit {unit} left {errors} internal errors (previous unit: {previous})"
            ),
            StallReason::Budget {
                max_hidden,
                remaining,
            } => write!(
                f,
                "growth stalled: {remaining} training errors remain with the maximum of {max_hidden} hidden units"
            ),
        }
    }
}
