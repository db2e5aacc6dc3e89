use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a type or argument invariant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A surrogate with specificity below 0.5 was passed to a design
    /// evaluator. Negating the surrogate (swapping its positive and
    /// negative labels) yields a specificity of at least 0.5.
    #[error(
        "surrogate specificity {specificity} is below 0.50; negate the surrogate \
         (Z' = 1 - Z has sensitivity {specificity} and specificity {sensitivity}) \
         and evaluate the design with Z'"
    )]
    SpecificityBelowHalf { sensitivity: f64, specificity: f64 },

    /// The requested sample cannot be drawn: a stratum does not hold
    /// enough units, or a selection probability exceeds one.
    #[error("infeasible design: {0}")]
    InfeasibleDesign(String),

    /// A closed-form design quantity is undefined for these inputs.
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    /// An iterative calibration failed to converge.
    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    /// A metric is undefined on this input (e.g. AUC with one class).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Model fitting could not start (e.g. single-class outcome).
    #[error("cannot fit model: {0}")]
    FitError(String),

    /// A matrix required by a covariance or solve step is singular.
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// Vocabulary construction removed every term.
    #[error("empty vocabulary: {0}")]
    EmptyVocabulary(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the CLI: 2 for infeasible or degenerate
    /// designs, 3 for any other runtime failure (usage errors are mapped
    /// to 1 before execution reaches library code).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleDesign(_)
            | Error::DegenerateDesign(_)
            | Error::SpecificityBelowHalf { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
