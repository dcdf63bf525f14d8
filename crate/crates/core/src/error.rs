use thiserror::Error;

use crate::bogoliubov::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("mode index {mode} out of range for {modes} modes")]
    InvalidMode { mode: usize, modes: usize },

    #[error("dense dimension {dim} exceeds budget {budget}")]
    DimensionBudget { dim: usize, budget: usize },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("first-order data failed unitarity validation: {0}")]
    Validation(Box<ValidationReport>),

    #[error("cutoff {cutoff} too small: need at least {needed}")]
    Headroom { needed: u32, cutoff: u32 },

    #[error("truncation leakage {leakage:e} exceeds budget {budget:e}")]
    Leakage { leakage: f64, budget: f64 },

    #[error("state support outside keep")]
    SupportOutsideKeep,

    #[error("operator is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("generator is not anti-Hermitian (residual {residual:e})")]
    AntiHermiticity { residual: f64 },

    #[error("operator is not positive (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("expected a real value, imaginary part {imag:e}")]
    ComplexValue { imag: f64 },

    #[error("negative Fisher information {value:e}")]
    NegativeFisher { value: f64 },

    #[error("perturbative QFI {perturbative} and oracle QFI {oracle} differ by more than {tolerance:e}")]
    OracleDisagreement { perturbative: f64, oracle: f64, tolerance: f64 },

    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code: 1 for bad input, 2 for failed physical checks, 3 for exhausted
    /// numerical budgets.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::AntiHermiticity { .. }
            | Error::NonHermitian { .. }
            | Error::NotPositive { .. }
            | Error::ComplexValue { .. }
            | Error::NegativeFisher { .. }
            | Error::OracleDisagreement { .. } => 2,
            Error::Headroom { .. } | Error::Leakage { .. } | Error::DimensionBudget { .. } => 3,
            _ => 1,
        }
    }

    /// Short machine-readable tag used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidLayout(_) => "invalid_layout",
            Error::LayoutMismatch(_) => "layout_mismatch",
            Error::InvalidMode { .. } => "invalid_mode",
            Error::DimensionBudget { .. } => "dimension_budget",
            Error::NotNormalized { .. } => "not_normalized",
            Error::Schema(_) => "schema",
            Error::Validation(_) => "validation",
            Error::Headroom { .. } => "cutoff_headroom",
            Error::Leakage { .. } => "leakage",
            Error::SupportOutsideKeep => "support_outside_keep",
            Error::NonHermitian { .. } => "non_hermitian",
            Error::AntiHermiticity { .. } => "anti_hermiticity",
            Error::NotPositive { .. } => "not_positive",
            Error::ComplexValue { .. } => "complex_value",
            Error::NegativeFisher { .. } => "negative_fisher",
            Error::OracleDisagreement { .. } => "oracle_disagreement",
            Error::Infeasible(_) => "infeasible",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
