//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositiveVariance { name: &'static str, value: f64 },

    #[error(
        "pattern covariance matrix is not positive definite: \
         cov_xy^2 = {cov_sq} >= var_x * var_y = {bound}"
    )]
    NotPositiveDefinite { cov_sq: f64, bound: f64 },

    #[error("response rate must lie strictly inside (0, 1), got {pi}")]
    InvalidResponseRate { pi: f64 },

    #[error("phi must lie in [0, 1], got {value}")]
    InvalidPhi { value: f64 },

    #[error("design matrix is rank deficient (pivot {pivot} fell below tolerance)")]
    RankDeficientDesign { pivot: usize },

    #[error("need at least 2 units in the {pattern} pattern, found {count}")]
    InsufficientPattern { pattern: &'static str, count: usize },

    #[error("column '{column}' has no values")]
    EmptyColumn { column: String },

    #[error("no covariate columns left after exclusions")]
    NoCovariates,

    #[error("missing covariate value in column '{column}' at line {line}")]
    MissingCovariate { column: String, line: usize },

    #[error("outcome value '{value}' at line {line} is not numeric")]
    NonNumericOutcome { value: String, line: usize },

    #[error("no column named '{name}' in the input")]
    UnknownColumn { name: String },

    #[error(
        "proxy is degenerate at phi = {phi}: selection blend denominator vanishes \
         (respondent proxy correlation {rho})"
    )]
    DegenerateProxy { phi: f64, rho: f64 },

    #[error(
        "identification fails at phi = {phi}: nonrespondent outcome variance {var_y} \
         or residual variance {resid_var} is not positive"
    )]
    InvalidIdentification {
        phi: f64,
        var_y: f64,
        resid_var: f64,
    },

    #[error("conditional residual variance {resid_var} is not strictly positive (var_y = {var_y})")]
    NotStrictlyPositiveResidual { resid_var: f64, var_y: f64 },

    #[error("moments are not strictly positive definite (determinant {det})")]
    NotStrictlyPositiveDefinite { det: f64 },

    #[error("logistic fit separated: coefficient norm {norm:.3e} at iteration {iteration}")]
    Separation { norm: f64, iteration: usize },

    #[error("feature matrix is rank deficient (pivot {pivot} fell below tolerance)")]
    RankDeficient { pivot: usize },

    #[error("invalid phi grid '{spec}': expected start:stop:step inside [0, 1] with step > 0")]
    InvalidPhiGrid { spec: String },

    #[error("mechanism '{id}' not found")]
    UnknownMechanism { id: String },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that describe a numerically invalid model or fit rather
    /// than malformed input. The CLI maps these to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveVariance { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::DegenerateProxy { .. }
                | Error::InvalidIdentification { .. }
                | Error::NotStrictlyPositiveResidual { .. }
                | Error::NotStrictlyPositiveDefinite { .. }
                | Error::Separation { .. }
                | Error::RankDeficient { .. }
        )
    }
}
