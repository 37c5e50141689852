use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or out-of-range input.
    Input,
    /// A model hypothesis (cutoff, positivity condition, ...) does not hold.
    Hypothesis,
    /// A numerical routine or oracle failed.
    Numerical,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("argument {what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("dimension mismatch: expected {expected} entries, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid simplex vector: {0}")]
    InvalidSimplex(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("learning technology is not strictly concave (c_ell = {c_ell:e})")]
    NotStrictlyConcave { c_ell: f64 },

    #[error("the diffuseness check needs at least three domains; K = 2 is a separate case")]
    TwoDomains,

    #[error("integration efficiency theta = {theta} is not below the coordination cutoff {cutoff}")]
    AboveCoordinationCutoff { theta: f64, cutoff: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("allocation is infeasible: {0}")]
    Infeasible(String),

    #[error("degenerate occupational groups: integrator share m = {m} must lie strictly inside (0, 1)")]
    DegenerateGroups { m: f64 },

    #[error("services must be strictly positive (t_S = {t_s}, t_M = {t_m})")]
    NonPositiveService { t_s: f64, t_m: f64 },

    #[error("design covers none of the production profile")]
    ZeroCoverage,

    #[error("{routine} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        routine: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error(
        "enumeration would visit {required} designs, over the budget of {budget}; \
         lower the grid resolution or the atom count"
    )]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("missing config key {0}")]
    MissingKey(&'static str),

    #[error("cannot write output: {0}")]
    Output(String),

    #[error("profitable deviation found: design with mix {mix:?} lowers unit cost by {gain:e}")]
    DeviationFound { mix: Vec<f64>, gain: f64 },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::AboveCoordinationCutoff { .. }
            | Error::Hypothesis(_)
            | Error::TwoDomains
            | Error::DegenerateGroups { .. } => ErrorClass::Hypothesis,
            Error::NonConvergence { .. }
            | Error::DeviationFound { .. }
            | Error::BudgetExceeded { .. } => ErrorClass::Numerical,
            _ => ErrorClass::Input,
        }
    }
}
