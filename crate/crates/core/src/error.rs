use alloc::string::String;
use thiserror::Error;

/// Errors raised anywhere in the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |m_ij - conj(m_ji)| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("post-selected outcome is impossible (probability {probability:e})")]
    ImpossibleOutcome { probability: f64 },

    /// An eigenvalue falls outside `(0, 1)`. When every eigenvalue is positive
    /// `divide_by` is the factor the matrix has to be divided by (strictly
    /// more than) to bring it into range.
    #[error("eigenvalue {value} outside (0, 1){}", match .divide_by {
        Some(d) => alloc::format!("; rescale A by dividing by more than {d}"),
        None => String::new(),
    })]
    EigenvalueRange { value: f64, divide_by: Option<f64> },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("eigenvalues are degenerate ({0} and {1})")]
    DegenerateEigenvalues(f64, f64),

    #[error("eigenvalues cannot be resolved by the eigenvalue register: {0}")]
    NotRepresentable(String),

    #[error("eigenvalues out of order: expected {0} < {1}")]
    Ordering(f64, f64),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("optical mode not in register: {0}")]
    UnknownMode(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("tomography data incomplete: basis {0} missing")]
    MissingBasis(char),

    #[error("tomography data degenerate: basis {0} has no counts")]
    EmptyBasis(char),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Stable machine-readable identifier, used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NonFinite => "non_finite",
            Error::ImpossibleOutcome { .. } => "impossible_outcome",
            Error::EigenvalueRange { .. } => "eigenvalue_range",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::DegenerateEigenvalues(..) => "degenerate_eigenvalues",
            Error::NotRepresentable(_) => "not_representable",
            Error::Ordering(..) => "ordering",
            Error::InvalidState(_) => "invalid_state",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnknownMode(_) => "unknown_mode",
            Error::Configuration(_) => "configuration",
            Error::MissingBasis(_) => "incomplete_data",
            Error::EmptyBasis(_) => "degenerate_data",
            Error::Invariant(_) => "invariant",
        }
    }

    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T> = core::result::Result<T, Error>;
