use thiserror::Error;

/// Errors raised by the model, solvers and the evolution driver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NdsgError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("unsupported boundary model: {0}")]
    Boundary(String),

    #[error("degenerate linearization: {0}")]
    DegenerateSpectrum(String),

    #[error("trajectory never reached phi = pi before xi = {cap}")]
    NoCrossing { cap: f64 },

    #[error("trajectory blew up at xi = {xi}")]
    BlowUp { xi: f64 },

    #[error("integrator step size underflow at xi = {xi}")]
    StepUnderflow { xi: f64 },

    #[error("no zero of the mismatch function in the requested range")]
    EmptySpectrum,

    #[error("branch {branch} is not resolvable: {reason}")]
    InsufficientAccuracy { branch: usize, reason: String },

    #[error("time step {dt} exceeds stability bound {bound}")]
    StabilityViolation { dt: f64, bound: f64 },

    #[error("non-finite field value at tau = {tau}")]
    NonFinite { tau: f64 },

    #[error("front lost at tau = {tau}")]
    LostFront { tau: f64 },

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("mismatched parameter context: {0}")]
    ContextMismatch(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl NdsgError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            NdsgError::Domain(_)
            | NdsgError::Grid(_)
            | NdsgError::Boundary(_)
            | NdsgError::Config(_)
            | NdsgError::ContextMismatch(_)
            | NdsgError::DomainTooSmall(_)
            | NdsgError::NotApplicable(_) => 2,
            NdsgError::StabilityViolation { .. }
            | NdsgError::NonFinite { .. }
            | NdsgError::BlowUp { .. } => 4,
            NdsgError::Io(_) => 1,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for NdsgError {
    fn from(e: std::io::Error) -> Self {
        NdsgError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NdsgError>;
