use thiserror::Error;

/// Every failure the engine can report. Codes are stable and surface in CLI reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator budget exceeded: need p^-{needed}, budget p^-{budget}")]
    DenominatorBudgetExceeded { needed: u32, budget: u32 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("window underflow: {0}")]
    WindowUnderflow(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("divergent substitution: {0}")]
    DivergentSubstitution(String),
    #[error("psi decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("argument not in domain: {0}")]
    NotInDomain(String),
    #[error("argument outside the simplified S_n domain: {0}")]
    NotInSimplifiedDomain(String),
    #[error("residue is not p-integral: {0}")]
    NonIntegralResidue(String),
    #[error("uniqueness check failed: {0}")]
    UniquenessCheckFailed(String),
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error at {pos}: expected {expected}")]
    Parse { pos: usize, expected: String },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DenominatorBudgetExceeded { .. } => "DenominatorBudgetExceeded",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::WindowUnderflow(_) => "WindowUnderflow",
            Error::NotInvertible(_) => "NotInvertible",
            Error::DivergentSubstitution(_) => "DivergentSubstitution",
            Error::DecompositionFailed(_) => "DecompositionFailed",
            Error::NotInDomain(_) => "NotInDomain",
            Error::NotInSimplifiedDomain(_) => "NotInSimplifiedDomain",
            Error::NonIntegralResidue(_) => "NonIntegralResidue",
            Error::UniquenessCheckFailed(_) => "UniquenessCheckFailed",
            Error::ParamMismatch(_) => "ParamMismatch",
            Error::Config(_) => "ConfigError",
            Error::Parse { .. } => "ParseError",
        }
    }

    /// Process exit status used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Config(_) | Error::ParamMismatch(_) => 2,
            Error::NonIntegralResidue(_) => 5,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
