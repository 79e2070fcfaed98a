use thiserror::Error;

/// Errors raised by risk-measure evaluation and the supporting numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("dimension mismatch: expected {expected} atoms, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("validation failed: {0}")]
    Validation(String),

    /// Cash-line search ran past the bracket cap without changing membership.
    #[error("cash-line search unbounded: {0}")]
    Unbounded(String),

    #[error("envelope unbounded below: objective still decreasing at |r| = {cap:e}")]
    EnvelopeUnbounded { cap: f64 },

    #[error("no feasible cash amount for threshold r0 = {r0} within |s| <= {cap:e}")]
    InfeasibleThreshold { r0: f64, cap: f64 },

    #[error("invalid loss function: {0}")]
    InvalidLoss(String),

    #[error("no feasible density among dual candidates")]
    NoFeasibleCandidate,
}

pub type Result<T> = std::result::Result<T, RiskError>;
