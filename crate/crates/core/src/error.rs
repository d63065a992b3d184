use thiserror::Error;

/// Errors raised by the numerical kernels and verification suites.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A value left the representable double range; `ln_value` keeps the
    /// logarithm so callers can still report it.
    #[error("range error in {op}: ln|value| = {ln_value}")]
    Range { op: &'static str, ln_value: f64 },

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("quadrature cutoff error: tail bound {tail:e} above target {target:e} at R = {radius}")]
    Cutoff { tail: f64, target: f64, radius: f64 },

    #[error("coefficient series did not converge within {terms} terms (tail bound {tail:e})")]
    Divergence { terms: usize, tail: f64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, FockError>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> FockError {
    FockError::Domain {
        op,
        detail: detail.into(),
    }
}

impl FockError {
    /// Stable lowercase tag for machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            FockError::Domain { .. } => "domain",
            FockError::Range { .. } => "range",
            FockError::UnsupportedOrder { .. } => "unsupported-order",
            FockError::Cutoff { .. } => "cutoff",
            FockError::Divergence { .. } => "divergence",
            FockError::Usage(_) => "usage",
            FockError::Internal(_) => "internal",
        }
    }
}
