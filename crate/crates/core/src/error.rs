use thiserror::Error;

/// Errors raised by the numerical kernels, samplers and validation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iteration stopped before reaching its tolerance.
    #[error("no convergence in {context} after {terms} terms (residual {residual:e})")]
    Convergence {
        context: String,
        terms: usize,
        residual: f64,
    },

    /// Input data cannot support the requested statistic (empty set, zero variance).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A batch request exceeds the configured size guard.
    #[error("requested {requested} samples, above the cap of {cap}")]
    TooLarge { requested: usize, cap: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Prefixes the context of a convergence error; other variants pass through.
    pub fn with_context(self, outer: &str) -> Self {
        match self {
            Error::Convergence {
                context,
                terms,
                residual,
            } => Error::Convergence {
                context: format!("{outer}: {context}"),
                terms,
                residual,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
