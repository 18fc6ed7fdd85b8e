use thiserror::Error;

/// Errors produced by the rate and quadrature routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the formula being evaluated.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// The material cannot bind a surface state (epsilon too close to 1).
    #[error("degenerate material {name}: (eps-1)/(eps+1) = {polarization:e} is below {threshold:e}")]
    DegenerateMaterial {
        name: String,
        polarization: f64,
        threshold: f64,
    },

    /// Adaptive quadrature hit its subdivision or term budget.
    #[error(
        "quadrature did not converge in {context}: estimate {estimate:e}, error {error:e} after {evaluations} evaluations"
    )]
    Convergence {
        context: String,
        estimate: f64,
        error: f64,
        evaluations: usize,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }

    /// Prefix the context of a convergence failure, leaving other kinds untouched.
    pub fn context(self, outer: &str) -> Self {
        match self {
            Error::Convergence {
                context,
                estimate,
                error,
                evaluations,
            } => Error::Convergence {
                context: format!("{outer}: {context}"),
                estimate,
                error,
                evaluations,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
