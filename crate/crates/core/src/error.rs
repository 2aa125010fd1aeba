//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("rasterized domain is empty")]
    DomainEmpty,
    #[error("rasterized domain is not 4-connected ({components} components)")]
    DomainDisconnected { components: usize },
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("potential is not convex")]
    PotentialNotConvex,
    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },
    #[error("trial function is identically zero")]
    ZeroTrialFunction,
    #[error("optimal pair touches a domain boundary: {0}")]
    InteriorityViolation(String),
    #[error("logarithmic derivative unreliable: value {value:.3e} below 10*floor {floor:.3e}")]
    ResidualUnreliable { value: f64, floor: f64 },
    #[error("interior core is empty at the requested margin")]
    CoreEmpty,
    #[error("domain is not convex")]
    DomainNotConvex,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("at t={t}: {source}")]
    AtParam {
        t: f64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Annotates an error with the deformation parameter it occurred at.
    pub fn at_param(self, t: f64) -> Error {
        Error::AtParam { t, source: Box::new(self) }
    }

    /// Unwraps parameter annotations down to the root cause.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtParam { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
