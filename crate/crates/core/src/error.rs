use thiserror::Error;

use crate::sphere::SpherePoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root finding did not converge after {iterations} iterations (max residual {max_residual:e})")]
    RootsNotConverged { iterations: usize, max_residual: f64 },

    #[error("the Gauss map is constant; only non-flat surfaces are supported")]
    ConstantMap,

    #[error("zero polynomial or zero function where a nonzero one is required")]
    ZeroFunction,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid surface data: {0}")]
    InvalidData(String),

    #[error("fiber point {point:?} lies within tolerance of puncture {puncture:?} but is not equal to it")]
    AmbiguousPuncture {
        point: SpherePoint,
        puncture: SpherePoint,
    },

    #[error("point {0:?} is a pole")]
    Pole(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("inequality {equation} violated: {detail}")]
    BoundViolated {
        equation: &'static str,
        detail: String,
    },

    #[error("identity {identity} failed: {detail}")]
    IdentityFailed {
        identity: &'static str,
        detail: String,
    },

    #[error("quadrature did not converge on {location}: estimated error {error:e}")]
    Quadrature { location: String, error: f64 },

    #[error("the two Gauss maps coincide")]
    MapsCoincide,

    #[error("cover is not Euler-consistent: {0}")]
    NotEulerConsistent(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BoundViolated { .. } | Error::IdentityFailed { .. } | Error::MapsCoincide => 1,
            Error::RootsNotConverged { .. } | Error::Quadrature { .. } => 3,
            _ => 2,
        }
    }
}
