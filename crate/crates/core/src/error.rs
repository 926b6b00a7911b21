use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("pole at ({0}, {1}) is not strictly interior to the domain")]
    PoleOnBoundary(f64, f64),
    #[error("obstacle is not strictly interior to the domain: {0}")]
    ObstacleIntersectsBoundary(String),
    #[error("unsatisfiable grading: {0}")]
    UnsatisfiableGrading(String),
    #[error("mesh generation failed: {0}")]
    Meshing(String),
    #[error("evaluation at a pole ({0}, {1})")]
    AtPole(f64, f64),
    #[error("point ({0}, {1}) lies on the cut segment between the poles")]
    OnCut(f64, f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pole ({0}, {1}) is not a mesh vertex")]
    PoleNotVertex(f64, f64),
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),
    #[error("zero vector has no Rayleigh quotient")]
    ZeroVector,
    #[error(
        "eigensolver did not converge: best residual {best_residual:e} after {iterations} restarts"
    )]
    NotConverged {
        best_residual: f64,
        iterations: usize,
    },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("eigenvalue {index} is not simple (relative gap {gap:e} below {threshold:e})")]
    NearDegenerate {
        index: usize,
        gap: f64,
        threshold: f64,
    },
    #[error("origin is not a free degree of freedom")]
    OriginEliminated,
    #[error("field is not magnetic-real: {0}")]
    NotAligned(String),
    #[error("nodal graph: {0}")]
    Nodal(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by violated mathematical hypotheses rather
    /// than numerical breakdown.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Precondition(_) | Error::NearDegenerate { .. } | Error::OriginEliminated
        )
    }
}
