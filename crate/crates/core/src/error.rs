use std::path::PathBuf;

use thiserror::Error;

use crate::fields::Point;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("non-finite field")]
    NonFiniteField,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("newton iteration failed: {reason}; residual trace {trace:?}")]
    NewtonDivergence { reason: String, trace: Vec<f64> },

    #[error("descent did not converge: residual {residual:e} after {iters} iterations")]
    NotConverged { residual: f64, iters: usize },

    #[error("no seed converged; residuals {0:?}")]
    NoSeedConverged(Vec<(String, f64)>),

    #[error("loop through near-zero at ({}, {})", .0[0], .0[1])]
    LoopThroughZero(Point),

    #[error("ill-conditioned loop (defect {0:.3} turns)")]
    IllConditionedLoop(f64),

    #[error("zero amplitude in annulus at {0:?}")]
    ZeroAmplitude(Vec<Point>),

    #[error("point ({}, {}) outside grid", .0[0], .0[1])]
    OutsideGrid(Point),

    #[error("window exits grid at corner s = ({}, {})", .0[0], .0[1])]
    WindowOutsideGrid(Point),

    #[error("core outside validity region (mu = {0:.4})")]
    CoreOutsideValidity(f64),

    #[error("no transition in range")]
    NoTransition,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("not a GLNF1 file")]
    BadMagic,

    #[error("truncated payload")]
    TruncatedPayload,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
