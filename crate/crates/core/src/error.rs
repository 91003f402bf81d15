use thiserror::Error;

use crate::wavefunction::ComplexPoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The wavefunction vanishes (within the pole guard) at this point, so the
    /// velocity field has a pole there.
    #[error("pole encountered at {at} (t = {t})")]
    PoleEncountered { at: ComplexPoint, t: f64 },

    #[error("step size underflow at t = {t}, last good point {at}")]
    NonConvergence { at: ComplexPoint, t: f64 },

    #[error("operation not supported for state {0}")]
    UnsupportedState(String),

    #[error("state {0} is not normalizable")]
    NotNormalizable(String),

    #[error("trajectory is not closed")]
    NotClosed,

    #[error("winding number around {node} is not an integer (accumulated {turns})")]
    WindingNotInteger { node: ComplexPoint, turns: f64 },

    #[error("grid point x = {x} lies inside a node-exclusion interval")]
    PoleOnPath { x: f64 },

    #[error("trajectory never crosses the real axis")]
    NoCrossing,

    #[error("grid too coarse: {cells} cells across the lemniscate width (need at least {required})")]
    GridTooCoarse { cells: usize, required: usize },

    #[error("non-finite density value in cell {cell}")]
    NotFinite { cell: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
