//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("energy within {tol:e} of a band edge (E = {energy}, edge = {edge})")]
    DegenerateEnergy { energy: f64, edge: f64, tol: f64 },

    #[error("kappa = -1 within guard tolerance; matching system is singular")]
    KappaSingular,

    #[error("operation requires {required}, scenario is {actual}")]
    WrongCase {
        required: &'static str,
        actual: String,
    },

    #[error(
        "quadrature under-resolved: doubling N changes total probability by {observed:e} \
         (tolerance {tol:e})"
    )]
    QuadratureUnderResolved { observed: f64, tol: f64 },

    #[error("density at or below node floor ({density:e} < {floor:e})")]
    NodePoint { density: f64, floor: f64 },

    #[error("slice density integrates below {tol:e} over sampling window")]
    EmptySlice { integral: f64, tol: f64 },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
