//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A screen region or mesh violates a geometric precondition.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A quadrature routine produced a non-finite value.
    #[error("quadrature produced a non-finite value for panel pair ({panel_x}, {panel_y})")]
    QuadratureNonFinite { panel_x: usize, panel_y: usize },

    /// The Galerkin matrix is singular to working tolerance.
    #[error("matrix singular to tolerance: min pivot {pivot:.3e} below threshold {threshold:.3e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    /// The requested basis has dimension zero.
    #[error("empty basis: {0}")]
    EmptyBasis(String),

    /// An evaluation point lies on a panel.
    #[error("evaluation point ({0:?}) lies on a screen panel")]
    PointOnPanel(Vec<f64>),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
