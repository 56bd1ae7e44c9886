use thiserror::Error;

/// Errors produced by the nodal-core pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A chart point lies outside the chart of its model.
    #[error("point ({u}, {v}) is outside the {model} chart")]
    Domain { model: &'static str, u: f64, v: f64 },

    /// Derivatives requested where the chart degenerates (sphere poles).
    #[error("coordinate singularity at ({u}, {v}) on the {model} chart")]
    CoordinateSingularity { model: &'static str, u: f64, v: f64 },

    /// Invalid construction parameters.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The operation is not defined for this model or field.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Every level of a sweep was irregular.
    #[error("field too degenerate: {0}")]
    Degenerate(String),

    /// A contour passes too close to a critical point of the field.
    #[error("segment {segment} of the contour is near-critical (|grad f| = {grad_norm:e} < {floor:e})")]
    NearCritical {
        segment: usize,
        grad_norm: f64,
        floor: f64,
    },

    /// The requested level is not a regular value in the sampled range.
    #[error("level {c} is not a regular value of the sampled field")]
    IrregularLevel { c: f64 },

    /// The field fails the admissibility gate of a check.
    #[error("field not admissible: {0}")]
    NotAdmissible(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
