use thiserror::Error;

use crate::classes::ClassId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rotation is not orthogonal (max |QᵀQ - I| = {deviation:e})")]
    NonOrthogonalRotation { deviation: f64 },

    /// Class parameters collapse to a rigid motion or a singular map.
    #[error("degenerate class parameters: {0}")]
    DegenerateClassParameters(String),

    /// A class consistency equation has no real solution for the requested parameters.
    #[error("infeasible parameters ({equation}){}: {detail}", wall.map(|k| format!(" at wall {k}")).unwrap_or_default())]
    InfeasibleParameters {
        equation: &'static str,
        wall: Option<usize>,
        detail: String,
    },

    #[error("overconstrained class: {0}")]
    OverconstrainedClass(String),

    /// The requested parameters belong to a different equivalence class.
    #[error("parameters belong to class {target:?}: {detail}")]
    Redirect { target: ClassId, detail: String },

    #[error("ambiguous or degenerate configuration: {0}")]
    AmbiguousOrDegenerate(String),

    #[error("degenerate trajectory or room: centered PPDM has rank {rank}, expected {expected}")]
    DegenerateTrajectoryOrRoom { rank: usize, expected: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn infeasible(equation: &'static str, wall: Option<usize>, detail: impl Into<String>) -> Self {
        Error::InfeasibleParameters {
            equation,
            wall,
            detail: detail.into(),
        }
    }

    /// Short machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonOrthogonalRotation { .. } => "NonOrthogonalRotation",
            Error::DegenerateClassParameters(_) => "DegenerateClassParameters",
            Error::InfeasibleParameters { .. } => "InfeasibleParameters",
            Error::OverconstrainedClass(_) => "OverconstrainedClass",
            Error::Redirect { .. } => "Redirect",
            Error::AmbiguousOrDegenerate(_) => "AmbiguousOrDegenerate",
            Error::DegenerateTrajectoryOrRoom { .. } => "DegenerateTrajectoryOrRoom",
            Error::Parse(_) => "Parse",
        }
    }
}
