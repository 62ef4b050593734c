//! The operator families `W0^(i)`, `W1^(i)`: model parameters, the direct
//! q-difference construction, the tensor recursion, and relation checks.

mod params;
mod qdiff;
mod relations;
mod tensor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyops::PolyError;

pub use params::ModelParams;
pub use qdiff::{build_w, build_w0, build_w1, operator_matrix, tail_coefficient};
pub use relations::{verify_commuting, verify_qonsager};
pub use tensor::{build_w_tensor, casimir_residual};

/// Which of the two operator families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    W0,
    W1,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::W0 => "W0",
            Family::W1 => "W1",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OnsagerError {
    #[error("level {level} out of range 1..={nlevels}")]
    LevelOutOfRange { level: usize, nlevels: usize },
    #[error("spin entry {index} must satisfy 2j >= 1")]
    InvalidSpin { index: usize },
    #[error("evaluation parameter v_{index} must be nonzero")]
    ZeroEval { index: usize },
    #[error("{evals} evaluation parameters given for {spins} spins")]
    LengthMismatch { evals: usize, spins: usize },
    #[error("exponential parameter {0} must be nonzero and finite")]
    BadExponential(&'static str),
    #[error("matrix shape mismatch: {0} against {1}")]
    Shape(usize, usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
