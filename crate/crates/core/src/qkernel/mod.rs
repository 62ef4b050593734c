//! Scalars, the deformation parameter and the elementary q-special functions.

pub mod identities;
pub mod qpoint;
pub mod scalar;
pub mod special;

use thiserror::Error;

pub use qpoint::QPoint;
pub use scalar::{close, rel_diff, Cdd, Field, Precision, C64};
pub use special::{dual_qkrawtchouk, qbinomial, qnumber, qpochhammer, qpochhammer_multi, qracah, racah_b, racah_c};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QKernelError {
    #[error("degenerate deformation parameter q = {0}")]
    DegenerateQ(C64),
    #[error("gamma = {gamma} is not of the form qsq^(-M-1) for an admissible M")]
    Truncation { gamma: C64 },
    #[error("vanishing denominator in {0}")]
    Denominator(&'static str),
}
