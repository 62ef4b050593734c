//! Overlap coefficients between the eigenbases `F`, `Ftilde` and the monomial
//! basis, with the expansion, orthogonality, fusion and recurrence checks.
//!
//! At level `i` the `F -> Ftilde` factor takes `(z-, z+)` from the source
//! prefix `n_1 .. n_{i-1}` and `(zt-, zt+)` from the target prefix
//! `nt_1 .. nt_{i-1}`.

mod coefficients;
mod recurrence;
mod tensor;

use thiserror::Error;

use crate::bases::BasisError;
use crate::onsager::OnsagerError;
use crate::polyops::PolyError;
use crate::structure::StructureError;

pub use coefficients::{
    expansion_residual, fusion_c, generating_residual, inversion_kernel, inversion_residual, overlap_c, overlap_c_in,
};
pub use recurrence::{nine_term_recurrence_residual, verify_aux_recurrence, AuxRecurrence};
pub use tensor::{
    biorthogonality_residual, biorthogonality_residual_extended, overlap_d, overlap_dtilde, overlap_tensor_f_to_ftilde,
    overlap_tensor_ftilde_to_f, reconstruction_residual, triangle_residual, OverlapTensor, TensorSpace,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OverlapError {
    #[error("index out of range: n = {n}, ntilde = {ntilde}, M = {m}")]
    IndexOutOfRange { n: usize, ntilde: usize, m: usize },
    #[error("degenerate parameters: {0} is not finite")]
    Degenerate(&'static str),
    #[error("tensor shape mismatch: {0} against {1}")]
    Shape(usize, usize),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Onsager(#[from] OnsagerError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
