//! Actions of the operator families on the non-diagonalizing bases: block
//! patterns, closed-form action coefficients and their comparison with
//! numerically extracted coefficients.

mod blocks;
mod closed_form;
mod split;
mod table;

use thiserror::Error;

use crate::bases::BasisError;
use crate::onsager::OnsagerError;
use crate::polyops::PolyError;

pub use blocks::{extract_action, verify_block_band, verify_block_tridiagonal, BandCheck, BlockPattern};
pub use closed_form::{
    appendix_b_terms, coeffs_closed_form_n1, coeffs_closed_form_n2, level_coefficients, w12aux_residuals,
    AppendixBTerms, LevelCoeffs, NineCoeffs, Transcription, W12AuxResiduals, NINE_LABELS,
};
pub use split::{split_coefficients_level, verify_bidiagonal_split, SplitCheck, SplitCoeffs};
pub use table::{compare_appendix_b, compare_n1, compare_split_n1, compare_split_n2, CoeffEntry, CoeffTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("basis change is too ill-conditioned for extraction (condition {condition:.3e})")]
    SingularBasis { condition: f64 },
    #[error("closed forms are available for {0} levels only")]
    UnsupportedLevels(usize),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Onsager(#[from] OnsagerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
