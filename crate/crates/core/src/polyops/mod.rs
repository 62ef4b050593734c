//! Sparse Laurent polynomials, q-shift operators and dense matrices on the
//! monomial grid.

mod grid;
mod laurent;
pub mod linalg;
mod shift;

use thiserror::Error;

pub use grid::{to_matrix, MatrixRep, SpaceGrid};
pub use laurent::{poly_eval, LaurentPoly};
pub use linalg::{expand_in_basis, Expansion};
pub use shift::{apply_shift, ShiftOperator, ShiftTerm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("image of monomial {monomial:?} leaves the grid at exponent {exponent:?}")]
    Leakage { monomial: Vec<i32>, exponent: Vec<i32> },
    #[error("coordinate z_{var} is zero but the polynomial has negative powers of it")]
    ZeroCoordinate { var: usize },
    #[error("basis matrix is numerically singular (condition number {condition:.3e})")]
    SingularBasis { condition: f64 },
    #[error("expected {expected} basis vectors, found {found}")]
    BasisSize { expected: usize, found: usize },
    #[error("matrix shape mismatch: {0}x{0} against {1}x{1}")]
    Shape(usize, usize),
}
