//! The polynomial families `F` (eigenbasis of the `W0` family), `Ftilde`
//! (eigenbasis of the `W1` family) and the split basis `G`.
//!
//! Level-`i` factors have roots on q-lattices whose base points depend on the
//! partial sum of the indices at earlier levels, so the vectors are entangled
//! products rather than tensor products. Multi-indices are enumerated in the
//! same lexicographic order as the monomial grid.

mod family;
mod lattice;
mod validity;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::onsager::OnsagerError;
use crate::polyops::PolyError;

pub use family::{
    basis_matrix, build_f, build_ftilde, build_g, build_vector, eigenvalue_lambda, f_factor, factor_coeffs,
    lambda_tilde, BasisFamily, MultiIndex,
};
pub use lattice::{factor_roots, z_bar, z_pm, zt_pm, RootLattice};
pub use validity::{check_basis_validity, cond1_violation, ValidityFlag, ValidityReport, EXCLUSION_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    F,
    Ftilde,
    G,
}

impl std::fmt::Display for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisKind::F => "F",
            BasisKind::Ftilde => "Ftilde",
            BasisKind::G => "G",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("index n_{level} = {value} out of range 0..={max}")]
    IndexOutOfRange { level: usize, value: u32, max: u32 },
    #[error("multi-index has {found} entries, expected {expected}")]
    IndexLength { expected: usize, found: usize },
    #[error(transparent)]
    Onsager(#[from] OnsagerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
