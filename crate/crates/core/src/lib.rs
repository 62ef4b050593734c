//! q-difference operator realizations of the q-Onsager algebra.
//!
//! The crate builds the two commuting families `W0^(i)`, `W1^(i)` acting on
//! polynomials in `z_1..z_N`, the three polynomial bases attached to them
//! (the `F` eigenbasis, the dual `Ftilde` eigenbasis and the split basis `G`),
//! and the overlap coefficients between those bases. Every closed form is
//! paired with a numerical route so that it can be checked on finite
//! dimensional polynomial spaces.
//!
//! Module map:
//! - [`qkernel`]: scalars, q-Pochhammer symbols, q-Racah and dual
//!   q-Krawtchouk polynomials and their classical identities.
//! - [`polyops`]: sparse Laurent polynomials, q-shift operators and dense
//!   matrices on the monomial grid.
//! - [`onsager`]: model parameters and the operator families, built both from
//!   the q-difference formula and from the tensor recursion.
//! - [`bases`]: the `F`, `Ftilde` and `G` families.
//! - [`structure`]: block patterns and closed-form action coefficients.
//! - [`overlaps`]: q-Racah and dual q-Krawtchouk overlap tensors.
//! - [`suite`]: named verification suites producing JSON reports.

pub mod bases;
pub mod onsager;
pub mod overlaps;
pub mod polyops;
pub mod qkernel;
pub mod sampling;
pub mod structure;
pub mod suite;

#[cfg(test)]
mod testutil;

pub use qkernel::scalar::{close, rel_diff, Precision, C64};
