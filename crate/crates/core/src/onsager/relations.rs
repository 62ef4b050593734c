use nalgebra::DMatrix;

use super::OnsagerError;
use crate::polyops::MatrixRep;
use crate::qkernel::C64;

fn commutator(x: &DMatrix<C64>, y: &DMatrix<C64>) -> DMatrix<C64> {
    x * y - y * x
}

fn q_commutator(x: &DMatrix<C64>, y: &DMatrix<C64>, q: C64) -> DMatrix<C64> {
    x * y * q - y * x / q
}

fn relation(a: &DMatrix<C64>, b: &DMatrix<C64>, rho: C64, q: C64) -> DMatrix<C64> {
    let inner = q_commutator(a, &q_commutator(a, b, q), 1.0 / q);
    commutator(a, &inner) - commutator(a, b) * rho
}

/// Residual of `[A,[A,[A,B]_q]_{q^{-1}}] = rho [A,B]` and its mirror with
/// `A <-> B`, where `[X,Y]_q = q XY - q^{-1} YX`.
///
/// Measured as the max-entry norm divided by `s^3`, `s` the largest entry
/// modulus of `A` and `B`, so the value is invariant under common rescaling
/// of `(A, B, sqrt(rho))`.
pub fn verify_qonsager(a: &MatrixRep, b: &MatrixRep, rho: C64, q: C64) -> Result<f64, OnsagerError> {
    if a.dim() != b.dim() {
        return Err(OnsagerError::Shape(a.dim(), b.dim()));
    }
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        return Ok(0.0);
    }
    let r1 = relation(&a.matrix, &b.matrix, rho, q).camax();
    let r2 = relation(&b.matrix, &a.matrix, rho, q).camax();
    Ok(r1.max(r2) / scale.powi(3))
}

/// Largest pairwise commutator, relative to the square of the largest entry.
pub fn verify_commuting(family: &[MatrixRep]) -> Result<f64, OnsagerError> {
    let Some(first) = family.first() else {
        return Ok(0.0);
    };
    if let Some(bad) = family.iter().find(|m| m.dim() != first.dim()) {
        return Err(OnsagerError::Shape(first.dim(), bad.dim()));
    }
    let scale = family.iter().fold(0.0f64, |s, m| s.max(m.max_abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for (k, x) in family.iter().enumerate() {
        for y in &family[k + 1..] {
            worst = worst.max(commutator(&x.matrix, &y.matrix).camax());
        }
    }
    Ok(worst / (scale * scale))
}
