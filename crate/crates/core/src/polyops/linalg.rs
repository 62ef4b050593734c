//! Dense complex linear algebra helpers.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{LaurentPoly, PolyError, SpaceGrid};
use crate::qkernel::{Cdd, Field, C64};

/// Condition number above which a basis is rejected by [`expand_in_basis`].
pub const SINGULAR_CONDITION: f64 = 1e12;

/// 2-norm condition number from the singular values; infinite when singular.
pub fn condition_number(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigenvalues of a general complex matrix, or `None` when the iteration
/// does not converge.
pub fn eigenvalues(m: &DMatrix<C64>) -> Option<Vec<C64>> {
    let n = m.nrows();
    let fm = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| faer::c64::new(m[(i, j)].re, m[(i, j)].im));
    let ev = fm.eigenvalues().ok()?;
    Some(ev.iter().map(|z| C64::new(z.re, z.im)).collect())
}

/// Solves `a x = b` by LU, returning `SingularBasis` if `a` has condition above `max_condition`.
pub fn solve(a: &DMatrix<C64>, b: &DMatrix<C64>, max_condition: f64) -> Result<DMatrix<C64>, PolyError> {
    if a.nrows() != b.nrows() {
        return Err(PolyError::Shape(a.nrows(), b.nrows()));
    }
    let condition = condition_number(a);
    if condition > max_condition {
        return Err(PolyError::SingularBasis { condition });
    }
    a.clone().lu().solve(b).ok_or(PolyError::SingularBasis { condition })
}

/// `B^-1 Op B` with the product and the pivoted LU solve carried out in
/// double-double arithmetic.
pub fn conjugate_extended(op: &DMatrix<C64>, basis: &DMatrix<C64>) -> Result<DMatrix<C64>, PolyError> {
    let n = basis.nrows();
    if op.ncols() != n || op.nrows() != n || basis.ncols() != n {
        return Err(PolyError::Shape(op.nrows(), n));
    }
    let lift = |m: &DMatrix<C64>| -> Vec<Vec<Cdd>> {
        (0..n).map(|r| (0..n).map(|c| Cdd::from_c64(m[(r, c)])).collect()).collect()
    };
    let mut a = lift(basis);
    let w = lift(op);
    let mut x: Vec<Vec<Cdd>> =
        (0..n).map(|r| (0..n).map(|c| (0..n).fold(Cdd::zero(), |acc, k| acc + w[r][k] * a[k][c])).collect()).collect();
    let singular = || PolyError::SingularBasis { condition: f64::INFINITY };
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].modulus().total_cmp(&a[j][k].modulus())).ok_or_else(singular)?;
        if a[piv][k].modulus() == 0.0 {
            return Err(singular());
        }
        a.swap(k, piv);
        x.swap(k, piv);
        let (pivot_a, pivot_x) = (a[k].clone(), x[k].clone());
        for i in k + 1..n {
            let f = a[i][k] / pivot_a[k];
            for (dst, &src) in a[i][k..].iter_mut().zip(&pivot_a[k..]) {
                *dst = *dst - f * src;
            }
            for (dst, &src) in x[i].iter_mut().zip(&pivot_x) {
                *dst = *dst - f * src;
            }
        }
    }
    for i in (0..n).rev() {
        let (solved, rest) = x.split_at_mut(i + 1);
        let row = &mut solved[i];
        for (k, xk) in rest.iter().enumerate() {
            let coef = a[i][i + 1 + k];
            for (dst, &src) in row.iter_mut().zip(xk) {
                *dst = *dst - coef * src;
            }
        }
        for v in row.iter_mut() {
            *v = *v / a[i][i];
        }
    }
    Ok(DMatrix::from_fn(n, n, |r, c| x[r][c].to_c64()))
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Coefficients of a basis expansion together with solve diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct Expansion {
    pub coeffs: Vec<C64>,
    /// `max |B c - t| / max(1, max |t|)`.
    pub residual: f64,
    pub condition: f64,
}

/// Matrix whose column `k` holds the monomial coordinates of `basis[k]`.
pub fn basis_matrix(basis: &[LaurentPoly], grid: &SpaceGrid) -> Result<DMatrix<C64>, PolyError> {
    let dim = grid.dimension();
    let mut m = DMatrix::zeros(dim, basis.len());
    for (k, b) in basis.iter().enumerate() {
        for (r, v) in grid.coords(b)?.into_iter().enumerate() {
            m[(r, k)] = v;
        }
    }
    Ok(m)
}

/// Expands `target` as `sum_k c_k basis[k]` by a dense solve against monomial coordinates.
pub fn expand_in_basis(target: &LaurentPoly, basis: &[LaurentPoly], grid: &SpaceGrid) -> Result<Expansion, PolyError> {
    let dim = grid.dimension();
    if basis.len() != dim {
        return Err(PolyError::BasisSize { expected: dim, found: basis.len() });
    }
    let b = basis_matrix(basis, grid)?;
    let t = DVector::from_vec(grid.coords(target)?);
    let condition = condition_number(&b);
    if condition > SINGULAR_CONDITION {
        return Err(PolyError::SingularBasis { condition });
    }
    let c = b.clone().lu().solve(&t).ok_or(PolyError::SingularBasis { condition })?;
    let r = &b * &c - &t;
    let tmax = t.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let residual = r.iter().fold(0.0f64, |m, z| m.max(z.norm())) / tmax.max(1.0);
    Ok(Expansion { coeffs: c.iter().copied().collect(), residual, condition })
}

/// Pairs each predicted value with its nearest unused computed value and
/// returns the largest distance relative to `max(1, |predicted|)`.
///
/// Returns infinity when the two lists differ in length.
pub fn multiset_distance(predicted: &[C64], computed: &[C64]) -> f64 {
    if predicted.len() != computed.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; computed.len()];
    let mut worst = 0.0f64;
    for &p in predicted {
        let mut best: Option<(usize, f64)> = None;
        for (k, &c) in computed.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = (p - c).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        let (k, d) = best.expect("lists have equal length");
        used[k] = true;
        worst = worst.max(d / p.norm().max(1.0));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn expansion_of_own_element_is_unit_vector() {
        let g = SpaceGrid::new(vec![2]);
        let basis = vec![
            LaurentPoly::from_terms(1, vec![(vec![0], c(1.0, 0.0)), (vec![1], c(0.5, 0.2))]).unwrap(),
            LaurentPoly::from_terms(1, vec![(vec![1], c(1.0, 0.0)), (vec![2], c(-0.3, 0.0))]).unwrap(),
            LaurentPoly::from_terms(1, vec![(vec![2], c(1.0, 1.0)), (vec![0], c(0.1, 0.0))]).unwrap(),
        ];
        let e = expand_in_basis(&basis[1], &basis, &g).unwrap();
        for (k, v) in e.coeffs.iter().enumerate() {
            let want = if k == 1 { 1.0 } else { 0.0 };
            assert!((v - c(want, 0.0)).norm() < 1e-14);
        }
        let z = expand_in_basis(&LaurentPoly::zero(1), &basis, &g).unwrap();
        assert!(z.coeffs.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn singular_basis_is_rejected() {
        let g = SpaceGrid::new(vec![1]);
        let f = LaurentPoly::var(1, 0);
        let err = expand_in_basis(&f, &[f.clone(), f.clone()], &g).unwrap_err();
        assert!(matches!(err, PolyError::SingularBasis { .. }));
    }

    #[test]
    fn schur_eigenvalues_of_triangular_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(3.0, 0.0), c(0.0, 0.0), c(-2.0, 0.5)]);
        let ev = eigenvalues(&m).unwrap();
        assert!(multiset_distance(&[c(-2.0, 0.5), c(1.0, 1.0)], &ev) < 1e-13);
        assert!(multiset_distance(&[c(1.0, 1.0), c(1.0, 1.0)], &ev) > 1.0);
    }
}
