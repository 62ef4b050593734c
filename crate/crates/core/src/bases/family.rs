use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::lattice::factor_roots;
use super::{BasisError, BasisKind};
use crate::onsager::ModelParams;
use crate::polyops::LaurentPoly;
use crate::qkernel::C64;

/// A multi-index `(n_1, .., n_N)` with `0 <= n_i <= 2 j_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex {
    pub n: Vec<u32>,
}

impl MultiIndex {
    pub fn new(n: Vec<u32>, spins2: &[u32]) -> Result<Self, BasisError> {
        if n.len() != spins2.len() {
            return Err(BasisError::IndexLength { expected: spins2.len(), found: n.len() });
        }
        for (k, (&v, &t)) in n.iter().zip(spins2).enumerate() {
            if v > t {
                return Err(BasisError::IndexOutOfRange { level: k + 1, value: v, max: t });
            }
        }
        Ok(Self { n })
    }

    /// `N_i = n_1 + .. + n_i`; `N_0 = 0`.
    pub fn partial_sum(&self, i: usize) -> i64 {
        self.n[..i].iter().map(|&v| v as i64).sum()
    }

    /// All multi-indices in lexicographic order (`n_1` most significant).
    pub fn all(spins2: &[u32]) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex { n: Vec::new() }];
        for &t in spins2 {
            out = out
                .into_iter()
                .flat_map(|m| {
                    (0..=t).map(move |v| {
                        let mut n = m.n.clone();
                        n.push(v);
                        MultiIndex { n }
                    })
                })
                .collect();
        }
        out
    }

    /// Position in the lexicographic enumeration.
    pub fn position(&self, spins2: &[u32]) -> usize {
        self.n.iter().zip(spins2).fold(0, |acc, (&v, &t)| acc * (t as usize + 1) + v as usize)
    }
}

/// Ascending coefficients of `prod_r (z - r)` over `roots`.
fn monic_from_roots(roots: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= r * a;
        }
        c = next;
    }
    c
}

/// Ascending coefficients (length `2 j_i + 1`) of the level-`i` factor.
pub fn factor_coeffs(kind: BasisKind, p: &ModelParams, level: usize, n: u32, prefix_sum: i64) -> Vec<C64> {
    monic_from_roots(&factor_roots(kind, p, level, n, prefix_sum))
}

fn check_index(p: &ModelParams, level: usize, n: u32) -> Result<(), BasisError> {
    p.validate()?;
    if level == 0 || level > p.nlevels() {
        return Err(crate::onsager::OnsagerError::LevelOutOfRange { level, nlevels: p.nlevels() }.into());
    }
    let t = p.spins2[level - 1];
    if n > t {
        return Err(BasisError::IndexOutOfRange { level, value: n, max: t });
    }
    Ok(())
}

/// The level-`i` factor as a polynomial in `z_i` (inside `N` variables);
/// `prefix` holds `n_1 .. n_{i-1}`.
pub fn f_factor(
    kind: BasisKind,
    level: usize,
    n: u32,
    prefix: &[u32],
    p: &ModelParams,
) -> Result<LaurentPoly, BasisError> {
    check_index(p, level, n)?;
    if prefix.len() != level - 1 {
        return Err(BasisError::IndexLength { expected: level - 1, found: prefix.len() });
    }
    let s: i64 = prefix.iter().map(|&v| v as i64).sum();
    let coeffs = factor_coeffs(kind, p, level, n, s);
    let nv = p.nlevels();
    Ok(LaurentPoly::from_terms(
        nv,
        coeffs.into_iter().enumerate().map(|(k, c)| {
            let mut e = vec![0; nv];
            e[level - 1] = k as i32;
            (e, c)
        }),
    )?)
}

/// Monomial coordinates of one basis vector.
fn vector_coords(kind: BasisKind, idx: &MultiIndex, p: &ModelParams) -> Vec<C64> {
    let mut v = vec![C64::new(1.0, 0.0)];
    for level in 1..=p.nlevels() {
        let f = factor_coeffs(kind, p, level, idx.n[level - 1], idx.partial_sum(level - 1));
        v = v.iter().flat_map(|&a| f.iter().map(move |&b| a * b)).collect();
    }
    v
}

/// The basis vector of the given kind and index as a polynomial.
pub fn build_vector(kind: BasisKind, idx: &MultiIndex, p: &ModelParams) -> Result<LaurentPoly, BasisError> {
    p.validate()?;
    let idx = MultiIndex::new(idx.n.clone(), &p.spins2)?;
    Ok(p.grid().poly(&vector_coords(kind, &idx, p)))
}

pub fn build_f(idx: &MultiIndex, p: &ModelParams) -> Result<LaurentPoly, BasisError> {
    build_vector(BasisKind::F, idx, p)
}

pub fn build_ftilde(idx: &MultiIndex, p: &ModelParams) -> Result<LaurentPoly, BasisError> {
    build_vector(BasisKind::Ftilde, idx, p)
}

pub fn build_g(idx: &MultiIndex, p: &ModelParams) -> Result<LaurentPoly, BasisError> {
    build_vector(BasisKind::G, idx, p)
}

/// Change-of-basis matrix: column `k` holds the monomial coordinates of the
/// `k`-th vector in lexicographic index order.
pub fn basis_matrix(kind: BasisKind, p: &ModelParams) -> DMatrix<C64> {
    let idx = MultiIndex::all(&p.spins2);
    let cols: Vec<Vec<C64>> = idx.par_iter().map(|m| vector_coords(kind, m, p)).collect();
    let dim = cols.len();
    DMatrix::from_fn(dim, dim, |r, c| cols[c][r])
}

/// `lambda^(i) = (1/2) q^{(eta+eta')/2} (e^alpha q^{-2J_i + 2N_i} + e^{-alpha} q^{2J_i - 2N_i})`.
pub fn eigenvalue_lambda(level: usize, idx: &MultiIndex, p: &ModelParams) -> C64 {
    let s = p.spin_sum2(level) - 2 * idx.partial_sum(level);
    p.eps_prefactor() / 2.0 * (p.exp_alpha * p.q.pow(-s) + p.q.pow(s) / p.exp_alpha)
}

/// `lambdat^(i) = (1/2) q^{(eta+eta')/2} (e^{-alpha*} q^{-2J_i + 2Nt_i} + e^{alpha*} q^{2J_i - 2Nt_i})`.
pub fn lambda_tilde(level: usize, idx: &MultiIndex, p: &ModelParams) -> C64 {
    let s = p.spin_sum2(level) - 2 * idx.partial_sum(level);
    p.eps_prefactor() / 2.0 * (p.q.pow(-s) / p.exp_alphastar + p.exp_alphastar * p.q.pow(s))
}

/// An indexed polynomial family with its change-of-basis matrix.
///
/// `eigenvalues[k][i-1]` is the value of `W0^(i)` on vector `k` for `F` and
/// `G` (for `G` this is the diagonal entry of the bidiagonal action), and the
/// value of `W1^(i)` for `Ftilde`.
#[derive(Clone, Debug, Serialize)]
pub struct BasisFamily {
    pub kind: BasisKind,
    pub spins2: Vec<u32>,
    pub indices: Vec<Vec<u32>>,
    pub vectors: Vec<LaurentPoly>,
    pub eigenvalues: Vec<Vec<C64>>,
    #[serde(skip)]
    pub matrix: DMatrix<C64>,
}

impl BasisFamily {
    pub fn build(kind: BasisKind, p: &ModelParams) -> Result<Self, BasisError> {
        p.validate()?;
        let all = MultiIndex::all(&p.spins2);
        let matrix = basis_matrix(kind, p);
        let grid = p.grid();
        let vectors =
            (0..all.len()).map(|c| grid.poly(&matrix.column(c).iter().copied().collect::<Vec<_>>())).collect();
        let eigenvalues = all
            .iter()
            .map(|m| {
                (1..=p.nlevels())
                    .map(|l| match kind {
                        BasisKind::Ftilde => lambda_tilde(l, m, p),
                        _ => eigenvalue_lambda(l, m, p),
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            kind,
            spins2: p.spins2.clone(),
            indices: all.into_iter().map(|m| m.n).collect(),
            vectors,
            eigenvalues,
            matrix,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Grade `p_i = n_1 + .. + n_i` of vector `k`.
    pub fn grade(&self, level: usize, k: usize) -> i64 {
        self.indices[k][..level].iter().map(|&v| v as i64).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::z_pm;
    use crate::onsager::{operator_matrix, Family};
    use crate::qkernel::close;
    use crate::testutil::params;
    use nalgebra::DVector;

    #[test]
    fn spin_half_factors() {
        let p = params(&[1]);
        let (zm, zp) = z_pm(&p, 1, 0);
        let f0 = f_factor(BasisKind::F, 1, 0, &[], &p).unwrap();
        assert!(close(f0.coeff(&[0]), -zp, 1e-15));
        assert!(close(f0.coeff(&[1]), C64::new(1.0, 0.0), 0.0));
        let f1 = f_factor(BasisKind::F, 1, 1, &[], &p).unwrap();
        assert!(close(f1.coeff(&[0]), -zm, 1e-15));
        assert!(f_factor(BasisKind::F, 1, 2, &[], &p).is_err());
    }

    #[test]
    fn factors_are_monic() {
        let p = params(&[3, 2]);
        for kind in [BasisKind::F, BasisKind::Ftilde, BasisKind::G] {
            for n in 0..=2 {
                let f = f_factor(kind, 2, n, &[1], &p).unwrap();
                assert!(close(f.coeff(&[0, 2]), C64::new(1.0, 0.0), 1e-15));
            }
        }
    }

    #[test]
    fn single_level_vector_is_the_factor() {
        let p = params(&[2]);
        for n in 0..=2 {
            let v = build_f(&MultiIndex { n: vec![n] }, &p).unwrap();
            let f = f_factor(BasisKind::F, 1, n, &[], &p).unwrap();
            assert!(v.rel_distance(&f) < 1e-15);
        }
    }

    #[test]
    fn joint_eigenvectors() {
        let p = params(&[1, 2, 1]);
        for (kind, fam) in [(BasisKind::F, Family::W0), (BasisKind::Ftilde, Family::W1)] {
            let b = BasisFamily::build(kind, &p).unwrap();
            for level in 1..=3 {
                let w = operator_matrix(fam, level, &p).unwrap().matrix;
                for k in 0..b.len() {
                    let v: DVector<C64> = b.matrix.column(k).into();
                    let lam = b.eigenvalues[k][level - 1];
                    let r = (&w * &v - &v * lam).camax() / v.camax();
                    assert!(r < 1e-10, "{kind} level {level} vector {k}: {r}");
                }
            }
        }
    }

    #[test]
    fn lambda_symmetries_and_trace() {
        let p = params(&[2, 1]);
        let mid = MultiIndex { n: vec![1, 0] };
        assert!(close(eigenvalue_lambda(1, &mid, &p), p.eps_plus(), 1e-14));
        let mut flipped = p.clone();
        flipped.exp_alpha = 1.0 / p.exp_alpha;
        let a = MultiIndex { n: vec![0, 1] };
        let b = MultiIndex { n: vec![2, 0] };
        assert!(close(eigenvalue_lambda(2, &a, &p), eigenvalue_lambda(2, &b, &flipped), 1e-14));
        let w = operator_matrix(Family::W0, 2, &p).unwrap().matrix;
        let sum: C64 = MultiIndex::all(&p.spins2).iter().map(|m| eigenvalue_lambda(2, m, &p)).sum();
        assert!(close(w.trace(), sum, 1e-12));
    }

    #[test]
    fn enumeration_matches_grid() {
        let spins = [2, 1, 3];
        let g = crate::polyops::SpaceGrid::new(spins.to_vec());
        for (k, m) in MultiIndex::all(&spins).iter().enumerate() {
            assert_eq!(m.position(&spins), k);
            assert_eq!(g.exps_of(k), m.n.iter().map(|&v| v as i32).collect::<Vec<_>>());
        }
    }
}
