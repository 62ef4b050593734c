use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LaurentPoly, PolyError, ShiftOperator};
use crate::qkernel::{QPoint, C64};

/// Relative size of an out-of-grid coefficient, compared with the absolute
/// sum of its contributions, above which `to_matrix` reports leakage.
const LEAKAGE_TOL: f64 = 1e-12;

/// The monomials `z_1^{m_1} ... z_N^{m_N}` with `0 <= m_i <= 2 j_i`, indexed
/// lexicographically with `z_1` most significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceGrid {
    spins2: Vec<u32>,
}

impl SpaceGrid {
    pub fn new(spins2: Vec<u32>) -> Self {
        Self { spins2 }
    }

    pub fn spins2(&self) -> &[u32] {
        &self.spins2
    }

    pub fn nvars(&self) -> usize {
        self.spins2.len()
    }

    pub fn dimension(&self) -> usize {
        self.spins2.iter().map(|&t| t as usize + 1).product()
    }

    pub fn index_of(&self, exps: &[i32]) -> Option<usize> {
        if exps.len() != self.spins2.len() {
            return None;
        }
        let mut idx = 0usize;
        for (&e, &t) in exps.iter().zip(&self.spins2) {
            if e < 0 || e as u32 > t {
                return None;
            }
            idx = idx * (t as usize + 1) + e as usize;
        }
        Some(idx)
    }

    pub fn exps_of(&self, mut index: usize) -> Vec<i32> {
        let mut out = vec![0; self.spins2.len()];
        for (slot, &t) in out.iter_mut().zip(&self.spins2).rev() {
            let d = t as usize + 1;
            *slot = (index % d) as i32;
            index /= d;
        }
        out
    }

    /// All exponent vectors in index order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<i32>> + '_ {
        (0..self.dimension()).map(|k| self.exps_of(k))
    }

    /// Monomial coordinates of `f`; fails if `f` has a term outside the box.
    pub fn coords(&self, f: &LaurentPoly) -> Result<Vec<C64>, PolyError> {
        if f.nvars() != self.nvars() {
            return Err(PolyError::DimensionMismatch { expected: self.nvars(), found: f.nvars() });
        }
        let mut v = vec![C64::new(0.0, 0.0); self.dimension()];
        for (e, c) in f.terms() {
            match self.index_of(e) {
                Some(k) => v[k] = *c,
                None => return Err(PolyError::Leakage { monomial: vec![], exponent: e.clone() }),
            }
        }
        Ok(v)
    }

    /// The polynomial with the given monomial coordinates.
    pub fn poly(&self, coords: &[C64]) -> LaurentPoly {
        LaurentPoly::from_terms(self.nvars(), coords.iter().enumerate().map(|(k, &c)| (self.exps_of(k), c)))
            .expect("grid exponent vectors have the grid's length")
    }
}

/// Dense operator matrix; column `k` holds the image of basis vector `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRep {
    pub matrix: DMatrix<C64>,
}

impl MatrixRep {
    pub fn new(matrix: DMatrix<C64>) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for MatrixRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let z = self.matrix[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixJson { dim: n, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixRep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        if j.entries.len() != j.dim * j.dim {
            return Err(serde::de::Error::custom(format!(
                "expected {} entries for dim {}, found {}",
                j.dim * j.dim,
                j.dim,
                j.entries.len()
            )));
        }
        Ok(Self { matrix: DMatrix::from_row_iterator(j.dim, j.dim, j.entries.iter().map(|e| C64::new(e[0], e[1]))) })
    }
}

/// Matrix of `op` on the monomials of `grid`.
pub fn to_matrix(op: &ShiftOperator, grid: &SpaceGrid, q: &QPoint) -> Result<MatrixRep, PolyError> {
    if op.nvars() != grid.nvars() {
        return Err(PolyError::DimensionMismatch { expected: grid.nvars(), found: op.nvars() });
    }
    let dim = grid.dimension();
    let columns: Vec<Vec<C64>> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let e = grid.exps_of(col);
            let mut acc: BTreeMap<Vec<i32>, (C64, f64)> = BTreeMap::new();
            for t in op.terms() {
                let k: i64 = e.iter().zip(&t.shifts).map(|(&a, &s)| a as i64 * s as i64).sum();
                let fac = q.pow(k);
                for (ce, cv) in t.coeff.terms() {
                    let out: Vec<i32> = e.iter().zip(ce).map(|(a, b)| a + b).collect();
                    let val = cv * fac;
                    let slot = acc.entry(out).or_insert((C64::new(0.0, 0.0), 0.0));
                    slot.0 += val;
                    slot.1 += val.norm();
                }
            }
            let mut column = vec![C64::new(0.0, 0.0); dim];
            for (out, (val, abs)) in acc {
                match grid.index_of(&out) {
                    Some(r) => column[r] = val,
                    None if val.norm() <= LEAKAGE_TOL * abs => {}
                    None => return Err(PolyError::Leakage { monomial: e.clone(), exponent: out }),
                }
            }
            Ok(column)
        })
        .collect::<Result<_, _>>()?;
    let mut m = DMatrix::zeros(dim, dim);
    for (c, column) in columns.into_iter().enumerate() {
        for (r, v) in column.into_iter().enumerate() {
            m[(r, c)] = v;
        }
    }
    Ok(MatrixRep::new(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp() -> QPoint {
        QPoint::new(C64::from_polar(0.8, 0.4)).unwrap()
    }

    #[test]
    fn grid_round_trip() {
        let g = SpaceGrid::new(vec![1, 3, 2]);
        assert_eq!(g.dimension(), 24);
        for k in 0..g.dimension() {
            assert_eq!(g.index_of(&g.exps_of(k)), Some(k));
        }
        assert_eq!(g.exps_of(1), vec![0, 0, 1]);
        assert_eq!(g.exps_of(3), vec![0, 1, 0]);
        assert_eq!(g.index_of(&[2, 0, 0]), None);
    }

    #[test]
    fn identity_operator_gives_identity_matrix() {
        let g = SpaceGrid::new(vec![2, 1]);
        let m = to_matrix(&ShiftOperator::identity(2), &g, &qp()).unwrap();
        assert_eq!(m, MatrixRep::identity(6));
    }

    #[test]
    fn leakage_is_an_error() {
        let g = SpaceGrid::new(vec![1]);
        let mut op = ShiftOperator::zero(1);
        op.push(LaurentPoly::var(1, 0), vec![0]).unwrap();
        match to_matrix(&op, &g, &qp()) {
            Err(PolyError::Leakage { monomial, exponent }) => {
                assert_eq!(monomial, vec![1]);
                assert_eq!(exponent, vec![2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn matrix_json_is_row_major() {
        let m = MatrixRep::new(DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(2.0, 0.5), C64::new(3.0, 0.0), C64::new(4.0, -1.0)],
        ));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "{\"dim\":2,\"entries\":[[1.0,0.0],[2.0,0.5],[3.0,0.0],[4.0,-1.0]]}");
        let back: MatrixRep = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
