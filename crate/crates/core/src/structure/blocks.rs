use nalgebra::DMatrix;
use serde::Serialize;

use super::StructureError;
use crate::bases::BasisFamily;
use crate::polyops::linalg::{condition_number, conjugate_extended};
use crate::polyops::MatrixRep;
use crate::qkernel::C64;

/// Largest condition number of a basis accepted for extraction.
pub const EXTRACTION_MAX_CONDITION: f64 = 1e8;

/// `B^{-1} Op B`: column `k` holds the coordinates of `Op` applied to basis
/// vector `k`, expanded in the same basis.
pub fn extract_action(op: &MatrixRep, basis: &BasisFamily) -> Result<DMatrix<C64>, StructureError> {
    let condition = condition_number(&basis.matrix);
    if condition > EXTRACTION_MAX_CONDITION {
        return Err(StructureError::SingularBasis { condition });
    }
    Ok(conjugate_extended(&op.matrix, &basis.matrix)?)
}

/// Norms of the blocks `E_p X E_m` where `E_p` projects onto basis vectors of
/// grade `p` at the given level. Rows index the target grade, columns the
/// source grade.
#[derive(Clone, Debug, Serialize)]
pub struct BlockPattern {
    pub level: usize,
    pub grades: Vec<i64>,
    pub members: Vec<Vec<usize>>,
    pub max_entry: Vec<Vec<f64>>,
    pub frobenius: Vec<Vec<f64>>,
    pub total_max_entry: f64,
    pub total_frobenius: f64,
}

impl BlockPattern {
    pub fn new(x: &DMatrix<C64>, basis: &BasisFamily, level: usize) -> Self {
        let mut grades: Vec<i64> = (0..basis.len()).map(|k| basis.grade(level, k)).collect();
        grades.sort_unstable();
        grades.dedup();
        let members: Vec<Vec<usize>> =
            grades.iter().map(|&g| (0..basis.len()).filter(|&k| basis.grade(level, k) == g).collect()).collect();
        let ng = grades.len();
        let mut max_entry = vec![vec![0.0; ng]; ng];
        let mut frob2 = vec![vec![0.0; ng]; ng];
        for (a, rows) in members.iter().enumerate() {
            for (b, cols) in members.iter().enumerate() {
                for &r in rows {
                    for &c in cols {
                        let v = x[(r, c)].norm();
                        max_entry[a][b] = f64::max(max_entry[a][b], v);
                        frob2[a][b] += v * v;
                    }
                }
            }
        }
        Self {
            level,
            grades,
            members,
            max_entry,
            frobenius: frob2.iter().map(|row| row.iter().map(|v| v.sqrt()).collect()).collect(),
            total_max_entry: x.iter().fold(0.0, |m, z| m.max(z.norm())),
            total_frobenius: x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    /// Largest max-entry block norm with `|p - m| > bandwidth`, relative to the
    /// max-entry norm of the whole matrix.
    pub fn off_band(&self, bandwidth: i64) -> f64 {
        let mut worst = 0.0f64;
        for (a, &pa) in self.grades.iter().enumerate() {
            for (b, &pb) in self.grades.iter().enumerate() {
                if (pa - pb).abs() > bandwidth {
                    worst = worst.max(self.max_entry[a][b]);
                }
            }
        }
        if self.total_max_entry == 0.0 {
            0.0
        } else {
            worst / self.total_max_entry
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BandCheck {
    pub pattern: BlockPattern,
    pub bandwidth: i64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that `X` (already in basis coordinates) is block banded with the given bandwidth.
pub fn verify_block_band(
    x: &DMatrix<C64>,
    basis: &BasisFamily,
    level: usize,
    bandwidth: i64,
    tolerance: f64,
) -> BandCheck {
    let pattern = BlockPattern::new(x, basis, level);
    let residual = pattern.off_band(bandwidth);
    BandCheck { pattern, bandwidth, residual, tolerance, pass: residual <= tolerance }
}

/// Extracts `op` in `basis` and checks block tridiagonality in the level-`i` grading.
pub fn verify_block_tridiagonal(
    op: &MatrixRep,
    basis: &BasisFamily,
    level: usize,
    tolerance: f64,
) -> Result<BandCheck, StructureError> {
    let x = extract_action(op, basis)?;
    Ok(verify_block_band(&x, basis, level, 1, tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::BasisKind;
    use crate::onsager::{operator_matrix, Family};
    use crate::testutil::params;

    #[test]
    fn identity_extracts_to_identity() {
        let p = params(&[2, 1]);
        let b = BasisFamily::build(BasisKind::G, &p).unwrap();
        let x = extract_action(&MatrixRep::identity(6), &b).unwrap();
        assert!((x - DMatrix::<C64>::identity(6, 6)).camax() < 1e-10);
    }

    #[test]
    fn eigenbasis_gives_diagonal_and_dual_gives_tridiagonal() {
        let p = params(&[1, 2, 1]);
        let f = BasisFamily::build(BasisKind::F, &p).unwrap();
        let ft = BasisFamily::build(BasisKind::Ftilde, &p).unwrap();
        for level in 1..=3 {
            let w0 = operator_matrix(Family::W0, level, &p).unwrap();
            let w1 = operator_matrix(Family::W1, level, &p).unwrap();
            let x = extract_action(&w0, &f).unwrap();
            let diag = verify_block_band(&x, &f, level, 0, 1e-9);
            assert!(diag.pass, "level {level}: {}", diag.residual);
            let off = (0..x.nrows())
                .flat_map(|r| (0..x.ncols()).map(move |c| (r, c)))
                .filter(|(r, c)| r != c)
                .map(|(r, c)| x[(r, c)].norm())
                .fold(0.0, f64::max);
            assert!(off < 1e-9);
            assert!(verify_block_tridiagonal(&w1, &f, level, 1e-8).unwrap().pass);
            assert!(verify_block_tridiagonal(&w0, &ft, level, 1e-8).unwrap().pass);
            // The band is not vacuous: the second neighbour grade is reached by W1^2.
            if level > 1 {
                let x1 = extract_action(&w1, &f).unwrap();
                let sq = &x1 * &x1;
                assert!(verify_block_band(&sq, &f, level, 1, 1e-8).residual > 1e-6);
            }
        }
    }

    #[test]
    fn frobenius_blocks_partition_the_norm() {
        let p = params(&[2, 2]);
        let f = BasisFamily::build(BasisKind::F, &p).unwrap();
        let x = extract_action(&operator_matrix(Family::W1, 2, &p).unwrap(), &f).unwrap();
        let pat = BlockPattern::new(&x, &f, 1);
        let sum: f64 = pat.frobenius.iter().flatten().map(|v| v * v).sum();
        assert!((sum - pat.total_frobenius.powi(2)).abs() <= 1e-12 * sum);
    }
}
