use nalgebra::DMatrix;
use serde::Serialize;

use super::blocks::extract_action;
use super::closed_form::{coeffs_closed_form_n1, coeffs_closed_form_n2, Transcription, NINE_LABELS};
use super::split::split_coefficients_level;
use super::StructureError;
use crate::bases::{BasisFamily, BasisKind};
use crate::onsager::{operator_matrix, Family, ModelParams};
use crate::qkernel::C64;

/// One closed-form coefficient next to its extracted counterpart.
#[derive(Clone, Debug, Serialize)]
pub struct CoeffEntry {
    pub label: String,
    /// Source index of the basis vector acted on.
    pub index: Vec<u32>,
    pub closed_form: C64,
    pub extracted: C64,
    /// `|closed_form - extracted| / max(1, |extracted|)`.
    pub delta: f64,
    pub pass: bool,
}

/// Comparison of a set of closed-form coefficients against extraction.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CoeffTable {
    pub entries: Vec<CoeffEntry>,
    pub max_delta: f64,
    /// Labels with at least one failing entry.
    pub mismatched_labels: Vec<String>,
    /// Index offsets where extraction is nonzero but no closed form was compared.
    pub uncovered: Vec<Vec<i32>>,
}

impl CoeffTable {
    pub fn passes(&self) -> bool {
        self.mismatched_labels.is_empty() && self.uncovered.is_empty()
    }

    fn push(&mut self, label: &str, index: &[u32], closed_form: C64, extracted: C64, tol: f64) {
        let delta = (closed_form - extracted).norm() / extracted.norm().max(1.0);
        let pass = delta <= tol;
        self.max_delta = self.max_delta.max(delta);
        if !pass && !self.mismatched_labels.iter().any(|l| l == label) {
            self.mismatched_labels.push(label.to_string());
        }
        self.entries.push(CoeffEntry {
            label: label.to_string(),
            index: index.to_vec(),
            closed_form,
            extracted,
            delta,
            pass,
        });
    }

    /// Records offsets with entries above `tol` relative to the largest entry
    /// that are not among `covered`.
    fn scan_uncovered(&mut self, x: &DMatrix<C64>, basis: &BasisFamily, covered: &[Vec<i32>], tol: f64) {
        let scale = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for c in 0..basis.len() {
            for r in 0..basis.len() {
                let off: Vec<i32> =
                    basis.indices[r].iter().zip(&basis.indices[c]).map(|(&a, &b)| a as i32 - b as i32).collect();
                if x[(r, c)].norm() > tol * scale && !covered.contains(&off) && !self.uncovered.contains(&off) {
                    self.uncovered.push(off);
                }
            }
        }
        self.uncovered.sort();
    }
}

fn entry_at(x: &DMatrix<C64>, basis: &BasisFamily, source: usize, offset: &[i32]) -> Option<C64> {
    let target: Vec<u32> = basis.indices[source]
        .iter()
        .zip(offset)
        .map(|(&n, &d)| n as i64 + d as i64)
        .zip(&basis.spins2)
        .map(|(n, &t)| if (0..=t as i64).contains(&n) { Some(n as u32) } else { None })
        .collect::<Option<_>>()?;
    basis.indices.iter().position(|i| *i == target).map(|r| x[(r, source)])
}

fn require_levels(p: &ModelParams, n: usize) -> Result<(), StructureError> {
    p.validate()?;
    if p.nlevels() != n {
        return Err(StructureError::UnsupportedLevels(p.nlevels()));
    }
    Ok(())
}

/// One site: the three-term action of `W1` on `F`.
pub fn compare_n1(p: &ModelParams, tol: f64) -> Result<CoeffTable, StructureError> {
    require_levels(p, 1)?;
    let basis = BasisFamily::build(BasisKind::F, p)?;
    let x = extract_action(&operator_matrix(Family::W1, 1, p)?, &basis)?;
    let mut table = CoeffTable::default();
    for k in 0..basis.len() {
        let n = basis.indices[k][0];
        let c = coeffs_closed_form_n1(n, p)?;
        for (label, off, cf) in [("B", 1, c.raising), ("C", -1, c.lowering), ("A", 0, c.diagonal)] {
            let ex = entry_at(&x, &basis, k, &[off]).unwrap_or_default();
            table.push(label, &basis.indices[k], cf, ex, tol);
        }
    }
    table.scan_uncovered(&x, &basis, &[vec![1], vec![-1], vec![0]], tol);
    Ok(table)
}

/// Two sites: the nine-term action of `W1^(2)` on `F`.
pub fn compare_appendix_b(
    p: &ModelParams,
    transcription: Transcription,
    tol: f64,
) -> Result<CoeffTable, StructureError> {
    require_levels(p, 2)?;
    let basis = BasisFamily::build(BasisKind::F, p)?;
    let x = extract_action(&operator_matrix(Family::W1, 2, p)?, &basis)?;
    let mut table = CoeffTable::default();
    for k in 0..basis.len() {
        let (n1, n2) = (basis.indices[k][0], basis.indices[k][1]);
        let c = coeffs_closed_form_n2(n1, n2, p, transcription)?;
        for (slot, (label, (d1, d2))) in NINE_LABELS.iter().enumerate() {
            let ex = entry_at(&x, &basis, k, &[*d1, *d2]).unwrap_or_default();
            table.push(label, &basis.indices[k], c.values[slot], ex, tol);
        }
    }
    let covered: Vec<Vec<i32>> = NINE_LABELS.iter().map(|(_, (a, b))| vec![*a, *b]).collect();
    table.scan_uncovered(&x, &basis, &covered, tol);
    Ok(table)
}

fn split_extractions(
    p: &ModelParams,
    level: usize,
) -> Result<(BasisFamily, DMatrix<C64>, DMatrix<C64>), StructureError> {
    let basis = BasisFamily::build(BasisKind::G, p)?;
    let x0 = extract_action(&operator_matrix(Family::W0, level, p)?, &basis)?;
    let x1 = extract_action(&operator_matrix(Family::W1, level, p)?, &basis)?;
    Ok((basis, x0, x1))
}

/// One site: the off-diagonal coefficients of `W0` and `W1` on the split basis.
pub fn compare_split_n1(p: &ModelParams, tol: f64) -> Result<CoeffTable, StructureError> {
    require_levels(p, 1)?;
    let (basis, x0, x1) = split_extractions(p, 1)?;
    let mut table = CoeffTable::default();
    for k in 0..basis.len() {
        let c = split_coefficients_level(p, 1, basis.indices[k][0], 0);
        let d = entry_at(&x0, &basis, k, &[1]).unwrap_or_default();
        let e = entry_at(&x1, &basis, k, &[-1]).unwrap_or_default();
        table.push("D", &basis.indices[k], c.raising, d, tol);
        table.push("E", &basis.indices[k], c.lowering, e, tol);
    }
    Ok(table)
}

/// Two sites. The first table compares the level-2 coefficients
/// `W0^(2)`: `D[10] = q^{2j2} D^(1)_{n1}`, `D[01] = D^(2)_{n2}`;
/// `W1^(2)`: `E[-10] = q^{-2j2} E^(1)_{n1}`, `E[0-1] = E^(2)_{n2}`.
/// The second compares the one-site forms `D^(1)`, `E^(1)` against the
/// level-1 operators of the two-site chain.
pub fn compare_split_n2(p: &ModelParams, tol: f64) -> Result<(CoeffTable, CoeffTable), StructureError> {
    require_levels(p, 2)?;
    let qt = p.q.pow(p.spins2[1] as i64);
    let (basis, x0, x1) = split_extractions(p, 2)?;
    let (_, y0, y1) = split_extractions(p, 1)?;
    let mut level2 = CoeffTable::default();
    let mut level1 = CoeffTable::default();
    for k in 0..basis.len() {
        let (n1, n2) = (basis.indices[k][0], basis.indices[k][1]);
        let one = split_coefficients_level(p, 1, n1, 0);
        let two = split_coefficients_level(p, 2, n2, n1 as i64);
        let idx = &basis.indices[k];
        let at = |m: &DMatrix<C64>, off: [i32; 2]| entry_at(m, &basis, k, &off).unwrap_or_default();
        level2.push("D[10]", idx, qt * one.raising, at(&x0, [1, 0]), tol);
        level2.push("D[01]", idx, two.raising, at(&x0, [0, 1]), tol);
        level2.push("E[-10]", idx, one.lowering / qt, at(&x1, [-1, 0]), tol);
        level2.push("E[0-1]", idx, two.lowering, at(&x1, [0, -1]), tol);
        level1.push("D[10]", idx, one.raising, at(&y0, [1, 0]), tol);
        level1.push("E[-10]", idx, one.lowering, at(&y1, [-1, 0]), tol);
    }
    Ok((level2, level1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::params;

    #[test]
    fn one_site_tables_match() {
        for t in 1..=3 {
            let p = params(&[t]);
            let a = compare_n1(&p, 1e-8).unwrap();
            assert!(a.passes(), "{t}: {:?} {:?} {}", a.mismatched_labels, a.uncovered, a.max_delta);
            let s = compare_split_n1(&p, 1e-8).unwrap();
            assert!(s.passes(), "{t}: {:?}", s.mismatched_labels);
        }
    }

    #[test]
    fn two_site_nine_terms_match_corrected_and_flag_printed() {
        for spins in [[1u32, 1], [1, 2], [2, 2]] {
            let p = params(&spins);
            let fixed = compare_appendix_b(&p, Transcription::Corrected, 1e-7).unwrap();
            assert!(
                fixed.passes(),
                "{spins:?}: {:?} {:?} {}",
                fixed.mismatched_labels,
                fixed.uncovered,
                fixed.max_delta
            );
        }
        let p = params(&[2, 2]);
        let printed = compare_appendix_b(&p, Transcription::AsPrinted, 1e-7).unwrap();
        let mut labels = printed.mismatched_labels.clone();
        labels.sort();
        assert_eq!(labels, vec!["B[01]".to_string(), "C[0-1]".to_string()]);
    }

    #[test]
    fn two_site_split_level_two_matches() {
        for spins in [[1u32, 1], [2, 3]] {
            let p = params(&spins);
            let (level2, level1) = compare_split_n2(&p, 1e-8).unwrap();
            assert!(level2.passes(), "{spins:?}: {:?}", level2.mismatched_labels);
            assert!(!level1.passes());
        }
    }
}
