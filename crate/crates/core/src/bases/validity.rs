use serde::Serialize;

use super::lattice::{z_bar, z_pm, zt_pm};
use super::{basis_matrix, BasisKind};
use crate::onsager::ModelParams;
use crate::polyops::linalg::condition_number;
use crate::qkernel::C64;

/// Exclusion tolerance for the parameter conditions (relative distance).
pub const EXCLUSION_TOL: f64 = 1e-6;

/// Condition number above which a basis counts as numerically unusable.
pub const MAX_BASIS_CONDITION: f64 = 1e8;

/// One evaluated exclusion condition that failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityFlag {
    /// `ratio`, `nonzero` or `distinct`.
    pub condition: &'static str,
    pub level: usize,
    pub other_level: Option<usize>,
    pub prefix_sum: i64,
    /// Relative distance to the excluded value.
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidityReport {
    pub kind: BasisKind,
    pub checked: usize,
    pub failures: Vec<ValidityFlag>,
    /// Smallest relative distance to an excluded value over all conditions.
    pub min_margin: f64,
    pub condition: f64,
}

impl ValidityReport {
    pub fn flags_pass(&self) -> bool {
        self.failures.is_empty()
    }

    /// Flags pass and the change-of-basis matrix is well conditioned.
    pub fn passes(&self) -> bool {
        self.flags_pass() && self.condition <= MAX_BASIS_CONDITION
    }
}

struct Collector {
    checked: usize,
    failures: Vec<ValidityFlag>,
    min_margin: f64,
}

impl Collector {
    fn record(
        &mut self,
        condition: &'static str,
        level: usize,
        other_level: Option<usize>,
        prefix_sum: i64,
        margin: f64,
    ) {
        self.checked += 1;
        self.min_margin = self.min_margin.min(margin);
        if margin <= EXCLUSION_TOL {
            self.failures.push(ValidityFlag { condition, level, other_level, prefix_sum, margin });
        }
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// The two lattice base points checked for each kind: `(z-, z+)` for `F`,
/// `(zt-, zt+)` for `Ftilde`, `(z-, zbar+)` for `G`.
fn pair(kind: BasisKind, p: &ModelParams, level: usize, s: i64) -> (C64, C64) {
    match kind {
        BasisKind::F => z_pm(p, level, s),
        BasisKind::Ftilde => zt_pm(p, level, s),
        BasisKind::G => (z_pm(p, level, s).0, z_bar(p, level, s).1),
    }
}

/// Evaluates every exclusion condition on the lattices of `kind` over all
/// reachable prefixes, and the condition number of the change-of-basis matrix.
///
/// `F`, `Ftilde`: `z+/z- ∉ {q^{2k} : |k| <= 2j-1}`, nonzero base points,
/// base points distinct across levels. `G`: `zbar+/z- ∉ {q^{-2k} : 0 <= k <= 2j-1}`,
/// nonzero, distinct across levels.
pub fn check_basis_validity(kind: BasisKind, p: &ModelParams) -> ValidityReport {
    let mut c = Collector { checked: 0, failures: Vec::new(), min_margin: f64::INFINITY };
    let n = p.nlevels();
    for level in 1..=n {
        let t = p.spins2[level - 1] as i64;
        let excluded: Vec<i64> = match kind {
            BasisKind::G => (0..t).map(|k| -k).collect(),
            _ => (-(t - 1)..=(t - 1)).collect(),
        };
        for s in 0..=p.spin_sum2(level - 1) {
            let (a, b) = pair(kind, p, level, s);
            let ratio = b / a;
            let margin = excluded.iter().map(|&k| rel(ratio, p.q.pow(2 * k))).fold(f64::INFINITY, f64::min);
            c.record("ratio", level, None, s, margin);
            c.record("nonzero", level, None, s, a.norm().min(b.norm()));
            for other in level + 1..=n {
                for s2 in 0..=p.spin_sum2(other - 1) {
                    let (a2, b2) = pair(kind, p, other, s2);
                    c.record("distinct", level, Some(other), s, rel(a, a2).min(rel(b, b2)));
                }
            }
        }
    }
    ValidityReport {
        kind,
        checked: c.checked,
        failures: c.failures,
        min_margin: c.min_margin,
        condition: condition_number(&basis_matrix(kind, p)),
    }
}

/// Copy of `p` with `e^alpha = q^{2 j_1 - 1}`, so that `z+^(1)/z-^(1) = q^{4 j_1 - 2}`.
pub fn cond1_violation(p: &ModelParams) -> ModelParams {
    let t = p.spins2[0] as i64;
    ModelParams { exp_alpha: p.q.pow(t - 1), ..p.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::params;

    #[test]
    fn generic_parameters_pass() {
        let p = params(&[1, 2, 1]);
        for kind in [BasisKind::F, BasisKind::Ftilde, BasisKind::G] {
            let r = check_basis_validity(kind, &p);
            assert!(r.passes(), "{kind}: {:?} cond {}", r.failures, r.condition);
        }
    }

    #[test]
    fn spin_half_single_site_has_full_rank() {
        let r = check_basis_validity(BasisKind::F, &params(&[1]));
        assert!(r.condition.is_finite() && r.condition < 1e4);
    }

    #[test]
    fn constructed_degeneracy_is_flagged_and_singular() {
        for spins in [vec![1], vec![2, 1], vec![3]] {
            let p = cond1_violation(&params(&spins));
            let r = check_basis_validity(BasisKind::F, &p);
            assert!(!r.flags_pass());
            assert!(r.failures.iter().any(|f| f.condition == "ratio" && f.level == 1));
            assert!(r.condition > 1e10, "{spins:?}: {}", r.condition);
        }
    }
}
