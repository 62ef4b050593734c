use serde::Serialize;

use super::BasisKind;
use crate::onsager::ModelParams;
use crate::qkernel::C64;

/// `(z-^(i), z+^(i))` for a prefix with `n_1 + .. + n_{i-1} = prefix_sum`:
/// `z±^(i) = -v_i^{-1} q^{-1/2 + j_i + (eta'-eta)/2} e^{±alpha} q^{∓2(J_{i-1} - N_{i-1})}`.
pub fn z_pm(p: &ModelParams, level: usize, prefix_sum: i64) -> (C64, C64) {
    let t = p.spins2[level - 1] as i64;
    let base = -p.q.qhalf_pow(t - 1) * p.lattice_prefactor() / p.evals[level - 1];
    let shift = p.spin_sum2(level - 1) - 2 * prefix_sum;
    let zplus = base * p.exp_alpha * p.q.pow(-shift);
    let zminus = base / p.exp_alpha * p.q.pow(shift);
    (zminus, zplus)
}

/// `(zt-^(i), zt+^(i))` for a prefix with `nt_1 + .. + nt_{i-1} = prefix_sum`:
/// `zt±^(i) = v_i q^{1/2 - j_i + (eta'-eta)/2} e^{±alpha*} q^{±2(J_{i-1} - Nt_{i-1})}`.
pub fn zt_pm(p: &ModelParams, level: usize, prefix_sum: i64) -> (C64, C64) {
    let t = p.spins2[level - 1] as i64;
    let base = p.q.qhalf_pow(1 - t) * p.lattice_prefactor() * p.evals[level - 1];
    let shift = p.spin_sum2(level - 1) - 2 * prefix_sum;
    let ztplus = base * p.exp_alphastar * p.q.pow(shift);
    let ztminus = base / p.exp_alphastar * p.q.pow(-shift);
    (ztminus, ztplus)
}

/// `(zbar-^(i), zbar+^(i))`: the dual lattice evaluated on the prefix of an
/// `F`/`G` index rather than an `Ftilde` index.
pub fn z_bar(p: &ModelParams, level: usize, prefix_sum: i64) -> (C64, C64) {
    zt_pm(p, level, prefix_sum)
}

/// All lattice base points at one level and prefix.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RootLattice {
    pub zminus: C64,
    pub zplus: C64,
    pub ztminus: C64,
    pub ztplus: C64,
    pub zbarplus: C64,
}

impl RootLattice {
    /// `prefix_sum` is the sum of the source prefix for `z`, `zbar` and of the
    /// target prefix for `zt`.
    pub fn new(p: &ModelParams, level: usize, prefix_sum: i64, dual_prefix_sum: i64) -> Self {
        let (zminus, zplus) = z_pm(p, level, prefix_sum);
        let (ztminus, ztplus) = zt_pm(p, level, dual_prefix_sum);
        let (_, zbarplus) = z_bar(p, level, prefix_sum);
        Self { zminus, zplus, ztminus, ztplus, zbarplus }
    }
}

/// Roots of the level factor of index `n` (`0 <= n <= 2j`).
///
/// - `F`: `z+ q^{-2k}` (`k < 2j - n`) and `z- q^{-2l}` (`l < n`).
/// - `Ftilde`: `zt+ q^{2k}` (`k < 2j - n`) and `zt- q^{2l}` (`l < n`).
/// - `G`: `z- q^{-2k}` (`k < n`) and `zbar+ q^{2l}` (`l < 2j - n`).
pub fn factor_roots(kind: BasisKind, p: &ModelParams, level: usize, n: u32, prefix_sum: i64) -> Vec<C64> {
    let t = p.spins2[level - 1];
    let lattice = |base: C64, count: u32, dir: i64| -> Vec<C64> {
        (0..count as i64).map(|k| base * p.q.pow(2 * dir * k)).collect()
    };
    match kind {
        BasisKind::F => {
            let (zm, zp) = z_pm(p, level, prefix_sum);
            [lattice(zp, t - n, -1), lattice(zm, n, -1)].concat()
        }
        BasisKind::Ftilde => {
            let (zm, zp) = zt_pm(p, level, prefix_sum);
            [lattice(zp, t - n, 1), lattice(zm, n, 1)].concat()
        }
        BasisKind::G => {
            let (zm, _) = z_pm(p, level, prefix_sum);
            let (_, zb) = z_bar(p, level, prefix_sum);
            [lattice(zm, n, -1), lattice(zb, t - n, 1)].concat()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::close;
    use crate::testutil::params;

    #[test]
    fn prefix_shift_law() {
        let p = params(&[2, 3, 1]);
        for level in 2..=3 {
            for s in 0..3 {
                let (zm0, zp0) = z_pm(&p, level, s);
                let (zm1, zp1) = z_pm(&p, level, s + 1);
                assert!(close(zp1, zp0 * p.q.pow(2), 1e-13));
                assert!(close(zm1, zm0 * p.q.pow(-2), 1e-13));
                let (tm0, tp0) = zt_pm(&p, level, s);
                let (tm1, tp1) = zt_pm(&p, level, s + 1);
                assert!(close(tp1, tp0 * p.q.pow(-2), 1e-13));
                assert!(close(tm1, tm0 * p.q.pow(2), 1e-13));
            }
        }
    }

    #[test]
    fn root_counts() {
        let p = params(&[3]);
        for kind in [BasisKind::F, BasisKind::Ftilde, BasisKind::G] {
            for n in 0..=3 {
                assert_eq!(factor_roots(kind, &p, 1, n, 0).len(), 3);
            }
        }
    }
}
