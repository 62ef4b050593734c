use serde::{Deserialize, Serialize};

use super::OnsagerError;
use crate::polyops::SpaceGrid;
use crate::qkernel::{QPoint, C64};

/// The free parameters `(q, eta, eta', alpha, alpha*, v_1..v_N, j_1..j_N)`.
///
/// `alpha` and `alpha*` enter only through `e^{±alpha}`, `e^{±alpha*}`, which
/// are stored directly. Spins are stored as the integers `2 j_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub q: QPoint,
    pub eta: C64,
    pub etaprime: C64,
    pub exp_alpha: C64,
    pub exp_alphastar: C64,
    pub evals: Vec<C64>,
    pub spins2: Vec<u32>,
}

impl ModelParams {
    pub fn new(
        q: QPoint,
        eta: C64,
        etaprime: C64,
        exp_alpha: C64,
        exp_alphastar: C64,
        evals: Vec<C64>,
        spins2: Vec<u32>,
    ) -> Result<Self, OnsagerError> {
        let p = Self { q, eta, etaprime, exp_alpha, exp_alphastar, evals, spins2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), OnsagerError> {
        if self.evals.len() != self.spins2.len() {
            return Err(OnsagerError::LengthMismatch { evals: self.evals.len(), spins: self.spins2.len() });
        }
        if let Some(i) = self.spins2.iter().position(|&t| t == 0) {
            return Err(OnsagerError::InvalidSpin { index: i + 1 });
        }
        if let Some(i) = self.evals.iter().position(|v| v.norm() == 0.0 || !v.is_finite()) {
            return Err(OnsagerError::ZeroEval { index: i + 1 });
        }
        for (name, z) in [("exp_alpha", self.exp_alpha), ("exp_alphastar", self.exp_alphastar)] {
            if z.norm() == 0.0 || !z.is_finite() {
                return Err(OnsagerError::BadExponential(name));
            }
        }
        Ok(())
    }

    pub fn nlevels(&self) -> usize {
        self.spins2.len()
    }

    pub fn grid(&self) -> SpaceGrid {
        SpaceGrid::new(self.spins2.clone())
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<(), OnsagerError> {
        if level == 0 || level > self.nlevels() {
            return Err(OnsagerError::LevelOutOfRange { level, nlevels: self.nlevels() });
        }
        Ok(())
    }

    /// `2 (j_1 + ... + j_i)` for `i = upto`.
    pub fn spin_sum2(&self, upto: usize) -> i64 {
        self.spins2[..upto].iter().map(|&t| t as i64).sum()
    }

    fn q_minus_inv(&self) -> C64 {
        self.q.q() - 1.0 / self.q.q()
    }

    pub fn kplus(&self) -> C64 {
        -self.q_minus_inv() / 2.0 * self.q.cpow(self.eta)
    }

    pub fn kminus(&self) -> C64 {
        self.q_minus_inv() / 2.0 * self.q.cpow(self.etaprime)
    }

    /// `q^{(eta + eta')/2}`.
    pub fn eps_prefactor(&self) -> C64 {
        self.q.cpow((self.eta + self.etaprime) / 2.0)
    }

    /// `q^{(eta' - eta)/2}`, the common factor of every root lattice.
    pub fn lattice_prefactor(&self) -> C64 {
        self.q.cpow((self.etaprime - self.eta) / 2.0)
    }

    pub fn eps_plus(&self) -> C64 {
        self.eps_prefactor() * (self.exp_alpha + 1.0 / self.exp_alpha) / 2.0
    }

    pub fn eps_minus(&self) -> C64 {
        self.eps_prefactor() * (self.exp_alphastar + 1.0 / self.exp_alphastar) / 2.0
    }

    pub fn rho(&self) -> C64 {
        let q = self.q.q();
        (q + 1.0 / q).powi(2) * self.kplus() * self.kminus()
    }

    fn site(&self, level: usize) -> (C64, i64) {
        (self.evals[level - 1], self.spins2[level - 1] as i64)
    }

    /// `b0^(i) = k+ v_i q^{1/2 - j_i} / (q - q^{-1})`; `level` is 1-based.
    pub fn b0(&self, level: usize) -> C64 {
        let (v, t) = self.site(level);
        self.kplus() * v * self.q.qhalf_pow(1 - t) / self.q_minus_inv()
    }

    /// `c0^(i) = -k- v_i^{-1} q^{-1/2 - j_i} / (q - q^{-1})`.
    pub fn c0(&self, level: usize) -> C64 {
        let (v, t) = self.site(level);
        -self.kminus() / v * self.q.qhalf_pow(-1 - t) / self.q_minus_inv()
    }

    /// `b1^(i) = k+ v_i^{-1} q^{-1/2 + j_i} / (q - q^{-1})`.
    pub fn b1(&self, level: usize) -> C64 {
        let (v, t) = self.site(level);
        self.kplus() / v * self.q.qhalf_pow(t - 1) / self.q_minus_inv()
    }

    /// `c1^(i) = -k- v_i q^{1/2 + j_i} / (q - q^{-1})`.
    pub fn c1(&self, level: usize) -> C64 {
        let (v, t) = self.site(level);
        -self.kminus() * v * self.q.qhalf_pow(1 + t) / self.q_minus_inv()
    }

    /// Parameters whose `W0` family equals this one's `W1` family and vice versa.
    ///
    /// The map is `q -> q^{-1}`, `v_i -> v_i^{-1}`, `eta -> -eta - i pi / ln q`,
    /// `eta' -> -eta' - i pi / ln q`, `e^alpha -> -e^{alpha*}`, `e^{alpha*} -> -e^alpha`.
    pub fn dual(&self) -> Self {
        let ipi_over_log = C64::new(0.0, std::f64::consts::PI) / self.q.log_q();
        Self {
            q: self.q.inverse(),
            eta: -self.eta - ipi_over_log,
            etaprime: -self.etaprime - ipi_over_log,
            exp_alpha: -self.exp_alphastar,
            exp_alphastar: -self.exp_alpha,
            evals: self.evals.iter().map(|v| 1.0 / v).collect(),
            spins2: self.spins2.clone(),
        }
    }

    /// The equivalent parameters with `eta'` shifted to zero: `(eta, eta') -> (eta - eta', 0)`.
    ///
    /// Every operator of the family is multiplied by `q^{-eta'}` under this change.
    pub fn without_etaprime(&self) -> Self {
        Self { eta: self.eta - self.etaprime, etaprime: C64::new(0.0, 0.0), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::close;

    fn sample() -> ModelParams {
        crate::testutil::params(&[1, 2])
    }

    #[test]
    fn derived_constants() {
        let p = sample();
        let q = p.q.q();
        assert!(close(p.rho(), (q + 1.0 / q).powi(2) * p.kplus() * p.kminus(), 1e-15));
        let cosh = (p.exp_alpha + 1.0 / p.exp_alpha) / 2.0;
        assert!(close(p.eps_plus(), p.q.cpow((p.eta + p.etaprime) / 2.0) * cosh, 1e-15));
        // b0 c0 = -k+ k- q^{-2j} / (q - 1/q)^2
        let lhs = p.b0(2) * p.c0(2);
        let rhs = -p.kplus() * p.kminus() * p.q.pow(-2) / (q - 1.0 / q).powi(2);
        assert!(close(lhs, rhs, 1e-14));
    }

    #[test]
    fn dual_keeps_k_and_swaps_eps() {
        let p = sample();
        let d = p.dual();
        assert!(close(d.kplus(), p.kplus(), 1e-13));
        assert!(close(d.kminus(), p.kminus(), 1e-13));
        assert!(close(d.eps_plus(), p.eps_minus(), 1e-13));
        assert!(close(d.eps_minus(), p.eps_plus(), 1e-13));
        assert!(close(d.b0(1), -p.b1(1), 1e-13));
        assert!(close(d.c0(2), -p.c1(2), 1e-13));
    }

    #[test]
    fn validation() {
        let mut p = sample();
        p.spins2[1] = 0;
        assert_eq!(p.validate(), Err(OnsagerError::InvalidSpin { index: 2 }));
        let mut p = sample();
        p.evals[0] = C64::new(0.0, 0.0);
        assert_eq!(p.validate(), Err(OnsagerError::ZeroEval { index: 1 }));
    }
}
