use serde::{Deserialize, Serialize};

use super::scalar::C64;
use super::QKernelError;

/// The deformation parameter together with a fixed square root and logarithm.
///
/// Half-integer powers `q^{m/2}` are taken as integer powers of `qhalf`, and
/// complex powers `q^x` as `exp(x * log_q)` with `log_q = 2 ln(qhalf)`, so that
/// all powers of `q` used by one parameter set sit on a single branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QPoint {
    q: C64,
    qhalf: C64,
    log_q: C64,
}

impl QPoint {
    /// Uses the principal square root of `q`.
    pub fn new(q: C64) -> Result<Self, QKernelError> {
        if q.norm() == 0.0 || !q.is_finite() {
            return Err(QKernelError::DegenerateQ(q));
        }
        Self::from_half(q.sqrt())
    }

    pub fn from_half(qhalf: C64) -> Result<Self, QKernelError> {
        if qhalf.norm() == 0.0 || !qhalf.is_finite() {
            return Err(QKernelError::DegenerateQ(qhalf * qhalf));
        }
        Ok(Self { q: qhalf * qhalf, qhalf, log_q: 2.0 * qhalf.ln() })
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn qhalf(&self) -> C64 {
        self.qhalf
    }

    pub fn log_q(&self) -> C64 {
        self.log_q
    }

    /// `q^2`, the base of every q-Pochhammer symbol in the model.
    pub fn qsq(&self) -> C64 {
        self.q * self.q
    }

    /// `q^n`.
    pub fn pow(&self, n: i64) -> C64 {
        self.qhalf_pow(2 * n)
    }

    /// `q^{m/2}`.
    pub fn qhalf_pow(&self, m: i64) -> C64 {
        super::scalar::Field::powi(self.qhalf, m)
    }

    /// `q^x` for complex `x` on the branch fixed by `qhalf`.
    pub fn cpow(&self, x: C64) -> C64 {
        (x * self.log_q).exp()
    }

    /// The point `q^{-1}` with root `qhalf^{-1}`.
    pub fn inverse(&self) -> Self {
        Self { q: 1.0 / self.q, qhalf: 1.0 / self.qhalf, log_q: -self.log_q }
    }

    /// Genericity guard: `|q^k - 1| > floor` for `1 <= k <= kmax`.
    pub fn is_generic(&self, kmax: u32, floor: f64) -> bool {
        let mut qk = C64::new(1.0, 0.0);
        for _ in 0..kmax {
            qk *= self.q;
            if (qk - 1.0).norm() <= floor {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::scalar::close;

    #[test]
    fn half_power_squares_to_q() {
        let p = QPoint::new(C64::new(-0.6, 0.5)).unwrap();
        assert!(close(p.qhalf() * p.qhalf(), p.q(), 1e-15));
        assert!(close(p.cpow(C64::new(1.0, 0.0)), p.q(), 1e-14));
        assert!(close(p.cpow(C64::new(0.5, 0.0)), p.qhalf(), 1e-14));
        assert!(close(p.qhalf_pow(-3), 1.0 / (p.qhalf() * p.q()), 1e-14));
    }

    #[test]
    fn inverse_point_is_consistent() {
        let p = QPoint::new(C64::new(0.8, 0.3)).unwrap();
        let r = p.inverse();
        assert!(close(r.q() * p.q(), C64::new(1.0, 0.0), 1e-15));
        assert!(close(r.cpow(C64::new(0.3, 0.2)) * p.cpow(C64::new(0.3, 0.2)), C64::new(1.0, 0.0), 1e-14));
    }

    #[test]
    fn roots_of_unity_fail_the_guard() {
        let w = QPoint::new(C64::from_polar(1.0, std::f64::consts::PI / 3.0)).unwrap();
        assert!(!w.is_generic(12, 1e-6));
        let g = QPoint::new(C64::from_polar(0.8, 0.4)).unwrap();
        assert!(g.is_generic(40, 1e-6));
        assert!(QPoint::new(C64::new(0.0, 0.0)).is_err());
    }
}
