use nalgebra::DMatrix;

use super::{Family, ModelParams, OnsagerError};
use crate::polyops::MatrixRep;
use crate::qkernel::{qnumber, QPoint, C64};

/// One-site operators `S+`, `S-`, `q^{s3}` on `{1, z, .., z^{2j}}`:
/// `S+ z^m = [2j - m] z^{m+1}`, `S- z^m = [m] z^{m-1}`, `q^{s3} z^m = q^{m - j} z^m`.
struct SiteOps {
    splus: DMatrix<C64>,
    sminus: DMatrix<C64>,
    qs3: DMatrix<C64>,
    qs3_inv: DMatrix<C64>,
}

fn site_ops(spin2: u32, q: &QPoint) -> SiteOps {
    let d = spin2 as usize + 1;
    let t = spin2 as i64;
    let mut splus = DMatrix::zeros(d, d);
    let mut sminus = DMatrix::zeros(d, d);
    let mut qs3 = DMatrix::zeros(d, d);
    let mut qs3_inv = DMatrix::zeros(d, d);
    for m in 0..d {
        let mi = m as i64;
        if m + 1 < d {
            splus[(m + 1, m)] = qnumber(t - mi, q.q()).expect("generic q");
        }
        if m >= 1 {
            sminus[(m - 1, m)] = qnumber(mi, q.q()).expect("generic q");
        }
        qs3[(m, m)] = q.qhalf_pow(2 * mi - t);
        qs3_inv[(m, m)] = q.qhalf_pow(t - 2 * mi);
    }
    SiteOps { splus, sminus, qs3, qs3_inv }
}

/// Residual of `Omega = (q^{-1} q^{2 s3} + q q^{-2 s3}) / (q - q^{-1})^2 + S+ S-`
/// against `omega_j = (q^{2j+1} + q^{-2j-1}) / (q - q^{-1})^2` times the identity.
pub fn casimir_residual(spin2: u32, q: &QPoint) -> f64 {
    let s = site_ops(spin2, q);
    let qq = q.q();
    let den = (qq - 1.0 / qq).powi(2);
    let omega = (&s.qs3 * &s.qs3 / qq + &s.qs3_inv * &s.qs3_inv * qq) / den + &s.splus * &s.sminus;
    let t = spin2 as i64;
    let w = (q.pow(t + 1) + q.pow(-t - 1)) / den;
    let d = spin2 as usize + 1;
    (omega - DMatrix::<C64>::identity(d, d) * w).camax() / w.norm().max(1.0)
}

/// `W^(i)` from the recursion `W^(i) = X_i ⊗ 1 + Q_i ⊗ W^(i-1)` read in the
/// lexicographic order of the grid (`z_1` most significant), with
/// `X_i = k+ v_i q^{1/2} S+ q^{s3} + k- v_i^{-1} q^{-1/2} S- q^{s3}`, `Q_i = q^{2 s3}`
/// for `W0` and `X_i = k+ v_i^{-1} q^{-1/2} S+ q^{-s3} + k- v_i q^{1/2} S- q^{-s3}`,
/// `Q_i = q^{-2 s3}` for `W1`. Level 0 is `eps+` (resp. `eps-`) times the identity.
pub fn build_w_tensor(level: usize, family: Family, p: &ModelParams) -> Result<MatrixRep, OnsagerError> {
    if level > p.nlevels() {
        return Err(OnsagerError::LevelOutOfRange { level, nlevels: p.nlevels() });
    }
    let eps = match family {
        Family::W0 => p.eps_plus(),
        Family::W1 => p.eps_minus(),
    };
    let mut w = DMatrix::from_element(1, 1, eps);
    let (kp, km, qh) = (p.kplus(), p.kminus(), p.q.qhalf());
    for k in 0..level {
        let s = site_ops(p.spins2[k], &p.q);
        let v = p.evals[k];
        let (x, q2) = match family {
            Family::W0 => {
                ((&s.splus * &s.qs3) * (kp * v * qh) + (&s.sminus * &s.qs3) * (km / (v * qh)), &s.qs3 * &s.qs3)
            }
            Family::W1 => (
                (&s.splus * &s.qs3_inv) * (kp / (v * qh)) + (&s.sminus * &s.qs3_inv) * (km * v * qh),
                &s.qs3_inv * &s.qs3_inv,
            ),
        };
        let pre = w.nrows();
        w = DMatrix::<C64>::identity(pre, pre).kronecker(&x) + w.kronecker(&q2);
    }
    let post: usize = p.spins2[level..].iter().map(|&t| t as usize + 1).product();
    Ok(MatrixRep::new(w.kronecker(&DMatrix::<C64>::identity(post, post))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onsager::operator_matrix;
    use crate::testutil::params;

    #[test]
    fn casimir_is_scalar() {
        let q = QPoint::new(C64::from_polar(0.8, 0.35)).unwrap();
        for t in 1..=4 {
            assert!(casimir_residual(t, &q) < 1e-12);
        }
    }

    #[test]
    fn base_case_is_scalar() {
        let p = params(&[1, 2]);
        let m = build_w_tensor(0, Family::W1, &p).unwrap().matrix;
        assert!((m - DMatrix::<C64>::identity(6, 6) * p.eps_minus()).camax() < 1e-15);
    }

    #[test]
    fn recursion_matches_difference_operators() {
        for spins in [vec![1], vec![3], vec![1, 2, 1], vec![2, 3]] {
            let p = params(&spins);
            for level in 1..=spins.len() {
                for fam in [Family::W0, Family::W1] {
                    let a = build_w_tensor(level, fam, &p).unwrap().matrix;
                    let b = operator_matrix(fam, level, &p).unwrap().matrix;
                    let scale = a.camax().max(1.0);
                    assert!((a - b).camax() / scale < 1e-12, "{spins:?} {level} {fam}");
                }
            }
        }
    }
}
