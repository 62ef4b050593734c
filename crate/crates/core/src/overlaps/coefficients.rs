use super::OverlapError;
use crate::qkernel::special::qracah_unchecked;
use crate::qkernel::{dual_qkrawtchouk, qbinomial, qpochhammer, qpochhammer_multi, Field, C64};

fn finite(z: C64, what: &'static str) -> Result<C64, OverlapError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(OverlapError::Degenerate(what))
    }
}

fn check_range(n: usize, ntilde: usize, m: usize) -> Result<(), OverlapError> {
    if n > m || ntilde > m {
        return Err(OverlapError::IndexOutOfRange { n, ntilde, m });
    }
    Ok(())
}

fn pow(qsq: C64, k: i64) -> C64 {
    Field::powi(qsq, k)
}

/// Coefficient `C_n^nt(a, b, c, d; M)` of the expansion
/// `(a x; Q^-1)_n (b x; Q^-1)_{M-n} = sum_nt C_n^nt (c x; Q)_nt (d x; Q)_{M-nt}`
/// with `Q = qsq`:
///
/// `Q^{nt(nt-M)} [M, nt]_Q (Q^{1-M} b/d; Q)_nt (Q^{1-M} b/c; Q)_{M-nt} (Q^{1-n} a/c; Q)_n
///  / ((Q^{nt-M} c/d; Q)_nt (Q^{-nt} d/c; Q)_{M-nt} (Q^{1-M} b/c; Q)_n)
///  * R_n(mu(nt); Q^-M b/d, Q^-1 d/a, Q^{-M-1}, c/d; Q)`.
#[allow(clippy::too_many_arguments)]
pub fn overlap_c(
    n: usize,
    ntilde: usize,
    a: C64,
    b: C64,
    c: C64,
    d: C64,
    m: usize,
    qsq: C64,
) -> Result<C64, OverlapError> {
    overlap_c_in(n, ntilde, a, b, c, d, m, qsq)
}

/// [`overlap_c`] evaluated in any [`Field`].
#[allow(clippy::too_many_arguments)]
pub fn overlap_c_in<F: Field>(
    n: usize,
    ntilde: usize,
    a: F,
    b: F,
    c: F,
    d: F,
    m: usize,
    qsq: F,
) -> Result<F, OverlapError> {
    check_range(n, ntilde, m)?;
    let (ni, nt, mi) = (n as i64, ntilde as i64, m as i64);
    let num = qsq.powi(nt * (nt - mi))
        * qbinomial(m, nt, qsq)
        * qpochhammer(qsq.powi(1 - mi) * b / d, qsq, ntilde)
        * qpochhammer(qsq.powi(1 - mi) * b / c, qsq, m - ntilde)
        * qpochhammer(qsq.powi(1 - ni) * a / c, qsq, n);
    let den = qpochhammer(qsq.powi(nt - mi) * c / d, qsq, ntilde)
        * qpochhammer(qsq.powi(-nt) * d / c, qsq, m - ntilde)
        * qpochhammer(qsq.powi(1 - mi) * b / c, qsq, n);
    let r = qracah_unchecked(n, ntilde, qsq.powi(-mi) * b / d, d / (a * qsq), qsq.powi(-mi - 1), c / d, qsq);
    let v = num / den * r;
    finite(v.to_c64(), "overlap coefficient")?;
    Ok(v)
}

/// Prefactor shared by the fusion and inversion kernels, with `r = c/d`:
/// `Q^{l(2M-l)} / (d/c; Q)_M (Q^-M r, Q^-M; Q)_l / (Q, Q r; Q)_l
///  (1 - r Q^{2l-M}) / (1 - r Q^-M)`.
fn kernel_weight(l: usize, c: C64, d: C64, m: usize, qsq: C64) -> C64 {
    let r = c / d;
    let (li, mi) = (l as i64, m as i64);
    pow(qsq, li * (2 * mi - li)) / qpochhammer(d / c, qsq, m)
        * qpochhammer_multi(&[pow(qsq, -mi) * r, pow(qsq, -mi)], qsq, l)
        / qpochhammer_multi(&[qsq, qsq * r], qsq, l)
        * (1.0 - r * pow(qsq, 2 * li - mi))
        / (1.0 - r * pow(qsq, -mi))
}

/// The same coefficient as [`overlap_c`] through a sum of paired dual
/// q-Krawtchouk polynomials:
///
/// `C_n^nt = r^{-nt} W_nt sum_k Q^{-kM} (b/c)^k (Q^M; Q^-1)_k / (Q^-1; Q^-1)_k
///  K_k(n; a/b, M; Q^-1) K_k(nt; c/d, M; Q)`
///
/// where `W_nt` is the inversion weight at `r = c/d`.
#[allow(clippy::too_many_arguments)]
pub fn fusion_c(
    n: usize,
    ntilde: usize,
    a: C64,
    b: C64,
    c: C64,
    d: C64,
    m: usize,
    qsq: C64,
) -> Result<C64, OverlapError> {
    check_range(n, ntilde, m)?;
    let qinv = 1.0 / qsq;
    let mi = m as i64;
    let pre = kernel_weight(ntilde, c, d, m, qsq) / (c / d).powi(ntilde as i64);
    let sum: C64 = (0..=m)
        .map(|k| {
            pow(qsq, -(k as i64) * mi) * (b / c).powi(k as i64) * qpochhammer(pow(qsq, mi), qinv, k)
                / qpochhammer(qinv, qinv, k)
                * dual_qkrawtchouk(k, n, a / b, m, qinv)
                * dual_qkrawtchouk(k, ntilde, c / d, m, qsq)
        })
        .sum();
    finite(pre * sum, "fusion coefficient")
}

/// Inversion kernel: `y^n = sum_l kernel(n, l) (c y; Q)_l (d y; Q)_{M-l}` with
/// `kernel(n, l) = (d/c)^l c^-n W_l K_n(l; c/d, M; Q)`.
pub fn inversion_kernel(n: usize, l: usize, c: C64, d: C64, m: usize, qsq: C64) -> Result<C64, OverlapError> {
    check_range(n, l, m)?;
    let v = (d / c).powi(l as i64)
        * c.powi(-(n as i64))
        * kernel_weight(l, c, d, m, qsq)
        * dual_qkrawtchouk(n, l, c / d, m, qsq);
    finite(v, "inversion kernel")
}

fn pointwise(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(1.0)
}

/// Largest pointwise residual of the defining expansion of [`overlap_c`]
/// over all `n` and the given sample points.
pub fn expansion_residual(
    a: C64,
    b: C64,
    c: C64,
    d: C64,
    m: usize,
    qsq: C64,
    points: &[C64],
) -> Result<f64, OverlapError> {
    let qinv = 1.0 / qsq;
    let mut worst = 0.0f64;
    for n in 0..=m {
        let coeffs = (0..=m).map(|nt| overlap_c(n, nt, a, b, c, d, m, qsq)).collect::<Result<Vec<_>, _>>()?;
        for &x in points {
            let lhs = qpochhammer(a * x, qinv, n) * qpochhammer(b * x, qinv, m - n);
            let rhs: C64 = coeffs
                .iter()
                .enumerate()
                .map(|(nt, &cf)| cf * qpochhammer(c * x, qsq, nt) * qpochhammer(d * x, qsq, m - nt))
                .sum();
            worst = worst.max(pointwise(lhs, rhs));
        }
    }
    Ok(worst)
}

/// Largest pointwise residual of the inversion identity over all `n`.
pub fn inversion_residual(c: C64, d: C64, m: usize, qsq: C64, points: &[C64]) -> Result<f64, OverlapError> {
    let mut worst = 0.0f64;
    for n in 0..=m {
        let kernel = (0..=m).map(|l| inversion_kernel(n, l, c, d, m, qsq)).collect::<Result<Vec<_>, _>>()?;
        for &y in points {
            let rhs: C64 = kernel
                .iter()
                .enumerate()
                .map(|(l, &k)| k * qpochhammer(c * y, qsq, l) * qpochhammer(d * y, qsq, m - l))
                .sum();
            worst = worst.max(pointwise(y.powi(n as i64), rhs));
        }
    }
    Ok(worst)
}

/// Largest pointwise residual of the generating function
/// `(c y; Q)_nt (d y; Q)_{M-nt} = sum_n (d Q^M)^n (Q^-M; Q)_n / (Q; Q)_n K_n(nt; c/d, M; Q) y^n`.
pub fn generating_residual(c: C64, d: C64, m: usize, qsq: C64, points: &[C64]) -> f64 {
    let mut worst = 0.0f64;
    for nt in 0..=m {
        for &y in points {
            let lhs = qpochhammer(c * y, qsq, nt) * qpochhammer(d * y, qsq, m - nt);
            let rhs: C64 = (0..=m)
                .map(|n| {
                    (d * pow(qsq, m as i64)).powi(n as i64) * qpochhammer(pow(qsq, -(m as i64)), qsq, n)
                        / qpochhammer(qsq, qsq, n)
                        * dual_qkrawtchouk(n, nt, c / d, m, qsq)
                        * y.powi(n as i64)
                })
                .sum();
            worst = worst.max(pointwise(lhs, rhs));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::close;
    use proptest::prelude::*;

    fn qsq() -> C64 {
        C64::from_polar(0.8, 0.35).powi(2)
    }

    fn sample_points(qsq: C64, count: usize) -> Vec<C64> {
        let r = C64::from_polar(0.93, 1.3);
        (0..count).map(|k| qsq.sqrt().powf(k as f64 / 3.0) * r).collect()
    }

    #[test]
    fn trivial_dimension() {
        let (a, b, c, d) = (C64::new(0.4, 0.1), C64::new(-0.7, 0.3), C64::new(1.2, -0.5), C64::new(0.3, 0.9));
        assert!(close(overlap_c(0, 0, a, b, c, d, 0, qsq()).unwrap(), C64::new(1.0, 0.0), 1e-15));
        assert!(close(fusion_c(0, 0, a, b, c, d, 0, qsq()).unwrap(), C64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn spin_half_by_hand() {
        // 1 - a x = C^0 (1 - d x) + C^1 (1 - c x) gives
        // C^0 = (c - a)/(c - d), C^1 = (a - d)/(c - d).
        let (a, b, c, d) = (C64::new(0.4, 0.1), C64::new(-0.7, 0.3), C64::new(1.2, -0.5), C64::new(0.3, 0.9));
        let q = qsq();
        assert!(close(overlap_c(1, 0, a, b, c, d, 1, q).unwrap(), (c - a) / (c - d), 1e-13));
        assert!(close(overlap_c(1, 1, a, b, c, d, 1, q).unwrap(), (a - d) / (c - d), 1e-13));
        assert!(close(overlap_c(0, 0, a, b, c, d, 1, q).unwrap(), (c - b) / (c - d), 1e-13));
    }

    #[test]
    fn out_of_range_is_an_error() {
        let z = C64::new(0.5, 0.5);
        assert!(overlap_c(3, 0, z, z, z, z, 2, qsq()).is_err());
    }

    fn arg() -> impl Strategy<Value = C64> {
        (0.5f64..1.5, -1.0f64..1.0).prop_map(|(r, t)| C64::from_polar(r, t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn expansion_fusion_inversion(a in arg(), b in arg(), c in arg(), d in arg(), m in 0usize..=4) {
            let q = qsq();
            let pts = sample_points(q, 2 * m + 2);
            prop_assert!(expansion_residual(a, b, c, d, m, q, &pts).unwrap() < 1e-8);
            prop_assert!(inversion_residual(c, d, m, q, &pts).unwrap() < 1e-8);
            prop_assert!(generating_residual(c, d, m, q, &pts) < 1e-8);
            for n in 0..=m {
                for nt in 0..=m {
                    let direct = overlap_c(n, nt, a, b, c, d, m, q).unwrap();
                    let fused = fusion_c(n, nt, a, b, c, d, m, q).unwrap();
                    prop_assert!(close(direct, fused, 1e-8), "{} {} {} {}", n, nt, direct, fused);
                }
            }
        }
    }
}
