//! Orthogonality and three-term recurrence residuals for the q-Racah and dual
//! q-Krawtchouk families.
//!
//! Orthogonality residuals are reported as `max |G_mn - h_n delta_mn| / sqrt(|h_m h_n|)`
//! where `G` is the weighted Gram matrix, so that every entry is measured on
//! the scale of the norms it couples.

use super::scalar::{Cdd, Field, Precision, C64};
use super::special::{dual_qkrawtchouk, qpochhammer, qpochhammer_multi, qracah_unchecked, racah_b, racah_c};

/// Precision used for orthogonality sums when none is requested explicitly.
pub fn default_orthogonality_precision(m: usize) -> Precision {
    if m >= 5 {
        Precision::Extended
    } else {
        Precision::Standard
    }
}

fn gram_residual<F: Field>(gram: &[Vec<F>], norms: &[F]) -> f64 {
    let mut worst = 0.0f64;
    for (m, row) in gram.iter().enumerate() {
        for (n, &g) in row.iter().enumerate() {
            let target = if m == n { norms[n] } else { F::zero() };
            let scale = (norms[m].modulus() * norms[n].modulus()).sqrt().max(f64::MIN_POSITIVE);
            worst = worst.max((g - target).modulus() / scale);
        }
    }
    worst
}

fn qracah_orthogonality_in<F: Field>(m: usize, alpha: C64, beta: C64, delta: C64, qsq: C64) -> f64 {
    let (al, be, de, qs) = (F::from_c64(alpha), F::from_c64(beta), F::from_c64(delta), F::from_c64(qsq));
    let one = F::one();
    let ga = qs.powi(-(m as i64) - 1);
    let gdq = ga * de * qs;
    let polys: Vec<Vec<F>> =
        (0..=m).map(|n| (0..=m).map(|x| qracah_unchecked(n, x, al, be, ga, de, qs)).collect()).collect();
    let weights: Vec<F> = (0..=m)
        .map(|x| {
            qpochhammer_multi(&[gdq, al * qs, be * de * qs, ga * qs], qs, x)
                / qpochhammer_multi(&[qs, gdq / al, ga * qs / be, de * qs], qs, x)
                * (one - gdq * qs.powi(2 * x as i64))
                / ((al * be * qs).powi(x as i64) * (one - gdq))
        })
        .collect();
    let ab = al * be;
    let norms: Vec<F> = (0..=m)
        .map(|n| {
            qpochhammer_multi(&[ab * qs * qs, one / de], qs, m) / qpochhammer_multi(&[be * qs, al * qs / de], qs, m)
                * (one - ab * qs)
                * (de * qs.powi(-(m as i64))).powi(n as i64)
                / (one - ab * qs.powi(2 * n as i64 + 1))
                * qpochhammer_multi(&[qs, be * qs, al * qs / de, ab * qs.powi(m as i64 + 2)], qs, n)
                / qpochhammer_multi(&[ab * qs, al * qs, be * de * qs, qs.powi(-(m as i64))], qs, n)
        })
        .collect();
    let gram: Vec<Vec<F>> = (0..=m)
        .map(|a| {
            (0..=m).map(|b| (0..=m).fold(F::zero(), |acc, x| acc + weights[x] * polys[a][x] * polys[b][x])).collect()
        })
        .collect();
    gram_residual(&gram, &norms)
}

/// Weighted q-Racah orthogonality residual at truncation `M` (with `gamma = qsq^{-M-1}`).
pub fn qracah_orthogonality_residual(
    m: usize,
    alpha: C64,
    beta: C64,
    delta: C64,
    qsq: C64,
    precision: Precision,
) -> f64 {
    match precision {
        Precision::Standard => qracah_orthogonality_in::<C64>(m, alpha, beta, delta, qsq),
        Precision::Extended => qracah_orthogonality_in::<Cdd>(m, alpha, beta, delta, qsq),
    }
}

fn dual_qk_orthogonality_in<F: Field>(m: usize, c: C64, qsq: C64) -> f64 {
    let (cc, qs) = (F::from_c64(c), F::from_c64(qsq));
    let one = F::one();
    let qm = qs.powi(-(m as i64));
    let polys: Vec<Vec<F>> = (0..=m).map(|n| (0..=m).map(|x| dual_qkrawtchouk(n, x, cc, m, qs)).collect()).collect();
    let weights: Vec<F> = (0..=m)
        .map(|x| {
            let xi = x as i64;
            qpochhammer_multi(&[cc * qm, qm], qs, x) / qpochhammer_multi(&[qs, cc * qs], qs, x)
                * (one - cc * qs.powi(2 * xi - m as i64))
                / (one - cc * qm)
                * cc.powi(-xi)
                * qs.powi(xi * (2 * m as i64 - xi))
        })
        .collect();
    let norms: Vec<F> = (0..=m)
        .map(|n| {
            qpochhammer(one / cc, qs, m) * qpochhammer(qs, qs, n) / qpochhammer(qm, qs, n) * (cc * qm).powi(n as i64)
        })
        .collect();
    let gram: Vec<Vec<F>> = (0..=m)
        .map(|a| {
            (0..=m).map(|b| (0..=m).fold(F::zero(), |acc, x| acc + weights[x] * polys[a][x] * polys[b][x])).collect()
        })
        .collect();
    gram_residual(&gram, &norms)
}

/// Weighted dual q-Krawtchouk orthogonality residual.
pub fn dual_qkrawtchouk_orthogonality_residual(m: usize, c: C64, qsq: C64, precision: Precision) -> f64 {
    match precision {
        Precision::Standard => dual_qk_orthogonality_in::<C64>(m, c, qsq),
        Precision::Extended => dual_qk_orthogonality_in::<Cdd>(m, c, qsq),
    }
}

/// Residual of `mu(x) R_n = B_n R_{n+1} + (1 + gamma delta qsq - B_n - C_n) R_n + C_n R_{n-1}`
/// over `0 <= n <= M-1`, `0 <= x <= M`, relative to `max(1, |mu R_n|)`.
pub fn qracah_recurrence_residual(m: usize, alpha: C64, beta: C64, delta: C64, qsq: C64) -> f64 {
    let ga = Field::powi(qsq, -(m as i64) - 1);
    let r = |n: i64, x: usize| {
        if n < 0 {
            C64::new(0.0, 0.0)
        } else {
            qracah_unchecked(n as usize, x, alpha, beta, ga, delta, qsq)
        }
    };
    let mut worst = 0.0f64;
    for n in 0..m {
        let b = racah_b(n, alpha, beta, ga, delta, qsq);
        let c = racah_c(n, alpha, beta, ga, delta, qsq);
        for x in 0..=m {
            let mu = Field::powi(qsq, -(x as i64)) + ga * delta * Field::powi(qsq, x as i64 + 1);
            let ni = n as i64;
            let lhs = mu * r(ni, x);
            let rhs = b * r(ni + 1, x) + (1.0 + ga * delta * qsq - b - c) * r(ni, x) + c * r(ni - 1, x);
            worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
        }
    }
    worst
}

/// Residual of `mu(x) K_n = (1 - qsq^{n-M}) K_{n+1} + (1 + c) qsq^{n-M} K_n + c qsq^{-M} (1 - qsq^n) K_{n-1}`.
pub fn dual_qkrawtchouk_recurrence_residual(m: usize, c: C64, qsq: C64) -> f64 {
    let k = |n: i64, x: usize| {
        if n < 0 {
            C64::new(0.0, 0.0)
        } else {
            dual_qkrawtchouk(n as usize, x, c, m, qsq)
        }
    };
    let mi = m as i64;
    let mut worst = 0.0f64;
    for n in 0..mi {
        for x in 0..=m {
            let xi = x as i64;
            let mu = Field::powi(qsq, -xi) + c * Field::powi(qsq, xi - mi);
            let lhs = mu * k(n, x);
            let rhs = (1.0 - Field::powi(qsq, n - mi)) * k(n + 1, x)
                + (1.0 + c) * Field::powi(qsq, n - mi) * k(n, x)
                + c * Field::powi(qsq, -mi) * (1.0 - Field::powi(qsq, n)) * k(n - 1, x);
            worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qsq() -> C64 {
        let q = C64::from_polar(0.85, 0.35);
        q * q
    }

    #[test]
    fn racah_orthogonality_holds() {
        let (al, be, de) = (C64::new(0.7, 0.4), C64::new(1.2, -0.3), C64::new(0.6, 0.8));
        for m in 1..=6 {
            let prec = default_orthogonality_precision(m);
            let r = qracah_orthogonality_residual(m, al, be, de, qsq(), prec);
            assert!(r < 1e-8, "M={m} residual {r}");
        }
    }

    #[test]
    fn dual_krawtchouk_orthogonality_holds_at_complex_c() {
        let c = C64::new(0.4, 0.9);
        for m in 1..=6 {
            let prec = default_orthogonality_precision(m);
            let r = dual_qkrawtchouk_orthogonality_residual(m, c, qsq(), prec);
            assert!(r < 1e-8, "M={m} residual {r}");
        }
    }

    #[test]
    fn recurrences_hold() {
        let (al, be, de) = (C64::new(0.7, 0.4), C64::new(1.2, -0.3), C64::new(0.6, 0.8));
        for m in 1..=6 {
            assert!(qracah_recurrence_residual(m, al, be, de, qsq()) < 1e-9);
            assert!(dual_qkrawtchouk_recurrence_residual(m, C64::new(-0.5, 0.3), qsq()) < 1e-9);
        }
    }

    #[test]
    fn extended_and_standard_sums_agree() {
        let c = C64::new(0.4, 0.9);
        let s = dual_qkrawtchouk_orthogonality_residual(4, c, qsq(), Precision::Standard);
        let e = dual_qkrawtchouk_orthogonality_residual(4, c, qsq(), Precision::Extended);
        assert!(s < 1e-10 && e < 1e-10);
    }
}
