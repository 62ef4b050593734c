//! q-shifted factorials and terminating basic hypergeometric polynomials.

use super::scalar::{Field, C64};
use super::QKernelError;

/// Relative tolerance used to recognise `gamma = qsq^{-M-1}`.
const TRUNCATION_TOL: f64 = 1e-9;

/// `(a; q)_n = prod_{k=0}^{n-1} (1 - a q^k)`.
pub fn qpochhammer<F: Field>(a: F, q: F, n: usize) -> F {
    let mut acc = F::one();
    let mut aqk = a;
    for _ in 0..n {
        acc = acc * (F::one() - aqk);
        aqk = aqk * q;
    }
    acc
}

/// `(a_1, ..., a_k; q)_n`.
pub fn qpochhammer_multi<F: Field>(args: &[F], q: F, n: usize) -> F {
    args.iter().fold(F::one(), |acc, &a| acc * qpochhammer(a, q, n))
}

/// Symmetric q-number `[n]_q = (q^n - q^{-n}) / (q - q^{-1})`.
pub fn qnumber(n: i64, q: C64) -> Result<C64, QKernelError> {
    let den = q - 1.0 / q;
    if den.norm() < 1e-12 {
        return Err(QKernelError::DegenerateQ(q));
    }
    Ok((Field::powi(q, n) - Field::powi(q, -n)) / den)
}

/// Gaussian binomial `[M, n]` in base `qsq`; zero outside `0 <= n <= M`.
pub fn qbinomial<F: Field>(m: usize, n: i64, qsq: F) -> F {
    if n < 0 || n as usize > m {
        return F::zero();
    }
    let n = n as usize;
    // Product form avoids the 0/0 of the Pochhammer ratio when qsq^k = 1 is near.
    let mut acc = F::one();
    for k in 0..n {
        let num = F::one() - qsq.powi((m - k) as i64);
        let den = F::one() - qsq.powi((k + 1) as i64);
        acc = acc * num / den;
    }
    acc
}

/// Terminating `r phi s` sum `sum_{k=0}^{kmax} prod (a;base)_k / ((base;base)_k prod (b;base)_k) arg^k`
/// for balanced series (`r = s + 1`), evaluated by the ratio of consecutive terms.
pub fn terminating_phi<F: Field>(numer: &[F], denom: &[F], base: F, arg: F, kmax: usize) -> F {
    let mut term = F::one();
    let mut sum = F::one();
    let mut bk = F::one();
    for _ in 0..kmax {
        let mut num = arg;
        for &a in numer {
            num = num * (F::one() - a * bk);
        }
        let mut den = F::one() - bk * base;
        for &b in denom {
            den = den * (F::one() - b * bk);
        }
        term = term * num / den;
        sum = sum + term;
        bk = bk * base;
    }
    sum
}

/// Finds `M` with `gamma = qsq^{-M-1}`, `M >= min`.
pub fn truncation_level<F: Field>(gamma: F, qsq: F, min: usize) -> Result<usize, QKernelError> {
    let g = gamma.to_c64();
    let qs = qsq.to_c64();
    let mut cand = Field::powi(qs, -(min as i64) - 1);
    for m in min..=512 {
        if (g - cand).norm() <= TRUNCATION_TOL * g.norm().max(cand.norm()) {
            return Ok(m);
        }
        cand /= qs;
    }
    Err(QKernelError::Truncation { gamma: g })
}

/// q-Racah polynomial `R_n(mu(ntilde); alpha, beta, gamma, delta; qsq)` as a
/// terminating `4phi3` at argument `qsq`, with `gamma = qsq^{-M-1}` and
/// `mu(ntilde) = qsq^{-ntilde} + gamma delta qsq^{ntilde+1}`.
pub fn qracah<F: Field>(
    n: usize,
    ntilde: usize,
    alpha: F,
    beta: F,
    gamma: F,
    delta: F,
    qsq: F,
) -> Result<F, QKernelError> {
    let m = truncation_level(gamma, qsq, n.max(ntilde))?;
    debug_assert!(n <= m && ntilde <= m);
    Ok(qracah_unchecked(n, ntilde, alpha, beta, gamma, delta, qsq))
}

pub(crate) fn qracah_unchecked<F: Field>(n: usize, ntilde: usize, alpha: F, beta: F, gamma: F, delta: F, qsq: F) -> F {
    let numer = [
        qsq.powi(-(n as i64)),
        alpha * beta * qsq.powi(n as i64 + 1),
        qsq.powi(-(ntilde as i64)),
        gamma * delta * qsq.powi(ntilde as i64 + 1),
    ];
    let denom = [alpha * qsq, beta * delta * qsq, gamma * qsq];
    terminating_phi(&numer, &denom, qsq, qsq, n)
}

/// Dual q-Krawtchouk polynomial `K_n(mu(ntilde); c, M; qsq)` as a terminating
/// `3phi2(qsq^{-n}, qsq^{-ntilde}, c qsq^{ntilde-M}; qsq^{-M}, 0; qsq, qsq)`.
pub fn dual_qkrawtchouk<F: Field>(n: usize, ntilde: usize, c: F, m: usize, qsq: F) -> F {
    let numer = [qsq.powi(-(n as i64)), qsq.powi(-(ntilde as i64)), c * qsq.powi(ntilde as i64 - m as i64)];
    let denom = [qsq.powi(-(m as i64)), F::zero()];
    terminating_phi(&numer, &denom, qsq, qsq, n)
}

/// Raising coefficient `B_n` of the q-Racah three-term recurrence.
pub fn racah_b<F: Field>(n: usize, alpha: F, beta: F, gamma: F, delta: F, qsq: F) -> F {
    let one = F::one();
    let t = qsq.powi(n as i64 + 1);
    let ab = alpha * beta;
    (one - alpha * t) * (one - gamma * t) * (one - ab * t) * (one - beta * delta * t)
        / ((one - ab * qsq.powi(2 * n as i64 + 1)) * (one - ab * qsq.powi(2 * n as i64 + 2)))
}

/// Lowering coefficient `C_n` of the q-Racah three-term recurrence.
pub fn racah_c<F: Field>(n: usize, alpha: F, beta: F, gamma: F, delta: F, qsq: F) -> F {
    let one = F::one();
    let t = qsq.powi(n as i64);
    let ab = alpha * beta;
    qsq * (one - t) * (one - beta * t) * (delta - alpha * t) * (gamma - ab * t)
        / ((one - ab * qsq.powi(2 * n as i64)) * (one - ab * qsq.powi(2 * n as i64 + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::scalar::{close, Cdd};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pochhammer_small_cases() {
        let a = c(0.3, -0.2);
        let q = c(0.7, 0.1);
        assert_eq!(qpochhammer(a, q, 0), c(1.0, 0.0));
        assert!(close(qpochhammer(a, q, 1), 1.0 - a, 1e-15));
        // (1-2)(1-6) = 5
        assert!(close(qpochhammer(c(2.0, 0.0), c(3.0, 0.0), 2), c(5.0, 0.0), 1e-15));
    }

    #[test]
    fn qnumber_cases() {
        let q = c(0.9, 0.2);
        assert!(close(qnumber(1, q).unwrap(), c(1.0, 0.0), 1e-14));
        assert!(close(qnumber(0, q).unwrap(), c(0.0, 0.0), 1e-14));
        assert!(close(qnumber(-3, q).unwrap(), -qnumber(3, q).unwrap(), 1e-14));
        // (4 - 1/4) / (2 - 1/2) = 5/2
        assert!(close(qnumber(2, c(2.0, 0.0)).unwrap(), c(2.5, 0.0), 1e-15));
        assert!(qnumber(2, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn qbinomial_cases() {
        let qsq = c(0.5, 0.3);
        assert!(close(qbinomial(4, 0, qsq), c(1.0, 0.0), 1e-15));
        assert!(close(qbinomial(2, 1, qsq), 1.0 + qsq, 1e-15));
        for n in 0..=5 {
            assert!(close(qbinomial(5, n, qsq), qbinomial(5, 5 - n, qsq), 1e-13));
        }
        assert_eq!(qbinomial(3, 4, qsq), c(0.0, 0.0));
        assert_eq!(qbinomial(3, -1, qsq), c(0.0, 0.0));
        // Pochhammer-ratio form
        let ratio = qpochhammer(qsq, qsq, 5) / (qpochhammer(qsq, qsq, 2) * qpochhammer(qsq, qsq, 3));
        assert!(close(qbinomial(5, 2, qsq), ratio, 1e-13));
    }

    #[test]
    fn qracah_boundaries() {
        let qsq = c(0.6, 0.25);
        let m = 4usize;
        let gamma = Field::powi(qsq, -(m as i64) - 1);
        let (al, be, de) = (c(0.8, 0.3), c(1.1, -0.4), c(0.7, 0.9));
        for x in 0..=m {
            assert_eq!(qracah(0, x, al, be, gamma, de, qsq).unwrap(), c(1.0, 0.0));
        }
        for n in 0..=m {
            assert!(close(qracah(n, 0, al, be, gamma, de, qsq).unwrap(), c(1.0, 0.0), 1e-12));
        }
        assert!(matches!(qracah(1, 1, al, be, c(0.3, 0.0), de, qsq), Err(QKernelError::Truncation { .. })));
    }

    #[test]
    fn dual_qkrawtchouk_boundaries() {
        let qsq = c(0.6, 0.25);
        let cc = c(-0.7, 0.2);
        for x in 0..=5 {
            assert_eq!(dual_qkrawtchouk(0, x, cc, 5, qsq), c(1.0, 0.0));
        }
        for n in 0..=5 {
            assert!(close(dual_qkrawtchouk(n, 0, cc, 5, qsq), c(1.0, 0.0), 1e-12));
        }
        // K_1(mu(1); c, 1) = c
        assert!(close(dual_qkrawtchouk(1, 1, cc, 1, qsq), cc, 1e-13));
    }

    /// Direct Pochhammer-quotient evaluation of a 4phi3 as an independent oracle.
    fn phi_by_pochhammer(numer: &[C64], denom: &[C64], base: C64, n: usize) -> C64 {
        (0..=n)
            .map(|k| {
                qpochhammer_multi(numer, base, k) / (qpochhammer_multi(denom, base, k) * qpochhammer(base, base, k))
                    * Field::powi(base, k as i64)
            })
            .sum()
    }

    #[test]
    fn ratio_recursion_matches_pochhammer_quotients() {
        let qsq = c(0.55, 0.3);
        let m = 5usize;
        let gamma = Field::powi(qsq, -(m as i64) - 1);
        let (al, be, de) = (c(0.8, 0.3), c(1.1, -0.4), c(0.7, 0.9));
        for n in 0..=m {
            for x in 0..=m {
                let numer = [
                    Field::powi(qsq, -(n as i64)),
                    al * be * Field::powi(qsq, n as i64 + 1),
                    Field::powi(qsq, -(x as i64)),
                    gamma * de * Field::powi(qsq, x as i64 + 1),
                ];
                let denom = [al * qsq, be * de * qsq, gamma * qsq];
                let oracle = phi_by_pochhammer(&numer, &denom, qsq, n);
                let got = qracah(n, x, al, be, gamma, de, qsq).unwrap();
                assert!(close(got, oracle, 1e-10), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn extended_and_standard_agree() {
        let qsq = c(0.6, 0.25);
        let cc = c(-0.7, 0.2);
        let s = dual_qkrawtchouk(3, 2, cc, 5, qsq);
        let e = dual_qkrawtchouk(3, 2, Cdd::from_c64(cc), 5, Cdd::from_c64(qsq)).to_c64();
        assert!(close(s, e, 1e-12));
    }

    #[test]
    fn racah_coefficients_vanish_at_the_edges() {
        let qsq = c(0.6, 0.25);
        let m = 3usize;
        let gamma = Field::powi(qsq, -(m as i64) - 1);
        let (al, be, de) = (c(0.8, 0.3), c(1.1, -0.4), c(0.7, 0.9));
        assert!(racah_b(m, al, be, gamma, de, qsq).norm() < 1e-12);
        assert!(racah_c(0, al, be, gamma, de, qsq).norm() < 1e-15);
    }
}
