use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::coefficients::{overlap_c, overlap_c_in};
use super::OverlapError;
use crate::bases::{basis_matrix, z_pm, zt_pm, BasisKind, MultiIndex};
use crate::onsager::ModelParams;
use crate::polyops::linalg::{max_abs, solve, SINGULAR_CONDITION};
use crate::qkernel::{dual_qkrawtchouk, qpochhammer, Cdd, Field, C64};

/// Space indexed by the rows or columns of an [`OverlapTensor`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TensorSpace {
    F,
    Ftilde,
    Monomial,
}

/// Coefficients `T[n, m]` with `source_n = sum_m T[n, m] target_m`; rows and
/// columns follow the lexicographic multi-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapTensor {
    pub source: TensorSpace,
    pub target: TensorSpace,
    pub spins2: Vec<u32>,
    pub entries: DMatrix<C64>,
}

#[derive(Serialize)]
struct EntryJson<'a> {
    n: &'a [u32],
    ntilde: &'a [u32],
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct TensorJson<'a> {
    source: TensorSpace,
    target: TensorSpace,
    spins2: &'a [u32],
    entries: Vec<EntryJson<'a>>,
}

impl Serialize for OverlapTensor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let idx: Vec<Vec<u32>> = MultiIndex::all(&self.spins2).into_iter().map(|m| m.n).collect();
        let mut entries = Vec::with_capacity(idx.len() * idx.len());
        for (r, n) in idx.iter().enumerate() {
            for (c, nt) in idx.iter().enumerate() {
                let v = self.entries[(r, c)];
                entries.push(EntryJson { n, ntilde: nt, re: v.re, im: v.im });
            }
        }
        TensorJson { source: self.source, target: self.target, spins2: &self.spins2, entries }.serialize(s)
    }
}

impl OverlapTensor {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, source: &[u32], target: &[u32]) -> Option<C64> {
        let r = position(&self.spins2, source)?;
        let c = position(&self.spins2, target)?;
        Some(self.entries[(r, c)])
    }
}

fn position(spins2: &[u32], idx: &[u32]) -> Option<usize> {
    if idx.len() != spins2.len() || idx.iter().zip(spins2).any(|(&n, &t)| n > t) {
        return None;
    }
    Some(idx.iter().zip(spins2).fold(0, |acc, (&n, &t)| acc * (t as usize + 1) + n as usize))
}

fn prefix(idx: &[u32], level: usize) -> i64 {
    idx[..level - 1].iter().map(|&v| v as i64).sum()
}

/// Fills a tensor row by row in parallel.
fn build<F>(p: &ModelParams, source: TensorSpace, target: TensorSpace, entry: F) -> Result<OverlapTensor, OverlapError>
where
    F: Fn(&[u32], &[u32]) -> Result<C64, OverlapError> + Sync,
{
    p.validate()?;
    let idx: Vec<Vec<u32>> = MultiIndex::all(&p.spins2).into_iter().map(|m| m.n).collect();
    let rows = idx
        .par_iter()
        .map(|r| idx.iter().map(|c| entry(r, c)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let dim = idx.len();
    Ok(OverlapTensor {
        source,
        target,
        spins2: p.spins2.clone(),
        entries: DMatrix::from_fn(dim, dim, |r, c| rows[r][c]),
    })
}

/// `F_n = sum_nt C[n, nt] Ftilde_nt` with `C[n, nt]` the product over levels of
/// [`overlap_c`] at `(z-, z+)` on the source prefix and `(zt-, zt+)` on the
/// target prefix.
pub fn overlap_tensor_f_to_ftilde(p: &ModelParams) -> Result<OverlapTensor, OverlapError> {
    let qsq = p.q.qsq();
    build(p, TensorSpace::F, TensorSpace::Ftilde, |n, nt| {
        (1..=p.nlevels()).try_fold(C64::new(1.0, 0.0), |acc, i| {
            let (zm, zp) = z_pm(p, i, prefix(n, i));
            let (tm, tp) = zt_pm(p, i, prefix(nt, i));
            let m = p.spins2[i - 1] as usize;
            Ok(acc * overlap_c(n[i - 1] as usize, nt[i - 1] as usize, zm, zp, tm, tp, m, qsq)?)
        })
    })
}

/// `Ftilde_nt = sum_m Ct[nt, m] F_m` from the same coefficient with the two
/// lattices exchanged and `q -> q^-1`.
pub fn overlap_tensor_ftilde_to_f(p: &ModelParams) -> Result<OverlapTensor, OverlapError> {
    let qinv = 1.0 / p.q.qsq();
    build(p, TensorSpace::Ftilde, TensorSpace::F, |nt, m| {
        (1..=p.nlevels()).try_fold(C64::new(1.0, 0.0), |acc, i| {
            let (zm, zp) = z_pm(p, i, prefix(m, i));
            let (tm, tp) = zt_pm(p, i, prefix(nt, i));
            let spin = p.spins2[i - 1] as usize;
            Ok(acc * overlap_c(nt[i - 1] as usize, m[i - 1] as usize, tm, tp, zm, zp, spin, qinv)?)
        })
    })
}

/// `Ftilde_nt = sum_n Dt[nt, n] z^n`, each level contributing
/// `(Q^{2j} zt+)^{2j-n} (Q^-2j; Q)_{2j-n} / (Q; Q)_{2j-n} K_{2j-n}(nt; zt-/zt+, 2j; Q)`.
pub fn overlap_dtilde(p: &ModelParams) -> Result<OverlapTensor, OverlapError> {
    let qsq = p.q.qsq();
    build(p, TensorSpace::Ftilde, TensorSpace::Monomial, |nt, n| {
        let v = (1..=p.nlevels()).fold(C64::new(1.0, 0.0), |acc, i| {
            let t = p.spins2[i - 1] as usize;
            let (tm, tp) = zt_pm(p, i, prefix(nt, i));
            let k = t - n[i - 1] as usize;
            acc * (qsq.powi(t as i64) * tp).powi(k as i64) * qpochhammer(qsq.powi(-(t as i64)), qsq, k)
                / qpochhammer(qsq, qsq, k)
                * dual_qkrawtchouk(k, nt[i - 1] as usize, tm / tp, t, qsq)
        });
        finite(v)
    })
}

/// `F_n = sum_m D[n, m] z^m`, each level contributing
/// `(-1)^{2j} z+^{2j-n} z-^n q^{-n(n-1) - (2j-n)(2j-n-1)} (Q^{2j}/z+)^m
///  (Q^-2j; Q)_m / (Q; Q)_m K_m(n; z+/z-, 2j; Q)`.
pub fn overlap_d(p: &ModelParams) -> Result<OverlapTensor, OverlapError> {
    let qsq = p.q.qsq();
    build(p, TensorSpace::F, TensorSpace::Monomial, |n, mono| {
        let v = (1..=p.nlevels()).fold(C64::new(1.0, 0.0), |acc, i| {
            let t = p.spins2[i - 1] as i64;
            let (zm, zp) = z_pm(p, i, prefix(n, i));
            let ni = n[i - 1] as i64;
            let m = mono[i - 1] as usize;
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            let pre = sign * zp.powi(t - ni) * zm.powi(ni) * p.q.pow(-ni * (ni - 1) - (t - ni) * (t - ni - 1));
            acc * pre * (qsq.powi(t) / zp).powi(m as i64) * qpochhammer(qsq.powi(-t), qsq, m) / qpochhammer(qsq, qsq, m)
                * dual_qkrawtchouk(m, ni as usize, zp / zm, t as usize, qsq)
        });
        finite(v)
    })
}

fn finite(z: C64) -> Result<C64, OverlapError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(OverlapError::Degenerate("monomial expansion coefficient"))
    }
}

fn space_matrix(space: TensorSpace, p: &ModelParams) -> DMatrix<C64> {
    match space {
        TensorSpace::F => basis_matrix(BasisKind::F, p),
        TensorSpace::Ftilde => basis_matrix(BasisKind::Ftilde, p),
        TensorSpace::Monomial => {
            let dim = p.grid().dimension();
            DMatrix::identity(dim, dim)
        }
    }
}

/// `max |B_source - B_target T^T| / max |B_source|` on monomial coordinates.
pub fn reconstruction_residual(t: &OverlapTensor, p: &ModelParams) -> Result<f64, OverlapError> {
    let src = space_matrix(t.source, p);
    let tgt = space_matrix(t.target, p);
    if src.nrows() != t.dim() {
        return Err(OverlapError::Shape(src.nrows(), t.dim()));
    }
    let diff = &src - tgt * t.entries.transpose();
    Ok(max_abs(&diff) / max_abs(&src))
}

/// `max |C Ct - 1|` for a pair of mutually inverse tensors.
pub fn biorthogonality_residual(forward: &OverlapTensor, backward: &OverlapTensor) -> Result<f64, OverlapError> {
    if forward.dim() != backward.dim() {
        return Err(OverlapError::Shape(forward.dim(), backward.dim()));
    }
    let dim = forward.dim();
    Ok(max_abs(&(&forward.entries * &backward.entries - DMatrix::identity(dim, dim))))
}

/// `max |C Ct - 1|` with both tensors and their product evaluated in
/// double-double arithmetic from the `f64` lattice points.
///
/// Entries of `C` and `Ct` grow large enough that the `f64` product loses
/// roughly `1e-16 sum |C||Ct|` to cancellation.
pub fn biorthogonality_residual_extended(p: &ModelParams) -> Result<f64, OverlapError> {
    p.validate()?;
    let idx: Vec<Vec<u32>> = MultiIndex::all(&p.spins2).into_iter().map(|m| m.n).collect();
    let qsq = Cdd::from_c64(p.q.qsq());
    let qinv = Cdd::one() / qsq;
    let lift = |(a, b): (C64, C64)| (Cdd::from_c64(a), Cdd::from_c64(b));
    let entry = |src: &[u32], tgt: &[u32], forward: bool| -> Result<Cdd, OverlapError> {
        (1..=p.nlevels()).try_fold(Cdd::one(), |acc, i| {
            let spin = p.spins2[i - 1] as usize;
            let v = if forward {
                let (zm, zp) = lift(z_pm(p, i, prefix(src, i)));
                let (tm, tp) = lift(zt_pm(p, i, prefix(tgt, i)));
                overlap_c_in(src[i - 1] as usize, tgt[i - 1] as usize, zm, zp, tm, tp, spin, qsq)?
            } else {
                let (zm, zp) = lift(z_pm(p, i, prefix(tgt, i)));
                let (tm, tp) = lift(zt_pm(p, i, prefix(src, i)));
                overlap_c_in(src[i - 1] as usize, tgt[i - 1] as usize, tm, tp, zm, zp, spin, qinv)?
            };
            Ok(acc * v)
        })
    };
    let table = |forward: bool| -> Result<Vec<Vec<Cdd>>, OverlapError> {
        idx.par_iter().map(|r| idx.iter().map(|c| entry(r, c, forward)).collect::<Result<Vec<_>, _>>()).collect()
    };
    let (fwd, bwd) = (table(true)?, table(false)?);
    let dim = idx.len();
    let worst = (0..dim)
        .into_par_iter()
        .map(|r| {
            (0..dim)
                .map(|c| {
                    let sum = (0..dim).fold(Cdd::zero(), |acc, k| acc + fwd[r][k] * bwd[k][c]);
                    let target = if r == c { Cdd::one() } else { Cdd::zero() };
                    (sum - target).modulus()
                })
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// `max |C - D Dt^-1| / max |C|`: the direct overlaps against the route
/// through monomial coordinates.
pub fn triangle_residual(c: &OverlapTensor, d: &OverlapTensor, dtilde: &OverlapTensor) -> Result<f64, OverlapError> {
    let dim = dtilde.dim();
    let inv = solve(&dtilde.entries, &DMatrix::identity(dim, dim), SINGULAR_CONDITION)?;
    Ok(max_abs(&(&c.entries - &d.entries * inv)) / max_abs(&c.entries))
}
