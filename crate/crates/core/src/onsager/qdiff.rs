use super::{Family, ModelParams, OnsagerError};
use crate::polyops::{to_matrix, LaurentPoly, MatrixRep, ShiftOperator};
use crate::qkernel::C64;

/// `W0^(i)` as a q-difference operator in `z_1..z_N` (acting on `z_1..z_i` only).
///
/// `W0^(i) = sum_{k=1}^{i} q^{-2(j_{k+1}+..+j_i)} T^(k+1)^2 .. T^(i)^2
///   [ b0^(k) z_k (q^{2j_k} - q^{-2j_k} T^(k)^2) + c0^(k) z_k^{-1} (1 - T^(k)^2) ]
///   + eps+ q^{-2 J_i} T^(1)^2 .. T^(i)^2`.
pub fn build_w0(level: usize, p: &ModelParams) -> Result<ShiftOperator, OnsagerError> {
    build_w(Family::W0, level, p)
}

/// `W1^(i)`: `W0^(i)` with `q -> q^{-1}`, `b0 -> -b1`, `c0 -> -c1`, `eps+ -> eps-`
/// and upward shifts replaced by downward shifts.
pub fn build_w1(level: usize, p: &ModelParams) -> Result<ShiftOperator, OnsagerError> {
    build_w(Family::W1, level, p)
}

pub fn build_w(family: Family, level: usize, p: &ModelParams) -> Result<ShiftOperator, OnsagerError> {
    p.check_level(level)?;
    let n = p.nlevels();
    let (qq, dir, eps) = match family {
        Family::W0 => (p.q, 2, p.eps_plus()),
        Family::W1 => (p.q.inverse(), -2, p.eps_minus()),
    };
    let mut op = ShiftOperator::zero(n);
    for k in 0..level {
        let site = k + 1;
        let (b, c) = match family {
            Family::W0 => (p.b0(site), p.c0(site)),
            Family::W1 => (-p.b1(site), -p.c1(site)),
        };
        let pre = qq.pow(-(p.spins2[k + 1..level].iter().map(|&t| t as i64).sum::<i64>()));
        let tk = p.spins2[k] as i64;
        let mut outer = vec![0i32; n];
        for s in outer.iter_mut().take(level).skip(k + 1) {
            *s = dir;
        }
        let mut inner = outer.clone();
        inner[k] = dir;
        let mut up = vec![0i32; n];
        up[k] = 1;
        let mut down = vec![0i32; n];
        down[k] = -1;
        op.push(LaurentPoly::monomial(up.clone(), pre * b * qq.pow(tk)), outer.clone())?;
        op.push(LaurentPoly::monomial(up, -pre * b * qq.pow(-tk)), inner.clone())?;
        op.push(LaurentPoly::monomial(down.clone(), pre * c), outer)?;
        op.push(LaurentPoly::monomial(down, -pre * c), inner)?;
    }
    let mut tail = vec![0i32; n];
    for s in tail.iter_mut().take(level) {
        *s = dir;
    }
    op.push(LaurentPoly::constant(n, eps * qq.pow(-p.spin_sum2(level))), tail)?;
    Ok(op)
}

/// Matrix of `W0^(i)` or `W1^(i)` on the monomial grid.
pub fn operator_matrix(family: Family, level: usize, p: &ModelParams) -> Result<MatrixRep, OnsagerError> {
    let op = build_w(family, level, p)?;
    Ok(to_matrix(&op, &p.grid(), &p.q)?)
}

/// The pure-shift tail coefficient `eps q^{-2 J_i}` read off the operator.
pub fn tail_coefficient(op: &ShiftOperator, level: usize) -> Option<C64> {
    op.terms()
        .iter()
        .find(|t| t.shifts.iter().take(level).all(|&s| s != 0) && t.coeff.coeff(&vec![0; op.nvars()]).norm() > 0.0)
        .map(|t| t.coeff.coeff(&vec![0; op.nvars()]))
}
