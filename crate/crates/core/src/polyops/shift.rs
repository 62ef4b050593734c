use serde::Serialize;

use super::{LaurentPoly, PolyError};
use crate::qkernel::{QPoint, C64};

/// `coeff(z) * prod_i T^{(i) shifts[i]}`, where `T^{(i)}` sends `z_i` to `q z_i`
/// and a negative power stands for the inverse shift.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftTerm {
    pub coeff: LaurentPoly,
    pub shifts: Vec<i32>,
}

/// A finite sum of [`ShiftTerm`]s. Each term shifts first and then multiplies
/// by its coefficient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftOperator {
    nvars: usize,
    terms: Vec<ShiftTerm>,
}

impl ShiftOperator {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: Vec::new() }
    }

    pub fn identity(nvars: usize) -> Self {
        Self::pure_shift(vec![0; nvars])
    }

    pub fn pure_shift(shifts: Vec<i32>) -> Self {
        let nvars = shifts.len();
        Self { nvars, terms: vec![ShiftTerm { coeff: LaurentPoly::one(nvars), shifts }] }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[ShiftTerm] {
        &self.terms
    }

    /// Appends `coeff * T^shifts`.
    pub fn push(&mut self, coeff: LaurentPoly, shifts: Vec<i32>) -> Result<(), PolyError> {
        for len in [coeff.nvars(), shifts.len()] {
            if len != self.nvars {
                return Err(PolyError::DimensionMismatch { expected: self.nvars, found: len });
            }
        }
        if !coeff.is_zero() {
            self.terms.push(ShiftTerm { coeff, shifts });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        if other.nvars != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, found: other.nvars });
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|t| ShiftTerm { coeff: t.coeff.scale(c), shifts: t.shifts.clone() }).collect(),
        }
    }

    /// `self ∘ other`, using `(a T^s)(b T^t) = a b(q^s z) T^{s+t}`.
    pub fn compose(&self, other: &Self, q: &QPoint) -> Result<Self, PolyError> {
        if other.nvars != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, found: other.nvars });
        }
        let mut out = Self::zero(self.nvars);
        for a in &self.terms {
            for b in &other.terms {
                let shifted = b.coeff.substitute_shift(&a.shifts, |k| q.pow(k));
                let coeff = a.coeff.try_mul(&shifted)?;
                let shifts = a.shifts.iter().zip(&b.shifts).map(|(s, t)| s + t).collect();
                out.push(coeff, shifts)?;
            }
        }
        Ok(out)
    }

    /// Applies the operator; see [`apply_shift`].
    pub fn apply(&self, f: &LaurentPoly, q: &QPoint) -> Result<LaurentPoly, PolyError> {
        apply_shift(self, f, q)
    }
}

/// Applies `op` to `f`: each monomial `z^e` picks up `q^{sum s_i e_i}` per term
/// and is then multiplied by that term's coefficient.
pub fn apply_shift(op: &ShiftOperator, f: &LaurentPoly, q: &QPoint) -> Result<LaurentPoly, PolyError> {
    if f.nvars() != op.nvars {
        return Err(PolyError::DimensionMismatch { expected: op.nvars, found: f.nvars() });
    }
    let mut pieces = Vec::new();
    for t in &op.terms {
        let shifted = f.substitute_shift(&t.shifts, |k| q.pow(k));
        for (ea, ca) in t.coeff.terms() {
            for (eb, cb) in shifted.terms() {
                pieces.push((ea.iter().zip(eb).map(|(a, b)| a + b).collect::<Vec<i32>>(), ca * cb));
            }
        }
    }
    LaurentPoly::from_terms(op.nvars, pieces)
}
