use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::PolyError;
use crate::qkernel::{Field, C64};

/// Relative drop tolerance applied after every arithmetic operation.
pub const DEFAULT_DROP_TOL: f64 = 1e-14;

/// Sparse Laurent polynomial in `z_1..z_N`.
///
/// Terms are keyed by exponent vectors in lexicographic order. Coefficients
/// below `DEFAULT_DROP_TOL` times the largest coefficient are discarded, and
/// the zero polynomial has no terms.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, C64>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C64::new(1.0, 0.0))
    }

    pub fn monomial(exps: Vec<i32>, c: C64) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert(exps, c);
        }
        Self { nvars, terms }
    }

    /// The variable `z_var` (0-based).
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self::monomial(e, C64::new(1.0, 0.0))
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (Vec<i32>, C64)>>(nvars: usize, terms: I) -> Result<Self, PolyError> {
        let mut map: BTreeMap<Vec<i32>, C64> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::DimensionMismatch { expected: nvars, found: e.len() });
            }
            *map.entry(e).or_insert(C64::new(0.0, 0.0)) += c;
        }
        let mut p = Self { nvars, terms: map };
        p.prune(DEFAULT_DROP_TOL);
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[i32]) -> C64 {
        self.terms.get(exps).copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Removes coefficients below `rel_tol` times the largest coefficient.
    pub fn prune(&mut self, rel_tol: f64) {
        let cut = rel_tol * self.max_abs();
        self.terms.retain(|_, c| c.norm() > cut);
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.prune(DEFAULT_DROP_TOL);
        out
    }

    /// `f(q^{s_1} z_1, ..., q^{s_N} z_N)` where `qpow(k)` returns `q^k`.
    pub fn substitute_shift(&self, shifts: &[i32], qpow: impl Fn(i64) -> C64) -> Self {
        let mut out = self.clone();
        for (e, v) in out.terms.iter_mut() {
            let k: i64 = e.iter().zip(shifts).map(|(&a, &s)| a as i64 * s as i64).sum();
            *v *= qpow(k);
        }
        out
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(e.clone()).or_insert(C64::new(0.0, 0.0)) += c;
        }
        let mut p = Self { nvars: self.nvars, terms };
        p.prune(DEFAULT_DROP_TOL);
        Ok(p)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut terms: BTreeMap<Vec<i32>, C64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert(C64::new(0.0, 0.0)) += ca * cb;
            }
        }
        let mut p = Self { nvars: self.nvars, terms };
        p.prune(DEFAULT_DROP_TOL);
        Ok(p)
    }

    /// Evaluates at `point`; see [`poly_eval`].
    pub fn eval(&self, point: &[C64]) -> Result<C64, PolyError> {
        poly_eval(self, point)
    }

    /// Largest absolute difference of coefficients, relative to `max(1, max coefficient)`.
    pub fn rel_distance(&self, other: &Self) -> f64 {
        let diff = self.clone() - other.clone();
        diff.max_abs() / 1f64.max(self.max_abs()).max(other.max_abs())
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("variable count mismatch in polynomial addition")
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("variable count mismatch in polynomial multiplication")
    }
}

/// Numeric evaluation of `f` at `point`.
pub fn poly_eval(f: &LaurentPoly, point: &[C64]) -> Result<C64, PolyError> {
    if point.len() != f.nvars {
        return Err(PolyError::DimensionMismatch { expected: f.nvars, found: point.len() });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (e, c) in &f.terms {
        let mut t = *c;
        for (var, (&k, &z)) in e.iter().zip(point).enumerate() {
            if k < 0 && z == C64::new(0.0, 0.0) {
                return Err(PolyError::ZeroCoordinate { var: var + 1 });
            }
            t *= Field::powi(z, k as i64);
        }
        acc += t;
    }
    Ok(acc)
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Vec<i32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    nvars: usize,
    terms: Vec<TermJson>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| TermJson { exps: e.clone(), re: c.re, im: c.im }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        LaurentPoly::from_terms(j.nvars, j.terms.into_iter().map(|t| (t.exps, C64::new(t.re, t.im))))
            .map_err(serde::de::Error::custom)
    }
}
