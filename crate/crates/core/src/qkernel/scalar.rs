//! Complex scalars at two working precisions.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

/// Standard precision complex scalar (about 16 significant digits).
pub type C64 = Complex<f64>;

/// Extended precision complex scalar built on double-double reals
/// (about 32 significant digits).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cdd {
    pub re: TwoFloat,
    pub im: TwoFloat,
}

/// Double-double reciprocal with one Newton step; the quotient operator of
/// `twofloat` only reaches `f64` accuracy.
fn recip_dd(x: TwoFloat) -> TwoFloat {
    let y = TwoFloat::from(1.0 / x.hi());
    y + y * (TwoFloat::from(1.0) - x * y)
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, o: Cdd) -> Cdd {
        let r = recip_dd(o.re * o.re + o.im * o.im);
        let conj = Cdd { re: o.re * r, im: -(o.im * r) };
        self * conj
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd { re: -self.re, im: -self.im }
    }
}

/// Working precision class for evaluating q-series.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Standard,
    Extended,
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Standard => f.write_str("standard"),
            Precision::Extended => f.write_str("extended"),
        }
    }
}

/// `|a - b| / max(1, |a|, |b|)`.
pub fn rel_diff(a: C64, b: C64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// Relative-residual comparator: `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: C64, b: C64, tol: f64) -> bool {
    rel_diff(a, b) <= tol
}

/// Field operations shared by both precision classes.
///
/// The q-special functions are written once against this trait and
/// instantiated at [`C64`] or [`Cdd`].
pub trait Field:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_c64(z: C64) -> Self;
    fn to_c64(self) -> C64;
    fn zero() -> Self;
    fn one() -> Self;
    /// Modulus, rounded to `f64`.
    fn modulus(self) -> f64;

    fn from_f64(x: f64) -> Self {
        Self::from_c64(C64::new(x, 0.0))
    }

    fn powi(self, n: i64) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Field for C64 {
    fn from_c64(z: C64) -> Self {
        z
    }
    fn to_c64(self) -> C64 {
        self
    }
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

impl Field for Cdd {
    fn from_c64(z: C64) -> Self {
        Cdd { re: TwoFloat::from(z.re), im: TwoFloat::from(z.im) }
    }
    fn to_c64(self) -> C64 {
        C64::new(f64::from(self.re), f64::from(self.im))
    }
    fn zero() -> Self {
        Cdd { re: TwoFloat::from(0.0), im: TwoFloat::from(0.0) }
    }
    fn one() -> Self {
        Cdd { re: TwoFloat::from(1.0), im: TwoFloat::from(0.0) }
    }
    fn modulus(self) -> f64 {
        self.to_c64().norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn close_uses_unit_floor() {
        assert!(close(C64::new(1e-12, 0.0), C64::new(0.0, 0.0), 1e-11));
        assert!(!close(C64::new(1e-10, 0.0), C64::new(0.0, 0.0), 1e-11));
        assert!(close(C64::new(1e6, 0.0), C64::new(1e6 + 1e-4, 0.0), 1e-9));
    }

    #[test]
    fn powi_matches_repeated_products() {
        let z = C64::new(0.7, 0.4);
        assert!(close(z.powi(5), z * z * z * z * z, 1e-15));
        assert!(close(Field::powi(z, -3), 1.0 / (z * z * z), 1e-15));
        assert!(close(Field::powi(z, 0), C64::new(1.0, 0.0), 0.0));
    }

    #[test]
    fn extended_precision_keeps_more_digits() {
        // (1 + 1e-20) - 1 vanishes in f64 but not in double-double.
        let tiny = Cdd::from_f64(1e-20);
        let back = (Cdd::one() + tiny) - Cdd::one();
        assert!((back.to_c64().re - 1e-20).abs() < 1e-30);
    }

    #[test]
    fn extended_division_is_exact_to_double_double() {
        let z = Cdd::from_c64(C64::new(0.7, 0.3));
        let w = Cdd::from_c64(C64::new(-1.9, 3.1));
        let back = (w / z) * z - w;
        assert!(back.modulus() < 1e-30);
        let third = Cdd::one() / Cdd::from_f64(3.0) * Cdd::from_f64(3.0) - Cdd::one();
        assert!(third.modulus() < 1e-31);
    }
}
