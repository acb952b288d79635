//! Scalar kernel shared by every container in the crate.
//!
//! Two kinds are supported. [`Rational`] is exact arbitrary-precision
//! arithmetic and is what the catalog and classification checks run on.
//! `f64` is the float kernel: every zero test goes through a single
//! process-wide tolerance (see [`epsilon`]), 1e-9 unless overridden.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Default float tolerance.
pub const DEFAULT_EPSILON: f64 = 1e-9;

static EPSILON_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Current float tolerance used by every `f64` zero test.
pub fn epsilon() -> f64 {
    f64::from_bits(EPSILON_BITS.load(Ordering::Relaxed))
}

/// Overrides the float tolerance for the whole process.
pub fn set_epsilon(eps: f64) {
    assert!(eps > 0.0 && eps.is_finite(), "epsilon must be positive");
    EPSILON_BITS.store(eps.to_bits(), Ordering::Relaxed);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Exact,
    Float,
}

/// Field elements the kernel computes with.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const KIND: ScalarKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// The exact value, when this scalar carries one.
    fn to_rational(&self) -> Option<Rational>;
    /// Exact zero, or `|x| <= epsilon()` on the float kernel.
    fn is_zero(&self) -> bool;
    /// Square root when it exists in this kernel (exact kernel: perfect squares only).
    fn sqrt(&self) -> Option<Self>;
    fn abs(&self) -> Self;
    /// Magnitude used to rank pivots during elimination.
    fn pivot_weight(&self) -> f64;

    fn is_exact() -> bool {
        Self::KIND == ScalarKind::Exact
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    fn is_positive(&self) -> bool {
        !self.is_zero() && self.to_f64() > 0.0
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Option<Rational> {
        None
    }
    fn is_zero(&self) -> bool {
        f64::abs(*self) <= epsilon()
    }
    fn sqrt(&self) -> Option<Self> {
        if *self < -epsilon() {
            None
        } else {
            Some(f64::sqrt(f64::max(*self, 0.0)))
        }
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn pivot_weight(&self) -> f64 {
        f64::abs(*self)
    }
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(Rational::new(n, d))
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn pivot_weight(&self) -> f64 {
        // Any nonzero pivot is exact; prefer the first one found.
        if Zero::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Nearest `f64` to a rational, robust to huge numerators and denominators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 60;
    let n = r.numer() >> shift.max(0) as usize;
    let d = r.denom() >> shift.max(0) as usize;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from an `f64` (used only when promoting literals).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Renders a scalar the way documents and reports print it.
pub fn format_scalar<S: Scalar>(x: &S) -> String {
    match x.to_rational() {
        Some(r) => format_rational(&r),
        None => format!("{:?}", x.to_f64()),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_epsilon_is_1e_minus_9() {
        assert_eq!(f64::from_bits(0x3E11_2E0B_E826_D695), 1e-9);
    }

    #[test]
    fn exact_sqrt_only_for_perfect_squares() {
        assert_eq!(Rational::from_ratio(9, 4).sqrt(), Some(Rational::from_ratio(3, 2)));
        assert_eq!(Rational::from_i64(2).sqrt(), None);
        assert_eq!(Rational::from_i64(-4).sqrt(), None);
    }

    #[test]
    fn float_zero_uses_tolerance() {
        assert!(Scalar::is_zero(&1e-12_f64));
        assert!(!Scalar::is_zero(&1e-6_f64));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = Rational::new(BigInt::from(10).pow(400u32) + 1, BigInt::from(10).pow(400u32));
        assert!((rational_to_f64(&big) - 1.0).abs() < 1e-15);
    }
}
