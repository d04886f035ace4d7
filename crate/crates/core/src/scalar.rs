//! Number traits shared by float, interval and jet evaluation.
//!
//! Model right-hand sides are written once, generically over [`Scalar`], and
//! are then evaluated over `f64`, over [`Interval`](crate::interval::Interval)
//! and over the forward-mode jets in [`crate::jet`].

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

/// Commutative ring element with a zero.
pub trait Ring:
    Copy + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
}

pub trait Scalar: Ring {
    /// Embeds a binary floating-point number exactly.
    fn from_f64(v: f64) -> Self;

    /// Encloses the rational number `num / den`; used for decimal model
    /// constants such as `0.0675` that have no exact binary representation.
    fn ratio(num: i64, den: i64) -> Self;

    /// Multiplicative inverse, `None` when the value is (or may be) zero.
    fn recip(&self) -> Option<Self>;

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * *self;
        }
        acc
    }

    fn checked_div(&self, d: &Self) -> Option<Self> {
        Some(*self * d.recip()?)
    }

    /// Float midpoint of the value part; used to decide whether jets agree
    /// with plain evaluation in tests and diagnostics.
    fn approx(&self) -> f64;
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn recip(&self) -> Option<Self> {
        if *self == 0.0 || !self.is_finite() {
            None
        } else {
            Some(1.0 / *self)
        }
    }

    fn powi(&self, k: u32) -> Self {
        f64::powi(*self, k as i32)
    }

    fn approx(&self) -> f64 {
        *self
    }
}
