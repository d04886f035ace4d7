//! Self-validated interval arithmetic.
//!
//! Endpoints are rounded outward with error-free transformations (see
//! [`round`]), so every operation encloses the exact real result without
//! switching the FPU rounding mode.

mod complex;
mod ddball;
mod gershgorin;
mod matrix;
pub mod round;

pub use complex::ComplexInterval;
pub use ddball::DdBall;
pub use gershgorin::{disks_disjoint, gershgorin_disks, Disk};
pub use matrix::{
    enclose_inverse, enclose_inverse_complex, mat_norm_sup_upper, ComplexIntervalMatrix,
    IntervalMatrix, Matrix,
};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Ring, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("division by an interval containing zero: {0}")]
    DivisionByZeroInterval(Interval),
    #[error("interval endpoint overflowed to infinity")]
    OverflowToInfinity,
    #[error("invalid interval bounds [{0}, {1}]")]
    InvalidBounds(f64, f64),
    #[error("matrix is not verifiably invertible (bound on ||I - QP|| is {0})")]
    NotVerifiablyInvertible(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = IntervalError;
    fn try_from(v: [f64; 2]) -> Result<Self, Self::Error> {
        Interval::try_new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(v: Interval) -> Self {
        [v.lo, v.hi]
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The four arithmetic operations accepted by [`iv_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked interval arithmetic: rejects division by intervals containing
/// zero and results with non-finite endpoints.
pub fn iv_arith(a: Interval, b: Interval, op: ArithOp) -> Result<Interval, IntervalError> {
    let r = match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.try_div(b)?,
    };
    if r.is_finite() {
        Ok(r)
    } else {
        Err(IntervalError::OverflowToInfinity)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Panics on NaN or reversed bounds; use [`Interval::try_new`] for input
    /// that has not been validated.
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).expect("invalid interval")
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(IntervalError::InvalidBounds(lo, hi));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: f64) -> Self {
        Self::new(v, v)
    }

    /// `[mid - rad, mid + rad]` rounded outward.
    pub fn ball(mid: f64, rad: f64) -> Self {
        Interval::new(round::sub_down(mid, rad), round::add_up(mid, rad))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        let (n, d) = (num as f64, den as f64);
        assert!(n as i64 == num && d as i64 == den, "ratio operands must be exact in f64");
        Interval::new(round::div_down(n, d), round::div_up(n, d))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound of the radius about [`Interval::mid`].
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        round::sub_up(self.hi, m).max(round::sub_up(m, self.lo))
    }

    pub fn width(&self) -> f64 {
        round::sub_up(self.hi, self.lo)
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Widens both endpoints by `r >= 0`.
    pub fn inflate(&self, r: f64) -> Interval {
        Interval::new(round::sub_down(self.lo, r), round::add_up(self.hi, r))
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval::new(0.0, self.mag())
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        Interval::new(round::mul_down(a.lo, a.lo), round::mul_up(a.hi, a.hi))
    }

    /// Square root of the nonnegative part.
    pub fn sqrt(&self) -> Interval {
        let lo = self.lo.max(0.0);
        let hi = self.hi.max(0.0);
        Interval::new(round::sqrt_down(lo), round::sqrt_up(hi))
    }

    pub fn try_div(&self, b: Interval) -> Result<Interval, IntervalError> {
        if b.contains_zero() {
            return Err(IntervalError::DivisionByZeroInterval(b));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in [self.lo, self.hi] {
            for y in [b.lo, b.hi] {
                lo = lo.min(round::div_down(x, y));
                hi = hi.max(round::div_up(x, y));
            }
        }
        Ok(Interval::new(lo, hi))
    }

    pub fn powu(&self, k: u32) -> Interval {
        match k {
            0 => Interval::ONE,
            1 => *self,
            _ if k.is_multiple_of(2) => self.sqr().powu(k / 2),
            _ => {
                // odd powers are monotone; work on |x| and restore the sign
                let pow_down = |x: f64| (1..k).fold(x, |acc, _| round::mul_down(acc, x));
                let pow_up = |x: f64| (1..k).fold(x, |acc, _| round::mul_up(acc, x));
                let lo = if self.lo >= 0.0 { pow_down(self.lo) } else { -pow_up(-self.lo) };
                let hi = if self.hi >= 0.0 { pow_up(self.hi) } else { -pow_down(-self.hi) };
                Interval::new(lo, hi)
            }
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, b: Interval) -> Interval {
        Interval { lo: round::add_down(self.lo, b.lo), hi: round::add_up(self.hi, b.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, b: Interval) -> Interval {
        Interval { lo: round::sub_down(self.lo, b.hi), hi: round::sub_up(self.hi, b.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, b: Interval) -> Interval {
        let a = self;
        // Sign-case split keeps the common cases at two products.
        if a.lo >= 0.0 && b.lo >= 0.0 {
            return Interval { lo: round::mul_down(a.lo, b.lo), hi: round::mul_up(a.hi, b.hi) };
        }
        if a.hi <= 0.0 && b.hi <= 0.0 {
            return Interval { lo: round::mul_down(a.hi, b.hi), hi: round::mul_up(a.lo, b.lo) };
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in [a.lo, a.hi] {
            for y in [b.lo, b.hi] {
                lo = lo.min(round::mul_down(x, y));
                hi = hi.max(round::mul_up(x, y));
            }
        }
        Interval { lo, hi }
    }
}

impl Ring for Interval {
    fn zero() -> Self {
        Interval::ZERO
    }
    fn one() -> Self {
        Interval::ONE
    }
}

impl Scalar for Interval {
    fn from_f64(v: f64) -> Self {
        Interval::point(v)
    }

    fn ratio(num: i64, den: i64) -> Self {
        Interval::from_ratio(num, den)
    }

    fn recip(&self) -> Option<Self> {
        Interval::ONE.try_div(*self).ok()
    }

    fn powi(&self, k: u32) -> Self {
        self.powu(k)
    }

    fn approx(&self) -> f64 {
        self.mid()
    }
}
