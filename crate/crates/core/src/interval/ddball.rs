//! Double-double ball arithmetic: a value `hi + lo` carried to about 106
//! bits plus a rigorous radius.
//!
//! Interval evaluation in plain `f64` widens every operation by up to one
//! ulp, which dominates residual bounds at well-refined points. Balls keep
//! the rounding error near `2^-100` relative, so the enclosure of a residual
//! is limited by the residual itself.
//!
//! Every operation adds `REL * |result| + ABS` to the radius, with all
//! radius arithmetic rounded upward. `REL` is far above the known error
//! bounds of the double-word algorithms used here (at most a few `2^-106`).

use std::ops::{Add, Mul, Neg, Sub};

use super::{round, Interval};
use crate::scalar::{Ring, Scalar};

const REL: f64 = 1.262_177_448_353_619e-29; // 2^-96
const ABS: f64 = 9.332_636_185_032_189e-302; // 2^-1000

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdBall {
    hi: f64,
    lo: f64,
    rad: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn dd_add(ah: f64, al: f64, bh: f64, bl: f64) -> (f64, f64) {
    let (s, e) = two_sum(ah, bh);
    let (t, f) = two_sum(al, bl);
    let (s, e) = fast_two_sum(s, e + t);
    fast_two_sum(s, e + f)
}

fn dd_mul(ah: f64, al: f64, bh: f64, bl: f64) -> (f64, f64) {
    let (p, e) = two_prod(ah, bh);
    fast_two_sum(p, e + (ah * bl + al * bh))
}

impl DdBall {
    pub fn point(v: f64) -> Self {
        DdBall { hi: v, lo: 0.0, rad: 0.0 }
    }

    /// Upper bound of `|hi + lo|`.
    fn mag_mid(&self) -> f64 {
        round::add_up(self.hi.abs(), self.lo.abs())
    }

    fn rounded(hi: f64, lo: f64, rad: f64) -> Self {
        let mag = round::add_up(hi.abs(), lo.abs());
        let err = round::add_up(round::mul_up(mag, REL), ABS);
        let rad = round::add_up(rad, err);
        if hi.is_finite() && lo.is_finite() && rad.is_finite() {
            DdBall { hi, lo, rad }
        } else {
            DdBall { hi: f64::NAN, lo: 0.0, rad: f64::INFINITY }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.hi.is_finite() && self.rad.is_finite()
    }

    /// Upper bound of the radius.
    pub fn rad(&self) -> f64 {
        self.rad
    }

    /// Outward-rounded enclosure; `None` if the ball overflowed.
    pub fn to_interval(&self) -> Option<Interval> {
        if !self.is_finite() {
            return None;
        }
        let lo = round::sub_down(round::add_down(self.hi, self.lo), self.rad);
        let hi = round::add_up(round::add_up(self.hi, self.lo), self.rad);
        Interval::try_new(lo, hi).ok()
    }
}

impl Add for DdBall {
    type Output = DdBall;
    fn add(self, b: DdBall) -> DdBall {
        let (h, l) = dd_add(self.hi, self.lo, b.hi, b.lo);
        DdBall::rounded(h, l, round::add_up(self.rad, b.rad))
    }
}

impl Neg for DdBall {
    type Output = DdBall;
    fn neg(self) -> DdBall {
        DdBall { hi: -self.hi, lo: -self.lo, rad: self.rad }
    }
}

impl Sub for DdBall {
    type Output = DdBall;
    fn sub(self, b: DdBall) -> DdBall {
        self + (-b)
    }
}

impl Mul for DdBall {
    type Output = DdBall;
    fn mul(self, b: DdBall) -> DdBall {
        let (h, l) = dd_mul(self.hi, self.lo, b.hi, b.lo);
        let rad = round::add_up(
            round::add_up(round::mul_up(self.mag_mid(), b.rad), round::mul_up(b.mag_mid(), self.rad)),
            round::mul_up(self.rad, b.rad),
        );
        DdBall::rounded(h, l, rad)
    }
}

impl Ring for DdBall {
    fn zero() -> Self {
        DdBall::point(0.0)
    }
    fn one() -> Self {
        DdBall::point(1.0)
    }
}

impl Scalar for DdBall {
    fn from_f64(v: f64) -> Self {
        DdBall::point(v)
    }

    fn ratio(num: i64, den: i64) -> Self {
        let (n, d) = (num as f64, den as f64);
        assert!(n as i64 == num && d as i64 == den, "ratio operands must be exact in f64");
        let q = n / d;
        // n - q d is exact with FMA
        let rem = (-q).mul_add(d, n);
        let (h, l) = fast_two_sum(q, rem / d);
        DdBall::rounded(h, l, 0.0)
    }

    fn recip(&self) -> Option<Self> {
        if !self.is_finite() {
            return None;
        }
        let mig = round::sub_down(round::sub_down(self.hi.abs(), self.lo.abs()), self.rad);
        if !(mig > 0.0) {
            return None;
        }
        // one Newton correction of y = 1/hi against the double-word value
        let y = 1.0 / self.hi;
        let (ph, pl) = dd_mul(self.hi, self.lo, y, 0.0);
        let (eh, el) = dd_add(1.0, 0.0, -ph, -pl);
        let (ch, cl) = dd_mul(eh, el, y, 0.0);
        let (h, l) = dd_add(y, 0.0, ch, cl);
        // |1/(m + d) - 1/m| <= r / (|m| (|m| - r))
        let m_lo = round::sub_down(self.hi.abs(), self.lo.abs());
        let rad = round::div_up(self.rad, round::mul_down(m_lo, mig));
        Some(DdBall::rounded(h, l, rad))
    }

    fn approx(&self) -> f64 {
        self.hi + self.lo
    }
}
