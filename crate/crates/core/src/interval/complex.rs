use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{round, Interval};
use crate::scalar::Ring;

/// Rectangular complex enclosure `re + i*im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn point(z: Complex64) -> Self {
        ComplexInterval { re: Interval::point(z.re), im: Interval::point(z.im) }
    }

    pub fn from_real(re: Interval) -> Self {
        ComplexInterval { re, im: Interval::ZERO }
    }

    /// Enclosure of `|z|` over the rectangle.
    pub fn modulus(&self) -> Interval {
        // exact on the axes, where the rectangle's modulus is that of one part
        if self.im == Interval::point(0.0) {
            return self.re.abs();
        }
        if self.re == Interval::point(0.0) {
            return self.im.abs();
        }
        (self.re.sqr() + self.im.sqr()).sqrt()
    }

    /// Upper bound of `|z|`.
    pub fn mag(&self) -> f64 {
        self.modulus().hi()
    }

    /// Lower bound of `|z|`.
    pub fn mig(&self) -> f64 {
        self.modulus().lo()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.re.contains(z.re) && self.im.contains(z.im)
    }

    pub fn mid(&self) -> Complex64 {
        Complex64::new(self.re.mid(), self.im.mid())
    }

    /// Adds `[-r, r]` to both parts, so the result contains the disk of
    /// radius `r` about every point of `self`.
    pub fn inflate(&self, r: f64) -> Self {
        ComplexInterval { re: self.re.inflate(r), im: self.im.inflate(r) }
    }
}

impl Add for ComplexInterval {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        ComplexInterval { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for ComplexInterval {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        ComplexInterval { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Neg for ComplexInterval {
    type Output = Self;
    fn neg(self) -> Self {
        ComplexInterval { re: -self.re, im: -self.im }
    }
}

impl Mul for ComplexInterval {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        ComplexInterval {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Ring for ComplexInterval {
    fn zero() -> Self {
        ComplexInterval { re: Interval::ZERO, im: Interval::ZERO }
    }
    fn one() -> Self {
        ComplexInterval { re: Interval::ONE, im: Interval::ZERO }
    }
}

/// Upward-rounded sum of upper bounds.
pub(crate) fn sum_up(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, round::add_up)
}
