//! Forward-mode jets for exact multilinear derivatives.
//!
//! [`Hyper`] carries three nilpotent generators `e1, e2, e3` with `ei^2 = 0`.
//! Evaluating `f(z + e1 a + e2 b + e3 c)` yields in the `e1 e2 e3` component
//! the trilinear derivative `D^3 f(z)(a, b, c)`, in `e1 e2` the bilinear
//! `D^2 f(z)(a, b)`, and so on. [`Dual`] is the single-generator case.
//!
//! Both are generic over the base [`Scalar`], so the same construction runs
//! in floats and in interval arithmetic, and they nest (`Hyper<Dual<S>>`).

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Ring, Scalar};

/// `a + b e` with `e^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: S) -> Self {
        Dual { re, eps: S::zero() }
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Dual { re: self.re + b.re, eps: self.eps + b.eps }
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Dual { re: self.re - b.re, eps: self.eps - b.eps }
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { re: -self.re, eps: -self.eps }
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        Dual { re: self.re * b.re, eps: self.re * b.eps + self.eps * b.re }
    }
}

impl<S: Scalar> Ring for Dual<S> {
    fn zero() -> Self {
        Dual::constant(S::zero())
    }
    fn one() -> Self {
        Dual::constant(S::one())
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn from_f64(v: f64) -> Self {
        Dual::constant(S::from_f64(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Dual::constant(S::ratio(num, den))
    }

    fn recip(&self) -> Option<Self> {
        let r = self.re.recip()?;
        Some(Dual { re: r, eps: -(self.eps * r * r) })
    }

    fn approx(&self) -> f64 {
        self.re.approx()
    }
}

/// Truncated jet in three nilpotent generators; component `m` (a bitmask
/// over the generators) holds the coefficient of `prod_{i in m} e_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper<S> {
    pub c: [S; 8],
}

/// Component masks.
pub mod mask {
    pub const E1: usize = 0b001;
    pub const E2: usize = 0b010;
    pub const E3: usize = 0b100;
    pub const E12: usize = 0b011;
    pub const E13: usize = 0b101;
    pub const E23: usize = 0b110;
    pub const E123: usize = 0b111;
}

impl<S: Scalar> Hyper<S> {
    pub fn constant(v: S) -> Self {
        let mut c = [S::zero(); 8];
        c[0] = v;
        Hyper { c }
    }

    /// `v + e1 d[0] + e2 d[1] + e3 d[2]`.
    pub fn seeded(v: S, d: [S; 3]) -> Self {
        let mut c = [S::zero(); 8];
        c[0] = v;
        c[mask::E1] = d[0];
        c[mask::E2] = d[1];
        c[mask::E3] = d[2];
        Hyper { c }
    }

    pub fn value(&self) -> S {
        self.c[0]
    }

    pub fn part(&self, m: usize) -> S {
        self.c[m]
    }

    fn scale(&self, s: S) -> Self {
        let mut c = self.c;
        for x in c.iter_mut() {
            *x = *x * s;
        }
        Hyper { c }
    }
}

impl<S: Scalar> Add for Hyper<S> {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(b.c) {
            *x = *x + y;
        }
        Hyper { c }
    }
}

impl<S: Scalar> Sub for Hyper<S> {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(b.c) {
            *x = *x - y;
        }
        Hyper { c }
    }
}

impl<S: Scalar> Neg for Hyper<S> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut c = self.c;
        for x in c.iter_mut() {
            *x = -*x;
        }
        Hyper { c }
    }
}

impl<S: Scalar> Mul for Hyper<S> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let mut c = [S::zero(); 8];
        for (m, out) in c.iter_mut().enumerate() {
            // sum over submasks a of m of x[a] * y[m \ a]
            let mut a = m;
            let mut acc = self.c[a] * b.c[m ^ a];
            while a != 0 {
                a = (a - 1) & m;
                acc = acc + self.c[a] * b.c[m ^ a];
            }
            *out = acc;
        }
        Hyper { c }
    }
}

impl<S: Scalar> Ring for Hyper<S> {
    fn zero() -> Self {
        Hyper::constant(S::zero())
    }
    fn one() -> Self {
        Hyper::constant(S::one())
    }
}

impl<S: Scalar> Scalar for Hyper<S> {
    fn from_f64(v: f64) -> Self {
        Hyper::constant(S::from_f64(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Hyper::constant(S::ratio(num, den))
    }

    fn recip(&self) -> Option<Self> {
        // 1/(x0 + n) = r (1 - e + e^2 - e^3) with r = 1/x0, e = n r; e^4 = 0.
        let r = self.c[0].recip()?;
        let mut n = *self;
        n.c[0] = S::zero();
        let e = n.scale(r);
        let e2 = e * e;
        let e3 = e2 * e;
        Some((Hyper::one() - e + e2 - e3).scale(r))
    }

    fn approx(&self) -> f64 {
        self.c[0].approx()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn cubic<T: Scalar>(x: T) -> T {
        // x^3 / (1 + x^2)
        (x * x * x).checked_div(&(T::one() + x * x)).unwrap()
    }

    #[test]
    fn hyper_matches_closed_form_derivatives() {
        let x0 = 0.7_f64;
        let h = cubic(Hyper::seeded(x0, [1.0, 1.0, 1.0]));
        let d = 1.0 + x0 * x0;
        let f = x0.powi(3) / d;
        let f1 = (3.0 * x0 * x0 * d - 2.0 * x0.powi(4)) / (d * d);
        assert!((h.value() - f).abs() < 1e-15);
        assert!((h.part(mask::E1) - f1).abs() < 1e-14);
        // central differences of the first derivative for D^2, D^3
        let fd = |x: f64| cubic(Hyper::seeded(x, [1.0, 0.0, 0.0])).part(mask::E1);
        let eps = 1e-5;
        let f2 = (fd(x0 + eps) - fd(x0 - eps)) / (2.0 * eps);
        let f3 = (fd(x0 + eps) - 2.0 * fd(x0) + fd(x0 - eps)) / (eps * eps);
        assert!((h.part(mask::E12) - f2).abs() < 1e-8);
        assert!((h.part(mask::E123) - f3).abs() < 1e-4);
    }

    #[test]
    fn interval_hyper_encloses_float_hyper() {
        let xf = cubic(Hyper::seeded(0.3, [1.0, -0.5, 2.0]));
        let xi = cubic(Hyper::seeded(
            Interval::point(0.3),
            [Interval::point(1.0), Interval::point(-0.5), Interval::point(2.0)],
        ));
        for m in 0..8 {
            assert!(xi.part(m).contains(xf.part(m)), "component {m}");
        }
    }

    #[test]
    fn dual_recip() {
        let d = Dual::new(2.0, 1.0).recip().unwrap();
        assert_eq!(d.re, 0.5);
        assert_eq!(d.eps, -0.25);
        assert!(Dual::new(0.0, 1.0).recip().is_none());
    }

    #[test]
    fn nested_jets_compose() {
        // d/dt of (second directional derivative of x^4 at x = 1 + t) at t = 0
        let x = Hyper::seeded(Dual::new(1.0, 1.0), [Dual::constant(1.0), Dual::constant(1.0), Dual::zero()]);
        let y = x * x * x * x;
        // D^2 (x^4) = 12 x^2, derivative wrt x is 24 x
        assert_eq!(y.part(mask::E12).re, 12.0);
        assert_eq!(y.part(mask::E12).eps, 24.0);
    }
}
