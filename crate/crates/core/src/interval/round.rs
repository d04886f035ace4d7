//! Directed rounding by error-free transformations.
//!
//! Every primitive computes the round-to-nearest result and then uses an
//! exact error term (TwoSum, FMA residual) to decide whether the true value
//! lies below or above it. The result is moved one ulp outward only when the
//! operation was inexact, so exact operations keep tight endpoints and no
//! global floating-point state is touched.

/// Below this magnitude the FMA residual may itself be inexact (subnormal
/// range), so we always step outward.
const TINY: f64 = 1.0e-290;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Sign of (exact a*b) - fl(a*b): -1, 0, +1, or `None` when unknown.
#[inline]
fn mul_residual_sign(a: f64, b: f64, p: f64) -> Option<f64> {
    if a == 0.0 || b == 0.0 {
        return Some(0.0);
    }
    if !p.is_finite() || p.abs() < TINY {
        return None;
    }
    Some(a.mul_add(b, -p))
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    match mul_residual_sign(a, b, p) {
        Some(e) if e >= 0.0 => p,
        Some(_) => p.next_down(),
        None if !p.is_finite() => p,
        None => p.next_down(),
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    match mul_residual_sign(a, b, p) {
        Some(e) if e <= 0.0 => p,
        Some(_) => p.next_up(),
        None if !p.is_finite() => p,
        None => p.next_up(),
    }
}

/// Sign of (exact a/b) - fl(a/b), `None` when it cannot be decided exactly.
#[inline]
fn div_residual_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if a == 0.0 {
        return Some(0.0);
    }
    if !q.is_finite() || q.abs() < TINY || a.abs() < TINY {
        return None;
    }
    // a - q*b is exact here.
    let r = (-q).mul_add(b, a);
    Some(r * b.signum())
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    match div_residual_sign(a, b, q) {
        Some(e) if e >= 0.0 => q,
        Some(_) => q.next_down(),
        None if !q.is_finite() => q,
        None => q.next_down(),
    }
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    match div_residual_sign(a, b, q) {
        Some(e) if e <= 0.0 => q,
        Some(_) => q.next_up(),
        None if !q.is_finite() => q,
        None => q.next_up(),
    }
}

#[inline]
pub fn sqrt_down(a: f64) -> f64 {
    let s = a.sqrt();
    if a == 0.0 || !s.is_finite() {
        return s;
    }
    if s < TINY {
        return s.next_down().max(0.0);
    }
    let r = (-s).mul_add(s, a);
    if r < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn sqrt_up(a: f64) -> f64 {
    let s = a.sqrt();
    if a == 0.0 || !s.is_finite() {
        return s;
    }
    if s < TINY {
        return s.next_up();
    }
    let r = (-s).mul_add(s, a);
    if r > 0.0 {
        s.next_up()
    } else {
        s
    }
}
