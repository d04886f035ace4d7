//! Right-hand sides of the bundled models, written once over [`Scalar`].
//!
//! State and parameters are packed as `z = (x_1, ..., x_n, lambda_1, lambda_2)`.

use super::ModelError;
use crate::scalar::Scalar;

fn inv<T: Scalar>(d: T, what: &'static str) -> Result<T, ModelError> {
    d.recip().ok_or(ModelError::Domain(what))
}

/// Bazykin's predator-prey ecosystem.
pub fn bazykin<T: Scalar>(z: &[T]) -> Result<Vec<T>, ModelError> {
    let (x1, x2, l1, l2) = (z[0], z[1], z[2], z[3]);
    let q = inv(T::one() + l1 * x1, "1 + lambda1*x1 vanishes")?;
    let pred = x1 * x2 * q;
    Ok(vec![
        x1 - pred - T::ratio(1, 100) * x1 * x1,
        -x2 + pred - l2 * x2 * x2,
    ])
}

/// Predator-prey system with the nonmonotonic response `x / (l1 x^2 + l2 x + 1)`,
/// with `delta = 1.1`, `kappa = 0.01`, `mu = 0.1`.
pub fn predator_prey<T: Scalar>(z: &[T]) -> Result<Vec<T>, ModelError> {
    let (x1, x2, l1, l2) = (z[0], z[1], z[2], z[3]);
    let delta = T::ratio(11, 10);
    let kappa = T::ratio(1, 100);
    let mu = T::ratio(1, 10);
    let q = inv(l1 * x1 * x1 + l2 * x1 + T::one(), "response denominator vanishes")?;
    Ok(vec![
        x1 * (T::one() - kappa * x1 - x2 * q),
        x2 * (-delta - mu * x2 + x1 * q),
    ])
}

/// Bykov-Yablonskii-Kim CO oxidation on platinum.
pub fn bykov<T: Scalar>(z: &[T]) -> Result<Vec<T>, ModelError> {
    let (x1, x2, x3, l1, l2) = (z[0], z[1], z[2], z[3], z[4]);
    let free = T::one() - x1 - x2 - x3;
    let ten = T::from_f64(10.0);
    Ok(vec![
        T::from_f64(5.0) * free * free - T::from_f64(2.0) * x1 * x1 - ten * x1 * x2,
        l1 * free - T::ratio(1, 10) * x2 - ten * x1 * x2,
        T::ratio(675, 10000) * (free - l2 * x3),
    ])
}

/// RKIP / let-7 / BACH1 metastatic cell-transition network.
pub fn metastatic<T: Scalar>(z: &[T]) -> Result<Vec<T>, ModelError> {
    let (x1, x2, x3, l1, l2) = (z[0], z[1], z[2], z[3], z[4]);
    let x1_5 = x1.powi(5);
    let l2_3 = l2.powi(3);
    let coupling = T::from_f64(200.0) * x2 * x3;
    let a = inv(T::one() + x3, "1 + x3 vanishes")?;
    let b = inv(T::from_f64(32.0) + x1_5, "32 + x1^5 vanishes")?;
    let c = inv(l2_3 + x3.powi(3), "lambda2^3 + x3^3 vanishes")?;
    Ok(vec![
        a - l1 * x1,
        T::from_f64(1000.0) * x1_5 * b - x2 - coupling,
        T::ratio(2, 100) + T::ratio(1998, 100) * l2_3 * c - x3 - coupling,
    ])
}

/// Scalar cusp normal form `l1 + l2 x - x^3`, cusp at the origin with `c = -1`.
pub fn scalar_cusp<T: Scalar>(z: &[T]) -> Result<Vec<T>, ModelError> {
    let (x, l1, l2) = (z[0], z[1], z[2]);
    Ok(vec![l1 + l2 * x - x * x * x])
}

/// `x^2 + l1^2 + l2^2 - R^2`: a closed equilibrium surface.
pub fn sphere<T: Scalar>(z: &[T], radius: f64) -> Result<Vec<T>, ModelError> {
    let r = T::from_f64(radius);
    Ok(vec![z[0] * z[0] + z[1] * z[1] + z[2] * z[2] - r * r])
}

/// `f = x`: the equilibrium set is the flat parameter plane.
pub fn plane<T: Scalar>(z: &[T]) -> Result<Vec<T>, ModelError> {
    Ok(vec![z[0]])
}
