use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::complex::sum_up;
use super::{round, ComplexInterval, Interval, IntervalError};
use crate::scalar::Ring;

/// Small dense row-major matrix over any [`Ring`].
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntervalMatrix = Matrix<Interval>;
pub type ComplexIntervalMatrix = Matrix<ComplexInterval>;

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)] * other[(k, j)])
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)] * v[k]))
            .collect()
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix<f64> {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl IntervalMatrix {
    pub fn from_point(m: &DMatrix<f64>) -> Self {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| Interval::point(m[(i, j)]))
    }

    pub fn mid(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].mid())
    }

    pub fn contains(&self, m: &DMatrix<f64>) -> bool {
        m.nrows() == self.rows
            && m.ncols() == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)].contains(m[(i, j)])))
    }

    pub fn to_complex(&self) -> ComplexIntervalMatrix {
        self.map(|&x| ComplexInterval::from_real(x))
    }
}

impl ComplexIntervalMatrix {
    pub fn from_point_complex(m: &DMatrix<Complex64>) -> Self {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| ComplexInterval::point(m[(i, j)]))
    }

    /// Upper bound of the induced infinity norm.
    pub fn norm_sup_upper(&self) -> f64 {
        (0..self.rows)
            .map(|i| sum_up(self.row(i).iter().map(|z| z.mag())))
            .fold(0.0, f64::max)
    }
}

/// Upper bound of the induced infinity norm (max absolute row sum) valid for
/// every point matrix contained in `m`.
pub fn mat_norm_sup_upper(m: &IntervalMatrix) -> f64 {
    (0..m.rows)
        .map(|i| sum_up(m.row(i).iter().map(|x| x.mag())))
        .fold(0.0, f64::max)
}

/// Interval enclosure of the exact inverse of a real point matrix.
///
/// With `Q` a float inverse and `delta >= ||I - QP||_inf` rigorously bounded,
/// `||P^{-1} - Q||_inf <= ||Q||_inf * delta / (1 - delta)`, which bounds every
/// entry of `P^{-1} - Q`.
pub fn enclose_inverse(p: &DMatrix<f64>) -> Result<IntervalMatrix, IntervalError> {
    if !p.is_square() {
        return Err(IntervalError::Dimension(format!("{}x{} is not square", p.nrows(), p.ncols())));
    }
    let n = p.nrows();
    let q = p
        .clone()
        .try_inverse()
        .ok_or(IntervalError::NotVerifiablyInvertible(f64::INFINITY))?;
    let qi = IntervalMatrix::from_point(&q);
    let residual = IntervalMatrix::identity(n).sub(&qi.mul(&IntervalMatrix::from_point(p)));
    let delta = mat_norm_sup_upper(&residual);
    let rho = inflation_radius(mat_norm_sup_upper(&qi), delta)?;
    Ok(qi.map(|x| x.inflate(rho)))
}

/// Complex counterpart of [`enclose_inverse`]; entries are inflated in both
/// real and imaginary parts.
pub fn enclose_inverse_complex(
    p: &DMatrix<Complex64>,
) -> Result<ComplexIntervalMatrix, IntervalError> {
    if !p.is_square() {
        return Err(IntervalError::Dimension(format!("{}x{} is not square", p.nrows(), p.ncols())));
    }
    let n = p.nrows();
    let q = p
        .clone()
        .try_inverse()
        .ok_or(IntervalError::NotVerifiablyInvertible(f64::INFINITY))?;
    let qi = ComplexIntervalMatrix::from_point_complex(&q);
    let residual =
        ComplexIntervalMatrix::identity(n).sub(&qi.mul(&ComplexIntervalMatrix::from_point_complex(p)));
    let delta = residual.norm_sup_upper();
    let rho = inflation_radius(qi.norm_sup_upper(), delta)?;
    Ok(qi.map(|z| z.inflate(rho)))
}

fn inflation_radius(q_norm: f64, delta: f64) -> Result<f64, IntervalError> {
    if !(delta < 1.0) {
        return Err(IntervalError::NotVerifiablyInvertible(delta));
    }
    let num = round::mul_up(q_norm, delta);
    let den = round::sub_down(1.0, delta);
    Ok(round::div_up(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norm_is_one() {
        assert_eq!(mat_norm_sup_upper(&IntervalMatrix::identity(2)), 1.0);
    }

    #[test]
    fn point_matrix_row_sum() {
        let m = IntervalMatrix::from_point(&DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 3.0, 4.0]));
        assert_eq!(mat_norm_sup_upper(&m), 7.0);
    }

    #[test]
    fn worst_case_endpoints() {
        let m = Matrix::from_fn(1, 2, |_, j| {
            if j == 0 {
                Interval::new(0.0, 1.0)
            } else {
                Interval::new(-2.0, -1.0)
            }
        });
        assert_eq!(mat_norm_sup_upper(&m), 3.0);
    }

    #[test]
    fn inverse_of_identity_is_tight() {
        let inv = enclose_inverse(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(inv, IntervalMatrix::identity(3));
    }

    #[test]
    fn inverse_of_diagonal() {
        let p = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 4.0]));
        let inv = enclose_inverse(&p).unwrap();
        assert!(inv[(0, 0)].contains(0.5));
        assert!(inv[(1, 1)].contains(0.25));
        assert!(inv[(0, 1)].contains(0.0));
    }

    #[test]
    fn singular_matrix_rejected() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(enclose_inverse(&p), Err(IntervalError::NotVerifiablyInvertible(_))));
    }

    #[test]
    fn complex_inverse_contains_identity_product() {
        let p = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.5),
                Complex64::new(0.2, -0.1),
                Complex64::new(-0.3, 0.0),
                Complex64::new(2.0, 1.0),
            ],
        );
        let inv = enclose_inverse_complex(&p).unwrap();
        let prod = inv.mul(&ComplexIntervalMatrix::from_point_complex(&p));
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                assert!(prod[(i, j)].contains(e));
            }
        }
    }
}
