//! Float linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// SVD of a square or tall matrix with singular values in descending order.
pub struct SortedSvd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

/// Backed by faer: nalgebra's SVD loses up to `1e-8` in reconstruction on
/// small matrices with close singular values.
pub fn svd_sorted(a: &DMatrix<f64>) -> Option<SortedSvd> {
    let (m, n) = a.shape();
    let fa = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)]);
    let svd = fa.thin_svd().ok()?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = m.min(n);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    if order.iter().any(|&i| !s[i].is_finite()) {
        return None;
    }
    Some(SortedSvd {
        u: DMatrix::from_fn(m, k, |r, c| u[(r, order[c])]),
        sigma: order.iter().map(|&i| s[i]).collect(),
        v: DMatrix::from_fn(n, k, |r, c| v[(r, order[c])]),
    })
}

/// Orthonormal bases of the row space and the null space of a wide `m x p`
/// matrix (`m < p`), together with the ratio `sigma_min / sigma_max`.
pub struct RowNullSplit {
    pub row: Vec<DVector<f64>>,
    pub null: Vec<DVector<f64>>,
    pub rcond: f64,
}

pub fn row_null_split(a: &DMatrix<f64>) -> Option<RowNullSplit> {
    let (m, p) = a.shape();
    // zero-pad to a square matrix so the SVD returns a full right basis
    let mut sq = DMatrix::zeros(p, p);
    sq.view_mut((0, 0), (m, p)).copy_from(a);
    let svd = svd_sorted(&sq)?;
    let smax = svd.sigma[0];
    let rcond = if smax > 0.0 { svd.sigma[m - 1] / smax } else { 0.0 };
    let col = |j: usize| svd.v.column(j).into_owned();
    Some(RowNullSplit { row: (0..m).map(col).collect(), null: (m..p).map(col).collect(), rcond })
}

pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let x = a.clone().lu().solve(b)?;
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub fn inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let x = a.clone().try_inverse()?;
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Minimum-norm least-squares solution via the SVD.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = svd_sorted(a)?;
    let cut = svd.sigma.first().copied().unwrap_or(0.0) * 1e-14;
    let mut x = DVector::zeros(a.ncols());
    for (k, &s) in svd.sigma.iter().enumerate() {
        if s > cut {
            x += svd.v.column(k) * (svd.u.column(k).dot(b) / s);
        }
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Eigenvalues and unit eigenvectors (as columns) of a real square matrix.
///
/// Eigenvalues come from the real Schur form; each eigenvector is the right
/// singular vector of `A - mu I` for its smallest singular value.
pub fn eigen_decomposition(a: &DMatrix<f64>) -> Option<(Vec<Complex64>, DMatrix<Complex64>)> {
    let n = a.nrows();
    let mut mus: Vec<Complex64> = a.clone().complex_eigenvalues().iter().copied().collect();
    mus.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let ac: DMatrix<Complex64> = a.map(|v| Complex64::new(v, 0.0));
    let mut p = DMatrix::zeros(n, n);
    for (j, &mu) in mus.iter().enumerate() {
        let shifted = &ac - DMatrix::from_diagonal_element(n, n, mu);
        let svd = shifted.try_svd(false, true, f64::EPSILON, 0)?;
        let vt = svd.v_t?;
        let k = (0..n).min_by(|&i, &k| svd.singular_values[i].total_cmp(&svd.singular_values[k]))?;
        let mut v: Vec<Complex64> = vt.row(k).iter().map(|c| c.conj()).collect();
        // fix the phase: largest component real and positive
        let big = (0..n).max_by(|&i, &k| v[i].norm().total_cmp(&v[k].norm()))?;
        let phase = v[big].conj() / v[big].norm();
        for c in v.iter_mut() {
            *c *= phase;
        }
        for (i, c) in v.into_iter().enumerate() {
            p[(i, j)] = c;
        }
    }
    Some((mus, p))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}
