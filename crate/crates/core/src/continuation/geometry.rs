use nalgebra::{DMatrix, DVector};

use super::ContinuationError;
use crate::linalg;
use crate::model::ModelSpec;

/// Below this `sigma_min / sigma_max` the full Jacobian counts as rank deficient.
const RANK_TOL: f64 = 1e-12;

fn split(m: &ModelSpec, z: &[f64]) -> Result<(DMatrix<f64>, linalg::RowNullSplit), ContinuationError> {
    let j = m.jacobian(z)?.to_dmatrix();
    let s = linalg::row_null_split(&j).ok_or(ContinuationError::RankDeficient { rcond: 0.0 })?;
    if !(s.rcond > RANK_TOL) {
        return Err(ContinuationError::RankDeficient { rcond: s.rcond });
    }
    Ok((j, s))
}

/// Orthonormal basis `(t1, t2)` of `ker D_(x,lambda) f(z)`, oriented so that
/// `det [D f; t1; t2] > 0`. The orientation is the same everywhere on the
/// manifold, so counter-clockwise is a global notion.
pub fn tangent_plane(m: &ModelSpec, z: &[f64]) -> Result<[Vec<f64>; 2], ContinuationError> {
    let (j, s) = split(m, z)?;
    let p = z.len();
    let n = p - 2;
    let t1: Vec<f64> = s.null[0].iter().copied().collect();
    let mut t2: Vec<f64> = s.null[1].iter().copied().collect();
    let sq = DMatrix::from_fn(p, p, |r, c| match r {
        r if r < n => j[(r, c)],
        r if r == n => t1[c],
        _ => t2[c],
    });
    if sq.determinant() < 0.0 {
        t2.iter_mut().for_each(|v| *v = -*v);
    }
    Ok([t1, t2])
}

/// Orthonormal basis of the row space of `D_(x,lambda) f(z)`.
pub fn normal_space(m: &ModelSpec, z: &[f64]) -> Result<Vec<Vec<f64>>, ContinuationError> {
    let (_, s) = split(m, z)?;
    Ok(s.row.iter().map(|r| r.iter().copied().collect()).collect())
}

/// Newton's method for `f(guess + N^T delta) = 0`, where the rows of `N`
/// span `normal`. Returns the corrected point and its sup-norm residual.
pub fn gauss_newton_project(
    m: &ModelSpec,
    guess: &[f64],
    normal: &[Vec<f64>],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64), ContinuationError> {
    let n = m.n;
    let p = guess.len();
    let nt = DMatrix::from_fn(p, normal.len(), |r, c| normal[c][r]);
    let mut z = guess.to_vec();
    let mut residual = f64::INFINITY;
    for it in 0..=max_iter {
        let f = m.eval(&z)?;
        residual = linalg::norm_inf(&f);
        if residual <= tol {
            return Ok((z, residual));
        }
        if it == max_iter || !residual.is_finite() {
            break;
        }
        let j = m.jacobian(&z)?.to_dmatrix();
        let b = &j * &nt;
        let rhs = -DVector::from_vec(f);
        let delta = if b.nrows() == n && b.ncols() == n {
            linalg::solve(&b, &rhs).or_else(|| linalg::lstsq(&b, &rhs))
        } else {
            linalg::lstsq(&b, &rhs)
        }
        .ok_or(ContinuationError::RankDeficient { rcond: 0.0 })?;
        let step = &nt * delta;
        for (zi, si) in z.iter_mut().zip(step.iter()) {
            *zi += si;
        }
    }
    Err(ContinuationError::NoConvergence { iterations: max_iter, residual })
}

/// Largest principal angle between two tangent planes, in radians.
pub fn tangent_angle(a: &[Vec<f64>; 2], b: &[Vec<f64>; 2]) -> f64 {
    let g = [
        [linalg::dot(&a[0], &b[0]), linalg::dot(&a[0], &b[1])],
        [linalg::dot(&a[1], &b[0]), linalg::dot(&a[1], &b[1])],
    ];
    let fro2 = g.iter().flatten().map(|v| v * v).sum::<f64>();
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((fro2 + disc) / 2.0).sqrt();
    let smin = if smax > 0.0 { det.abs() / smax } else { 0.0 };
    smin.min(1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_tangent_is_lambda_plane() {
        let m = ModelSpec::by_name("plane-test").unwrap();
        let [t1, t2] = tangent_plane(&m, &[0.0, 0.3, 0.1]).unwrap();
        assert!(t1[0].abs() < 1e-15 && t2[0].abs() < 1e-15);
        assert!(linalg::dot(&t1, &t2).abs() < 1e-15);
    }

    #[test]
    fn sphere_tangent_is_orthogonal_to_radius() {
        let m = ModelSpec::by_name("sphere-test").unwrap();
        let [t1, t2] = tangent_plane(&m, &[1.0, 0.0, 0.0]).unwrap();
        assert!(t1[0].abs() < 1e-15 && t2[0].abs() < 1e-15);
        // outward normal first, then (t1, t2): positively oriented
        let cross = t1[1] * t2[2] - t1[2] * t2[1];
        assert!(cross > 0.0);
    }

    #[test]
    fn sphere_projection_closed_form() {
        let m = ModelSpec::by_name("sphere-test").unwrap();
        let (z, r) =
            gauss_newton_project(&m, &[1.1, 0.0, 0.0], &[vec![1.0, 0.0, 0.0]], 1e-14, 20).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-12 && z[1] == 0.0 && z[2] == 0.0);
        assert!(r <= 1e-14);
    }

    #[test]
    fn point_on_manifold_is_unchanged() {
        let m = ModelSpec::by_name("sphere-test").unwrap();
        let (z, _) = gauss_newton_project(&m, &[1.0, 0.0, 0.0], &[vec![1.0, 0.0, 0.0]], 1e-12, 20).unwrap();
        assert_eq!(z, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn rank_deficiency_detected() {
        let m = ModelSpec::by_name("sphere-test").unwrap();
        assert!(matches!(
            tangent_plane(&m, &[0.0, 0.0, 0.0]),
            Err(ContinuationError::RankDeficient { .. })
        ));
    }

    #[test]
    fn angle_between_planes() {
        let a = [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let c = 0.3_f64.cos();
        let s = 0.3_f64.sin();
        let b = [vec![0.0, 1.0, 0.0], vec![c, 0.0, s]];
        assert!((tangent_angle(&a, &b) - 0.3).abs() < 1e-12);
        assert!(tangent_angle(&a, &a) < 1e-7);
    }
}
