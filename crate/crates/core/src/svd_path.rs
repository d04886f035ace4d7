//! Continuous signed singular value decomposition of a state Jacobian along
//! a closed curve.
//!
//! Consecutive frames are aligned by matching left singular vectors; a sign
//! flip of exactly one of `w_i`, `v_i` is absorbed into a negative `sigma_i`,
//! so that singular values may cross zero smoothly at folds.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SvdError {
    #[error("singular vectors cannot be matched at t = {t} (best overlap {overlap:.3})")]
    AlignmentAmbiguous { t: f64, overlap: f64 },
    #[error("signed SVD path needs more than {0} frames")]
    MaxStepsExceeded(usize),
    #[error("step to t = {0} is large against the singular value gap")]
    StepTooLarge(f64),
    #[error("SVD failed at t = {0}")]
    Decomposition(f64),
    #[error("matrix at t = {t}: {msg}")]
    Evaluation { t: f64, msg: String },
}

/// One point of a signed SVD path, `J(t) = W diag(sigma) V^T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdFrame {
    pub t: f64,
    pub w: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl SvdFrame {
    /// Standard SVD with nonnegative singular values in descending order.
    pub fn standard(t: f64, j: &DMatrix<f64>) -> Result<Self, SvdError> {
        let s = linalg::svd_sorted(j).ok_or(SvdError::Decomposition(t))?;
        Ok(SvdFrame { t, w: s.u, sigma: s.sigma, v: s.v })
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.w * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.sigma)) * self.v.transpose()
    }

    /// Last (smallest at the start of the path) signed singular triple.
    pub fn last(&self) -> (f64, Vec<f64>, Vec<f64>) {
        let n = self.dim() - 1;
        (self.sigma[n], self.w.column(n).iter().copied().collect(), self.v.column(n).iter().copied().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdOptions {
    /// Largest parameter step between frames.
    pub max_step: f64,
    /// Minimum `|<w_prev, w_next>|` accepted when matching columns.
    pub threshold: f64,
    /// Halvings of the step before giving up at one point.
    pub max_bisections: usize,
    pub max_frames: usize,
    /// A step is accepted only if `||J(t_next) - J(t_prev)||_F` is at most
    /// this fraction of the smallest gap between the `|sigma_i|`: singular
    /// values then cannot cross within the step and the vectors rotate by a
    /// bounded angle. Ignored once the step has been halved
    /// `max_bisections` times (a genuine coalescence).
    #[serde(default = "default_gap_ratio")]
    pub gap_ratio: f64,
}

fn default_gap_ratio() -> f64 {
    0.25
}

/// Smallest distance between two of the `|sigma_i|`.
fn singular_gap(sigma: &[f64]) -> f64 {
    let mut a: Vec<f64> = sigma.iter().map(|s| s.abs()).collect();
    a.sort_by(f64::total_cmp);
    a.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            max_step: 1.0 / 48.0,
            threshold: 0.9,
            max_bisections: 24,
            max_frames: 20_000,
            gap_ratio: default_gap_ratio(),
        }
    }
}

/// Aligns the raw SVD `raw` of the next matrix to `prev`.
///
/// Columns are matched greedily by largest `|<w_prev_i, w_raw_j>|`; then `w`
/// and `v` are each flipped to agree with the previous frame, and the
/// product of the two flips multiplies `sigma`.
pub fn svd_align(prev: &SvdFrame, raw: &SvdFrame, threshold: f64) -> Result<SvdFrame, SvdError> {
    let n = prev.dim();
    let m = prev.w.transpose() * &raw.w;
    let mut row_free = vec![true; n];
    let mut col_free = vec![true; n];
    let mut assign = vec![0usize; n];
    for _ in 0..n {
        let mut best = (0, 0, -1.0);
        for i in (0..n).filter(|&i| row_free[i]) {
            for j in (0..n).filter(|&j| col_free[j]) {
                let a = m[(i, j)].abs();
                if a > best.2 {
                    best = (i, j, a);
                }
            }
        }
        let (i, j, a) = best;
        if a < threshold {
            return Err(SvdError::AlignmentAmbiguous { t: raw.t, overlap: a });
        }
        row_free[i] = false;
        col_free[j] = false;
        assign[i] = j;
    }
    let mut w = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    let mut sigma = vec![0.0; n];
    for i in 0..n {
        let j = assign[i];
        let sw = m[(i, j)].signum();
        let ov = prev.v.column(i).dot(&raw.v.column(j));
        if ov.abs() < threshold {
            return Err(SvdError::AlignmentAmbiguous { t: raw.t, overlap: ov.abs() });
        }
        let sv = ov.signum();
        w.set_column(i, &(raw.w.column(j) * sw));
        v.set_column(i, &(raw.v.column(j) * sv));
        sigma[i] = raw.sigma[j] * sw * sv;
    }
    Ok(SvdFrame { t: raw.t, w, sigma, v })
}

/// Signed SVD path of `t -> J(t)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdPath {
    pub frames: Vec<SvdFrame>,
}

impl SvdPath {
    pub fn first(&self) -> &SvdFrame {
        &self.frames[0]
    }

    pub fn last(&self) -> &SvdFrame {
        self.frames.last().expect("path has frames")
    }

    /// Sign `d_i = sign <w_i(0), w_i(1)>` of every column after one
    /// traversal; all ones when the path closes up without monodromy.
    pub fn monodromy(&self) -> Vec<f64> {
        let (a, b) = (self.first(), self.last());
        (0..a.dim()).map(|i| a.w.column(i).dot(&b.w.column(i)).signum()).collect()
    }
}

/// Follows the signed SVD of `j(t)` from `t = 0` to `t = 1`, halving the
/// step when two frames cannot be matched.
pub fn continue_svd<E: std::fmt::Display>(
    j: impl FnMut(f64) -> Result<DMatrix<f64>, E>,
    opts: &SvdOptions,
) -> Result<SvdPath, SvdError> {
    continue_svd_through(j, &[], opts)
}

/// Like [`continue_svd`], with a frame at every point of `breaks` (sorted,
/// inside `(0, 1)`).
pub fn continue_svd_through<E: std::fmt::Display>(
    mut j: impl FnMut(f64) -> Result<DMatrix<f64>, E>,
    breaks: &[f64],
    opts: &SvdOptions,
) -> Result<SvdPath, SvdError> {
    let mut eval = |t: f64| j(t).map_err(|e| SvdError::Evaluation { t, msg: e.to_string() });
    let mut prev_j = eval(0.0)?;
    let mut frames = vec![SvdFrame::standard(0.0, &prev_j)?];
    let mut dt = opts.max_step;
    let mut halvings = 0;
    let mut next_break = 0;
    while frames.last().expect("nonempty").t < 1.0 {
        if frames.len() >= opts.max_frames {
            return Err(SvdError::MaxStepsExceeded(opts.max_frames));
        }
        let prev = frames.last().expect("nonempty");
        while next_break < breaks.len() && breaks[next_break] <= prev.t {
            next_break += 1;
        }
        let stop = breaks.get(next_break).copied().unwrap_or(1.0);
        let t = if prev.t + dt >= stop - 1e-12 * stop.max(opts.max_step) { stop } else { prev.t + dt };
        let jt = eval(t)?;
        let raw = SvdFrame::standard(t, &jt)?;
        let gap = singular_gap(&prev.sigma).min(singular_gap(&raw.sigma));
        let small = (&jt - &prev_j).norm() <= opts.gap_ratio * gap || halvings >= opts.max_bisections;
        let aligned = if small { svd_align(prev, &raw, opts.threshold) } else { Err(SvdError::StepTooLarge(t)) };
        match aligned {
            Ok(f) => {
                frames.push(f);
                prev_j = jt;
                halvings = 0;
                dt = (2.0 * dt).min(opts.max_step);
            }
            Err(e) => {
                halvings += 1;
                if halvings > opts.max_bisections {
                    return Err(e);
                }
                dt = 0.5 * (t - prev.t);
            }
        }
    }
    Ok(SvdPath { frames })
}
