//! Topological cusp test on the triangles of an equilibrium manifold.
//!
//! Along the boundary of a triangle the map
//! `g = (sigma_n, w_n^T D_xx f(v_n, v_n))` is sampled from a signed SVD
//! path of `D_x f`. A fold curve crossing the boundary shows up as a sign
//! change of `g1`, a zero of the quadratic coefficient as a sign change of
//! `g2`; two of each, interlaced, give index `+-1` and flag a cusp inside.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::continuation::{gauss_newton_project, ContinuationError, Flag, Triangulation};
use crate::linalg;
use crate::model::{ModelError, ModelSpec};
use crate::svd_path::{continue_svd_through, SvdError, SvdFrame, SvdOptions, SvdPath};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectError {
    #[error("simplex {0} does not exist")]
    NoSuchSimplex(usize),
    #[error("degenerate triangle {0}")]
    Degenerate(usize),
    #[error("boundary projection: {0}")]
    Projection(#[from] ContinuationError),
    #[error(transparent)]
    Svd(#[from] SvdError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectOptions {
    pub svd: SvdOptions,
    /// `g2` at both ends of the path counts as opposite when
    /// `|g2(0) + g2(1)| <= step4_rtol * max(|g2(0)|, |g2(1)|, step4_atol)`.
    pub step4_rtol: f64,
    pub step4_atol: f64,
    pub node_tol: f64,
    pub max_newton: usize,
    /// Shortest sample interval produced when separating sign changes.
    pub min_interval: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            svd: SvdOptions::default(),
            step4_rtol: 1e-6,
            step4_atol: 1e-12,
            node_tol: 1e-10,
            max_newton: 20,
            min_interval: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GSample {
    pub t: f64,
    pub g1: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleVerdict {
    pub flag: Flag,
    /// Step of the classification procedure that decided the flag; 1 when
    /// the boundary path could not be computed.
    pub exit_step: u8,
    #[serde(rename = "I1")]
    pub i1: Vec<usize>,
    #[serde(rename = "I2")]
    pub i2: Vec<usize>,
    /// Winding number of `g` along the boundary, when it is determined.
    pub index_value: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl TriangleVerdict {
    fn new(flag: Flag, exit_step: u8, i1: Vec<usize>, i2: Vec<usize>, index_value: Option<i32>) -> Self {
        TriangleVerdict { flag, exit_step, i1, i2, index_value, message: None }
    }

    fn failed(msg: String) -> Self {
        TriangleVerdict {
            flag: Flag::Undetermined,
            exit_step: 1,
            i1: Vec::new(),
            i2: Vec::new(),
            index_value: None,
            message: Some(msg),
        }
    }
}

/// Closed curve through the three edges of a triangle, mapped onto the
/// manifold. Edge `e` covers `t in [e/3, (e+1)/3]`; points on an edge are
/// linear interpolations projected along the normal space of the triangle's
/// plane.
pub struct BoundaryCurve<'a> {
    m: &'a ModelSpec,
    corners: [Vec<f64>; 3],
    normal: Vec<Vec<f64>>,
    tol: f64,
    max_newton: usize,
}

impl<'a> BoundaryCurve<'a> {
    pub fn new(m: &'a ModelSpec, tri: &Triangulation, id: usize, opts: &DetectOptions) -> Result<Self, DetectError> {
        let s = tri.simplices.get(id).ok_or(DetectError::NoSuchSimplex(id))?;
        let corners = s.nodes.map(|k| tri.nodes[k].z());
        Self::from_corners(m, corners, opts).map_err(|e| match e {
            DetectError::Degenerate(_) => DetectError::Degenerate(id),
            e => e,
        })
    }

    pub fn from_corners(m: &'a ModelSpec, corners: [Vec<f64>; 3], opts: &DetectOptions) -> Result<Self, DetectError> {
        let p = corners[0].len();
        let e1 = linalg::sub(&corners[1], &corners[0]);
        let e2 = linalg::sub(&corners[2], &corners[0]);
        let a = nalgebra::DMatrix::from_fn(2, p, |r, c| if r == 0 { e1[c] } else { e2[c] });
        let split = linalg::row_null_split(&a).ok_or(DetectError::Degenerate(0))?;
        if !(split.rcond > 1e-10) {
            return Err(DetectError::Degenerate(0));
        }
        let normal = split.null.iter().map(|v| v.iter().copied().collect()).collect();
        Ok(BoundaryCurve { m, corners, normal, tol: opts.node_tol, max_newton: opts.max_newton })
    }

    /// Point `gamma(t)`; corners are returned exactly.
    pub fn point(&self, t: f64) -> Result<Vec<f64>, DetectError> {
        let u = 3.0 * t.clamp(0.0, 1.0);
        let e = (u.floor() as usize).min(2);
        let s = u - e as f64;
        let (a, b) = (&self.corners[e], &self.corners[(e + 1) % 3]);
        if s == 0.0 {
            return Ok(a.clone());
        }
        if s == 1.0 {
            return Ok(b.clone());
        }
        let guess: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - s) * x + s * y).collect();
        let (z, _) = gauss_newton_project(self.m, &guess, &self.normal, self.tol, self.max_newton)?;
        Ok(z)
    }
}

/// `g` at a point, from the last signed singular triple of `frame`.
pub fn g_eval(m: &ModelSpec, frame: &SvdFrame, z: &[f64]) -> Result<GSample, ModelError> {
    let (sigma, w, v) = frame.last();
    let b = m.bilinear(z, &v, &v)?;
    Ok(GSample { t: frame.t, g1: sigma, g2: linalg::dot(&w, &b) })
}

/// Signed SVD path and `g` samples along the boundary of one triangle.
pub struct TriangleTrace {
    pub path: SvdPath,
    pub points: Vec<Vec<f64>>,
    pub samples: Vec<GSample>,
}

/// Samples along `curve` with extra frames at `breaks`.
fn sample_curve(
    m: &ModelSpec,
    curve: &BoundaryCurve,
    breaks: &[f64],
    opts: &DetectOptions,
) -> Result<TriangleTrace, DetectError> {
    let mut cache: HashMap<u64, Vec<f64>> = HashMap::new();
    let path = continue_svd_through(
        |t| -> Result<_, DetectError> {
            let z = curve.point(t)?;
            let j = m.jacobian_x(&z)?.to_dmatrix();
            cache.insert(t.to_bits(), z);
            Ok(j)
        },
        breaks,
        &opts.svd,
    )?;
    let points: Vec<Vec<f64>> = path.frames.iter().map(|f| cache[&f.t.to_bits()].clone()).collect();
    let samples = path.frames.iter().zip(&points).map(|(f, z)| g_eval(m, f, z)).collect::<Result<_, _>>()?;
    Ok(TriangleTrace { path, points, samples })
}

/// Signed SVD path and `g` samples along `curve`. Sample intervals in which
/// both components change sign are bisected until the two sign changes
/// separate or the interval is shorter than `min_interval`.
pub fn trace_curve(m: &ModelSpec, curve: &BoundaryCurve, opts: &DetectOptions) -> Result<TriangleTrace, DetectError> {
    let mut breaks: Vec<f64> = Vec::new();
    loop {
        let trace = sample_curve(m, curve, &breaks, opts)?;
        let g1: Vec<f64> = trace.samples.iter().map(|s| s.g1).collect();
        let g2: Vec<f64> = trace.samples.iter().map(|s| s.g2).collect();
        let (c1, c2) = (sign_changes(&signs(&g1)), sign_changes(&signs(&g2)));
        let before = breaks.len();
        for k in c1.iter().filter(|k| c2.contains(k)) {
            let (a, b) = (trace.samples[*k].t, trace.samples[*k + 1].t);
            if b - a > opts.min_interval {
                breaks.push(0.5 * (a + b));
            }
        }
        if breaks.len() == before {
            return Ok(trace);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
    }
}

pub fn trace_triangle(
    m: &ModelSpec,
    tri: &Triangulation,
    id: usize,
    opts: &DetectOptions,
) -> Result<TriangleTrace, DetectError> {
    trace_curve(m, &BoundaryCurve::new(m, tri, id, opts)?, opts)
}

/// Signs of a sample sequence, with exact zeros taking the sign of the
/// nearest nonzero neighbour (the previous one when there is a choice).
fn signs(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            if values[k] != 0.0 {
                return values[k].signum();
            }
            for d in 1..n {
                if k >= d && values[k - d] != 0.0 {
                    return values[k - d].signum();
                }
                if k + d < n && values[k + d] != 0.0 {
                    return values[k + d].signum();
                }
            }
            1.0
        })
        .collect()
}

fn sign_changes(s: &[f64]) -> Vec<usize> {
    (0..s.len().saturating_sub(1)).filter(|&k| s[k] * s[k + 1] < 0.0).collect()
}

/// Winding number of the sign pattern `(s1, s2)` counted in quarter turns;
/// `None` if some step changes both signs at once.
fn winding(s1: &[f64], s2: &[f64]) -> Option<i32> {
    let quadrant = |k: usize| match (s1[k] > 0.0, s2[k] > 0.0) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    };
    let n = s1.len();
    let mut quarters = 0;
    for k in 0..n {
        let (a, b) = (quadrant(k), quadrant((k + 1) % n));
        match (b + 4 - a) % 4 {
            0 => {}
            1 => quarters += 1,
            3 => quarters -= 1,
            _ => return None,
        }
    }
    (quarters % 4 == 0).then_some(quarters / 4)
}

/// Classifies a triangle from its ordered boundary samples.
pub fn classify_samples(samples: &[GSample], opts: &DetectOptions) -> TriangleVerdict {
    if samples.len() < 2 {
        return TriangleVerdict::failed("fewer than two boundary samples".into());
    }
    let g1: Vec<f64> = samples.iter().map(|s| s.g1).collect();
    let g2: Vec<f64> = samples.iter().map(|s| s.g2).collect();
    let (s1, s2) = (signs(&g1), signs(&g2));
    let i1 = sign_changes(&s1);
    if i1.is_empty() {
        return TriangleVerdict::new(Flag::NoCusp, 3, i1, Vec::new(), Some(0));
    }
    let (a, b) = (g2[0], g2[g2.len() - 1]);
    if (a + b).abs() <= opts.step4_rtol * a.abs().max(b.abs()).max(opts.step4_atol) {
        return TriangleVerdict::new(Flag::Undetermined, 4, i1, Vec::new(), None);
    }
    let i2 = sign_changes(&s2);
    if i2.is_empty() {
        return TriangleVerdict::new(Flag::NoCusp, 5, i1, i2, Some(0));
    }
    // an odd count means the samples do not close up; no conclusion
    if i1.len() > 2 || i2.len() > 2 || i1.len() % 2 == 1 || i2.len() % 2 == 1 {
        return TriangleVerdict::new(Flag::Undetermined, 6, i1, i2, None);
    }
    let (p1, p2, q1, q2) = (i1[0], i1[1], i2[0], i2[1]);
    if i1.iter().any(|k| i2.contains(k)) {
        return TriangleVerdict::new(Flag::Undetermined, 7, i1, i2, None);
    }
    let interlaced = (p1 < q1 && q1 < p2 && p2 < q2) || (q1 < p1 && p1 < q2 && q2 < p2);
    if interlaced {
        let index = winding(&s1, &s2);
        TriangleVerdict::new(Flag::Cusp, 7, i1, i2, index)
    } else {
        TriangleVerdict::new(Flag::NoCusp, 8, i1, i2, Some(0))
    }
}

/// Flags one triangle; failures of the boundary path give `UNDETERMINED`.
pub fn classify_triangle(m: &ModelSpec, tri: &Triangulation, id: usize, opts: &DetectOptions) -> TriangleVerdict {
    match trace_triangle(m, tri, id, opts) {
        Ok(trace) => classify_samples(&trace.samples, opts),
        Err(e) => TriangleVerdict::failed(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub id: usize,
    #[serde(flatten)]
    pub verdict: TriangleVerdict,
    pub centroid: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagCounts {
    pub cusp: usize,
    pub no_cusp: usize,
    pub undetermined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectSummary {
    pub model: String,
    pub counts: FlagCounts,
    pub triangles: Vec<TriangleReport>,
}

impl DetectSummary {
    /// CUSP triangles, then UNDETERMINED ones, by id.
    pub fn candidates(&self) -> impl Iterator<Item = &TriangleReport> {
        let cusp = self.triangles.iter().filter(|r| r.verdict.flag == Flag::Cusp);
        let und = self.triangles.iter().filter(|r| r.verdict.flag == Flag::Undetermined);
        cusp.chain(und)
    }
}

/// Flags every simplex of `tri` in place. Triangles are processed in
/// parallel; results are collected in simplex order.
pub fn detect_all(m: &ModelSpec, tri: &mut Triangulation, opts: &DetectOptions) -> DetectSummary {
    let verdicts: Vec<TriangleVerdict> =
        (0..tri.simplices.len()).into_par_iter().map(|id| classify_triangle(m, tri, id, opts)).collect();
    let mut counts = FlagCounts::default();
    let mut triangles = Vec::with_capacity(verdicts.len());
    for (id, verdict) in verdicts.into_iter().enumerate() {
        match verdict.flag {
            Flag::Cusp => counts.cusp += 1,
            Flag::NoCusp => counts.no_cusp += 1,
            _ => counts.undetermined += 1,
        }
        tri.simplices[id].flag = verdict.flag;
        triangles.push(TriangleReport { id, verdict, centroid: tri.centroid(id) });
    }
    DetectSummary { model: tri.model.clone(), counts, triangles }
}
