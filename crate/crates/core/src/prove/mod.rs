//! Computer-assisted existence proofs of cusp points.
//!
//! A seed is refined by Newton's method on the cusp map `F`; a
//! Newton-Kantorovich argument evaluated in interval arithmetic then proves
//! that `F` has a unique non-degenerate zero within a small radius. Gershgorin
//! disks of the pseudo-diagonalized state Jacobian show that exactly one
//! eigenvalue is on the imaginary axis, and an enclosure of the normal-form
//! coefficient `c` away from zero completes the proof.

mod map;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{
    self, disks_disjoint, gershgorin_disks, mat_norm_sup_upper, round, ComplexIntervalMatrix, DdBall, Disk, Interval,
    IntervalError, IntervalMatrix,
};
use crate::linalg;
use crate::model::{ModelError, ModelSpec};
use crate::scalar::Scalar;
pub use map::{cusp_df, cusp_f, normal_form_coefficient, packed_len, CuspUnknowns};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProveError {
    #[error("Newton's method did not converge (residual {residual:e} after {iterations} iterations)")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Jacobian of the cusp map is singular")]
    SingularJacobian,
    #[error("Newton-Kantorovich bounds fail: Y = {y:e}, Z = {z:e} ({reason})")]
    CertificationFailed { y: f64, z: f64, reason: String },
    #[error("matrix is not verifiably invertible: {0}")]
    NotVerifiablyInvertible(String),
    #[error("Gershgorin disks overlap")]
    DisksOverlap,
    #[error("spectrum: {0}")]
    Spectrum(String),
    #[error("normal-form coefficient enclosure {0} contains zero")]
    SignUndetermined(Interval),
    #[error("invalid certificate: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProveOptions {
    pub r_star: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl ProveOptions {
    pub fn for_model(m: &ModelSpec) -> Self {
        ProveOptions { r_star: m.defaults.r_star, newton_tol: 1e-13, max_newton: 60 }
    }
}

/// Initial guess for the cusp unknowns at a point `z = (x, lambda)`: `v` and
/// `w` are the last right and left singular vectors of `D_x f`, scaled so that
/// `|v| = 1` and `w.v = 1`; `h` solves `D_x f h = -D_xx f(v, v)`, `w.h = 0` in
/// the least-squares sense, and `s = 0`.
pub fn seed_unknowns(m: &ModelSpec, z: &[f64]) -> Result<Vec<f64>, ProveError> {
    let n = m.n;
    let j = m.jacobian_x(z)?.to_dmatrix();
    let svd = linalg::svd_sorted(&j).ok_or(ProveError::SingularJacobian)?;
    let v: Vec<f64> = svd.v.column(n - 1).iter().copied().collect();
    let mut w: Vec<f64> = svd.u.column(n - 1).iter().copied().collect();
    let wv = linalg::dot(&w, &v);
    if wv.abs() < 1e-8 {
        return Err(ProveError::SingularJacobian);
    }
    w.iter_mut().for_each(|c| *c /= wv);
    let b = m.bilinear(z, &v, &v)?;
    let a = DMatrix::from_fn(n + 1, n, |r, c| if r < n { j[(r, c)] } else { w[c] });
    let rhs = DVector::from_fn(n + 1, |r, _| if r < n { -b[r] } else { 0.0 });
    let h = linalg::lstsq(&a, &rhs).ok_or(ProveError::SingularJacobian)?;
    let u = CuspUnknowns {
        x: z[..n].to_vec(),
        v,
        w,
        lambda: [z[n], z[n + 1]],
        h: h.iter().copied().collect(),
        s: [0.0, 0.0],
    };
    Ok(u.pack())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonResult {
    pub x: Vec<f64>,
    /// Sup-norm residual before each iteration and after the last one.
    pub residuals: Vec<f64>,
}

impl NewtonResult {
    pub fn residual(&self) -> f64 {
        *self.residuals.last().expect("at least one residual")
    }
}

/// Newton's method on the cusp map with backtracking on the residual.
///
/// Stops once the residual is below `tol`, or when it stops decreasing
/// after having come within `sqrt(tol)`; in the latter case the result is
/// accepted if the residual is below `tol * (1 + |X|)`.
pub fn newton_refine(m: &ModelSpec, x0: &[f64], tol: f64, max_iter: usize) -> Result<NewtonResult, ProveError> {
    let mut x = x0.to_vec();
    let mut f = accurate_residual(m, &x)?;
    let mut r = linalg::norm_inf(&f);
    let mut residuals = vec![r];
    let scale = |x: &[f64]| 1.0 + linalg::norm_inf(x);
    for _ in 0..max_iter {
        if r <= tol {
            break;
        }
        let df = cusp_df(m, &x)?.to_dmatrix();
        let step = linalg::solve(&df, &-DVector::from_vec(f.clone())).ok_or(ProveError::SingularJacobian)?;
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
            if let Ok(ft) = accurate_residual(m, &trial) {
                let rt = linalg::norm_inf(&ft);
                if rt.is_finite() && (rt < r || (alpha == 1.0 && rt <= tol * scale(&trial))) {
                    accepted = Some((trial, ft, rt));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((xt, ft, rt)) => {
                let stalled = rt >= 0.5 * r && r <= tol.sqrt();
                x = xt;
                f = ft;
                r = rt;
                residuals.push(r);
                if stalled {
                    break;
                }
            }
            None => break,
        }
    }
    if r <= tol * scale(&x) {
        Ok(NewtonResult { x, residuals })
    } else {
        Err(ProveError::NoConvergence { iterations: residuals.len() - 1, residual: r })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NkBounds {
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub r0: f64,
    /// Radius of the ball over which `Z` was bounded.
    pub r_star: f64,
    /// Certified radius: `r0` rounded up to two significant digits, capped at
    /// `r_star`.
    pub r: f64,
}

fn ball_box(x: &[f64], r: f64) -> Vec<Interval> {
    x.iter().map(|&v| Interval::ball(v, r)).collect()
}

/// Rounds `r0 > 0` up to two significant decimal digits.
pub fn round_up_2sig(r0: f64) -> f64 {
    if !(r0 > 0.0) || !r0.is_finite() {
        return r0;
    }
    let e = r0.log10().floor() as i32 - 1;
    let unit = 10f64.powi(e);
    let mut r = (r0 / unit).ceil() * unit;
    while r < r0 {
        r = r.next_up();
    }
    r
}

/// Encloses `F(x_bar)` using double-double balls, so that the bound is
/// limited by the residual rather than by `f64` rounding of the evaluation.
pub fn residual_enclosure(m: &ModelSpec, x_bar: &[f64]) -> Result<Vec<Interval>, ProveError> {
    let xb: Vec<DdBall> = x_bar.iter().map(|&v| DdBall::point(v)).collect();
    cusp_f(m, &xb)?
        .iter()
        .map(|b| b.to_interval().ok_or_else(|| ProveError::Invalid("residual overflows".into())))
        .collect()
}

/// Residual of the cusp map with double-double accuracy, rounded to `f64`.
fn accurate_residual(m: &ModelSpec, x: &[f64]) -> Result<Vec<f64>, ProveError> {
    let xb: Vec<DdBall> = x.iter().map(|&v| DdBall::point(v)).collect();
    Ok(cusp_f(m, &xb)?.iter().map(|b| b.approx()).collect())
}

/// Newton-Kantorovich bounds at `x_bar`:
/// `Y >= |A F(x_bar)|_inf` and `Z >= sup |I - A DF(xi)|_inf` over the box
/// `x_bar + [-r_star, r_star]^(4n+4)`, with `A` a float inverse of
/// `DF(x_bar)`. If `Z >= 1`, one retry is made with `r_star / 10`.
pub fn nk_certify(m: &ModelSpec, x_bar: &[f64], r_star: f64) -> Result<NkBounds, ProveError> {
    let p = packed_len(m.n);
    if x_bar.len() != p {
        return Err(ProveError::Invalid(format!("X_bar needs {p} entries, got {}", x_bar.len())));
    }
    let df = cusp_df(m, x_bar)?.to_dmatrix();
    let a = linalg::inverse(&df).ok_or_else(|| ProveError::NotVerifiablyInvertible("DF(X_bar)".into()))?;
    let ai = IntervalMatrix::from_point(&a);
    let fx = residual_enclosure(m, x_bar)?;
    let y = ai.mul_vec(&fx).iter().map(|v| v.mag()).fold(0.0, f64::max);
    let mut bounds = None;
    for radius in [r_star, r_star / 10.0] {
        let dfi = cusp_df(m, &ball_box(x_bar, radius))?;
        let z = mat_norm_sup_upper(&IntervalMatrix::identity(p).sub(&ai.mul(&dfi)));
        bounds = Some((radius, z));
        if z < 1.0 {
            break;
        }
    }
    let (r_star, z) = bounds.expect("at least one radius tried");
    if !(z < 1.0) {
        return Err(ProveError::CertificationFailed { y, z, reason: "Z >= 1".into() });
    }
    let r0 = round::div_up(y, round::sub_down(1.0, z));
    if !(r0 < r_star) {
        return Err(ProveError::CertificationFailed { y, z, reason: format!("r0 = {r0:e} >= r_star = {r_star:e}") });
    }
    Ok(NkBounds { y, z, r0, r_star, r: round_up_2sig(r0).min(r_star) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskReport {
    pub center_re: f64,
    pub center_im: f64,
    /// Upper bound of the radius, including the width of the center
    /// enclosure.
    pub radius: f64,
    pub contains_zero: bool,
}

impl DiskReport {
    fn from_disk(d: &Disk) -> Self {
        let c = d.center.mid();
        let spread = round::add_up(d.center.re.rad(), d.center.im.rad());
        DiskReport {
            center_re: c.re,
            center_im: c.im,
            radius: round::add_up(d.radius.hi(), spread),
            contains_zero: d.may_contain_zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub disks: Vec<Disk>,
    pub disjoint: bool,
    pub zero_disks: usize,
    /// Disjoint disks, exactly one possibly containing zero, all others off
    /// the imaginary axis.
    pub valid: bool,
}

/// Encloses the eigenvalues of `D_x f` over the box `(x_bar, lambda_bar) + [-r, r]`
/// in Gershgorin disks of `P^{-1} M P`, with `P` a float eigenvector matrix of
/// the midpoint.
pub fn spectrum_check(m: &ModelSpec, z_bar: &[f64], r: f64) -> Result<Spectrum, ProveError> {
    let mi = m.jacobian_x(&ball_box(z_bar, r))?;
    let (_, p) = linalg::eigen_decomposition(&mi.mid())
        .ok_or_else(|| ProveError::Spectrum("eigen decomposition failed".into()))?;
    let pinv = interval::enclose_inverse_complex(&p)
        .map_err(|e| ProveError::NotVerifiablyInvertible(format!("eigenvector matrix: {e}")))?;
    let l = pinv.mul(&mi.to_complex()).mul(&ComplexIntervalMatrix::from_point_complex(&p));
    let disks = gershgorin_disks(&l);
    let n = disks.len();
    let disjoint = (0..n).all(|i| (i + 1..n).all(|j| disks_disjoint(&disks[i], &disks[j])));
    let zero_disks = disks.iter().filter(|d| d.may_contain_zero()).count();
    let others_off_axis = disks.iter().filter(|d| !d.may_contain_zero()).all(|d| d.excludes_imaginary_axis());
    let valid = disjoint && zero_disks == 1 && others_off_axis;
    Ok(Spectrum { disks, disjoint, zero_disks, valid })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CEnclosure {
    pub mid: f64,
    pub rad: f64,
    pub lo: f64,
    pub hi: f64,
    /// `-1` or `+1`, absent when the enclosure contains zero.
    pub sign: Option<i8>,
    pub stability: Option<Stability>,
}

impl CEnclosure {
    pub fn from_interval(c: Interval) -> Self {
        let sign = if c.lo() > 0.0 {
            Some(1)
        } else if c.hi() < 0.0 {
            Some(-1)
        } else {
            None
        };
        CEnclosure {
            mid: c.mid(),
            rad: c.rad(),
            lo: c.lo(),
            hi: c.hi(),
            sign,
            // y' = c y^3: attracting for c < 0
            stability: sign.map(|s| if s < 0 { Stability::Stable } else { Stability::Unstable }),
        }
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }
}

/// Interval enclosure of `c` over the box `x_bar + [-r, r]^(4n+4)`.
pub fn normal_form_c(m: &ModelSpec, x_bar: &[f64], r: f64) -> Result<Interval, ProveError> {
    let u = CuspUnknowns::unpack(m.n, &ball_box(x_bar, r))?;
    Ok(normal_form_coefficient(m, &u)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Stage {
    Passed,
    Failed { reason: String },
    Skipped,
}

impl Stage {
    pub fn passed(&self) -> bool {
        matches!(self, Stage::Passed)
    }

    fn from<T>(r: &Result<T, ProveError>) -> Self {
        match r {
            Ok(_) => Stage::Passed,
            Err(e) => Stage::Failed { reason: e.to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stages {
    pub newton: Stage,
    pub nk: Stage,
    pub spectrum: Stage,
    pub normal_form: Stage,
}

/// The proof artifact. Valid exactly when every stage passed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspCertificate {
    pub model: String,
    pub n: usize,
    #[serde(rename = "X_bar")]
    pub x_bar: Vec<f64>,
    pub residual: f64,
    #[serde(flatten)]
    pub bounds: Option<NkBounds>,
    pub disks: Vec<DiskReport>,
    pub c: Option<CEnclosure>,
    pub stages: Stages,
    pub valid: bool,
}

impl CuspCertificate {
    pub fn unknowns(&self) -> CuspUnknowns<f64> {
        CuspUnknowns::unpack(self.n, &self.x_bar).expect("certificate has consistent length")
    }

    pub fn lambda(&self) -> [f64; 2] {
        self.unknowns().lambda
    }

    pub fn state(&self) -> Vec<f64> {
        self.unknowns().x
    }

    /// Certified enclosure of `lambda`.
    pub fn lambda_enclosure(&self) -> Option<[Interval; 2]> {
        let r = self.bounds.as_ref()?.r;
        let l = self.lambda();
        Some([Interval::ball(l[0], r), Interval::ball(l[1], r)])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ProveError> {
        let c: CuspCertificate = serde_json::from_str(s).map_err(|e| ProveError::Invalid(e.to_string()))?;
        if c.x_bar.len() != packed_len(c.n) || c.n == 0 {
            return Err(ProveError::Invalid(format!("X_bar has {} entries for n = {}", c.x_bar.len(), c.n)));
        }
        if c.x_bar.iter().any(|v| !v.is_finite()) {
            return Err(ProveError::Invalid("X_bar has non-finite entries".into()));
        }
        Ok(c)
    }
}

/// Runs the certification stages on a refined `x_bar`.
pub fn certify(m: &ModelSpec, x_bar: Vec<f64>, r_star: f64) -> Result<CuspCertificate, ProveError> {
    let residual = linalg::norm_inf(&cusp_f(m, &x_bar)?);
    let nk = nk_certify(m, &x_bar, r_star);
    let mut cert = CuspCertificate {
        model: m.id.clone(),
        n: m.n,
        x_bar,
        residual,
        bounds: nk.as_ref().ok().cloned(),
        disks: Vec::new(),
        c: None,
        stages: Stages { newton: Stage::Passed, nk: Stage::from(&nk), spectrum: Stage::Skipped, normal_form: Stage::Skipped },
        valid: false,
    };
    let Ok(bounds) = nk else { return Ok(cert) };
    let z_bar = cert.unknowns().z();
    let spectrum = spectrum_check(m, &z_bar, bounds.r).and_then(|s| {
        cert.disks = s.disks.iter().map(DiskReport::from_disk).collect();
        if !s.disjoint {
            Err(ProveError::DisksOverlap)
        } else if !s.valid {
            Err(ProveError::Spectrum(format!(
                "{} disks may contain zero, or a nonzero disk meets the imaginary axis",
                s.zero_disks
            )))
        } else {
            Ok(s)
        }
    });
    cert.stages.spectrum = Stage::from(&spectrum);
    let c = normal_form_c(m, &cert.x_bar, bounds.r).and_then(|c| {
        cert.c = Some(CEnclosure::from_interval(c));
        if c.contains_zero() {
            Err(ProveError::SignUndetermined(c))
        } else {
            Ok(c)
        }
    });
    cert.stages.normal_form = Stage::from(&c);
    cert.valid = spectrum.is_ok() && c.is_ok();
    Ok(cert)
}

/// Full proving procedure from a packed initial guess.
pub fn prove_from_unknowns(m: &ModelSpec, x0: &[f64], opts: &ProveOptions) -> Result<CuspCertificate, ProveError> {
    match newton_refine(m, x0, opts.newton_tol, opts.max_newton) {
        Ok(nr) => certify(m, nr.x, opts.r_star),
        Err(e) => Ok(CuspCertificate {
            model: m.id.clone(),
            n: m.n,
            x_bar: x0.to_vec(),
            residual: linalg::norm_inf(&cusp_f(m, x0)?),
            bounds: None,
            disks: Vec::new(),
            c: None,
            stages: Stages {
                newton: Stage::Failed { reason: e.to_string() },
                nk: Stage::Skipped,
                spectrum: Stage::Skipped,
                normal_form: Stage::Skipped,
            },
            valid: false,
        }),
    }
}

/// Full proving procedure from a point `(x, lambda)` near a cusp.
pub fn prove_cusp(m: &ModelSpec, seed: &[f64], opts: &ProveOptions) -> Result<CuspCertificate, ProveError> {
    if seed.len() != m.dim() {
        return Err(ProveError::Invalid(format!("seed needs {} coordinates, got {}", m.dim(), seed.len())));
    }
    let x0 = seed_unknowns(m, seed)?;
    prove_from_unknowns(m, &x0, opts)
}

/// Re-runs the certification stages from the stored `X_bar` and `r_star`
/// without Newton iteration; the stored bounds are not trusted.
pub fn verify(m: &ModelSpec, cert: &CuspCertificate) -> Result<CuspCertificate, ProveError> {
    if cert.model != m.id || cert.n != m.n {
        return Err(ProveError::Invalid(format!("certificate is for model `{}` (n = {})", cert.model, cert.n)));
    }
    let r_star = cert.bounds.as_ref().map(|b| b.r_star).unwrap_or(m.defaults.r_star);
    certify(m, cert.x_bar.clone(), r_star)
}

/// Two certificates describe the same cusp when their certified boxes meet.
pub fn same_cusp(a: &CuspCertificate, b: &CuspCertificate) -> bool {
    match (&a.bounds, &b.bounds) {
        (Some(ba), Some(bb)) => {
            let ua = a.unknowns().z();
            let ub = b.unknowns().z();
            ua.iter().zip(&ub).all(|(x, y)| (x - y).abs() <= ba.r + bb.r + 1e-9 * (1.0 + x.abs()))
        }
        _ => false,
    }
}
