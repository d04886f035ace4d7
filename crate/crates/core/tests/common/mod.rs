//! Randomized oracle suites shared by the test targets.
#![allow(dead_code)]
// reference values are quoted digit for digit
#![allow(clippy::excessive_precision)]

use cusp::interval::{
    enclose_inverse, gershgorin_disks, iv_arith, ArithOp, ComplexIntervalMatrix, Interval, IntervalMatrix,
};
use cusp::continuation::{tangent_plane, Triangulation};
use cusp::linalg;
use cusp::model::ModelSpec;
use cusp::prove::{cusp_df, cusp_f, packed_len, CuspCertificate};
use cusp::svd_path::{continue_svd, SvdOptions};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Float with random sign, mantissa and binary exponent in `[-e, e]`.
pub fn wide_float(r: &mut impl Rng, e: i32) -> f64 {
    let m: f64 = r.gen_range(1.0..2.0);
    let s = if r.gen_bool(0.5) { -1.0 } else { 1.0 };
    s * m * 2f64.powi(r.gen_range(-e..=e))
}

/// Exact `a op b` as an unevaluated sum `hi + lo` (or, for division, the
/// quotient and the sign of the remainder), compared with an interval.
fn exact_in(a: f64, b: f64, op: ArithOp, iv: &Interval) -> bool {
    // value = p + e with |e| at most half an ulp of p
    let (p, e) = match op {
        ArithOp::Add | ArithOp::Sub => {
            let b = if op == ArithOp::Sub { -b } else { b };
            let s = a + b;
            let bb = s - a;
            (s, (a - (s - bb)) + (b - bb))
        }
        ArithOp::Mul => {
            let p = a * b;
            (p, a.mul_add(b, -p))
        }
        ArithOp::Div => {
            let q = a / b;
            let rem = (-q).mul_add(b, a);
            (q, rem * b.signum())
        }
    };
    let above_lo = p > iv.lo() || (p == iv.lo() && e >= 0.0);
    let below_hi = p < iv.hi() || (p == iv.hi() && e <= 0.0);
    above_lo && below_hi
}

/// Random operand intervals and random points inside them; counts points
/// whose exact result escapes the interval result.
pub fn interval_containment_violations(samples: usize, seed: u64) -> usize {
    let mut r = rng(seed);
    let ops = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div];
    let mut bad = 0;
    for k in 0..samples {
        let op = ops[k % 4];
        let a = wide_float(&mut r, 40);
        let b = wide_float(&mut r, 40);
        // half the samples use point intervals, the rest random widths
        let (ia, ib, x, y) = if k % 8 < 4 {
            (Interval::point(a), Interval::point(b), a, b)
        } else {
            let wa = a.abs() * r.gen_range(0.0..1e-3);
            let wb = b.abs() * r.gen_range(0.0..1e-3);
            let ia = Interval::new(a - wa, a + wa);
            let ib = Interval::new(b - wb, b + wb);
            let x = match r.gen_range(0..3) {
                0 => ia.lo(),
                1 => ia.hi(),
                _ => r.gen_range(ia.lo()..=ia.hi()),
            };
            let y = match r.gen_range(0..3) {
                0 => ib.lo(),
                1 => ib.hi(),
                _ => r.gen_range(ib.lo()..=ib.hi()),
            };
            (ia, ib, x, y)
        };
        match iv_arith(ia, ib, op) {
            Ok(res) => {
                if !exact_in(x, y, op, &res) {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
    }
    bad
}

/// Random real matrices: every eigenvalue from a dense
/// eigensolve lies in the union of the Gershgorin disks. The oracle's own
/// error is covered by a slack of `1e-12 |A|`.
pub fn gershgorin_violations(cases: usize, seed: u64) -> usize {
    let mut r = rng(seed);
    let mut bad = 0;
    for k in 0..cases {
        let n = 2 + k % 5;
        let a = DMatrix::from_fn(n, n, |i, j| {
            let v: f64 = r.gen_range(-1.0..1.0);
            if i == j {
                v * 4.0
            } else {
                v
            }
        });
        let Some((eig, _)) = linalg::eigen_decomposition(&a) else {
            bad += 1;
            continue;
        };
        let disks = gershgorin_disks(&IntervalMatrix::from_point(&a).to_complex());
        let slack = 1e-12 * a.abs().max().max(1.0);
        for l in eig {
            let inside = disks.iter().any(|d| (l - d.center.mid()).norm() <= d.radius.hi() + slack);
            if !inside {
                bad += 1;
            }
        }
    }
    bad
}

/// Random well-conditioned matrices `P` (diagonally dominant, sizes 2..6):
/// the identity lies in `enclose_inverse(P) * P` entrywise.
pub fn inverse_violations(cases: usize, seed: u64) -> usize {
    let mut r = rng(seed);
    let mut bad = 0;
    for k in 0..cases {
        let n = 2 + k % 5;
        let p = DMatrix::from_fn(n, n, |i, j| {
            let v: f64 = r.gen_range(-1.0..1.0);
            if i == j {
                v.signum() * (n as f64 + v.abs())
            } else {
                v
            }
        });
        match enclose_inverse(&p) {
            Ok(inv) => {
                let prod = inv.mul(&IntervalMatrix::from_point(&p));
                if !prod.contains(&DMatrix::identity(n, n)) {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
    }
    bad
}

/// Containment of `P^{-1} A P`'s eigenvalues by the disks of the complex
/// pseudo-diagonalization used by the spectrum check.
pub fn pseudo_diagonal_violations(cases: usize, seed: u64) -> usize {
    let mut r = rng(seed);
    let mut bad = 0;
    for k in 0..cases {
        let n = 2 + k % 4;
        let a = DMatrix::from_fn(n, n, |_, _| r.gen_range(-2.0..2.0));
        let Some((eig, p)) = linalg::eigen_decomposition(&a) else { continue };
        let Ok(pinv) = cusp::interval::enclose_inverse_complex(&p) else { continue };
        let l = pinv.mul(&IntervalMatrix::from_point(&a).to_complex()).mul(&ComplexIntervalMatrix::from_point_complex(&p));
        let disks = gershgorin_disks(&l);
        let slack = 1e-10 * a.abs().max().max(1.0);
        for lam in eig {
            if !disks.iter().any(|d| (lam - d.center.mid()).norm() <= d.radius.hi() + d.center.re.rad() + d.center.im.rad() + slack) {
                bad += 1;
            }
        }
    }
    bad
}

/// Random point in the model's region; `lambda_floor` raises the lower
/// parameter bounds (predator-prey denominators stay >= 1 for lambda >= 0).
pub fn random_point(m: &ModelSpec, r: &mut impl Rng, lambda_floor: Option<f64>) -> Vec<f64> {
    (0..m.dim())
        .map(|i| {
            let mut lo = m.region.lo[i];
            if i >= m.n {
                if let Some(f) = lambda_floor {
                    lo = lo.max(f);
                }
            }
            r.gen_range(lo..m.region.hi[i])
        })
        .collect()
}

pub fn random_unit(r: &mut impl Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let s = linalg::norm(&v);
    v.iter().map(|x| x / s).collect()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(1.0f64, |s, v| s.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

fn central<F: Fn(&[f64]) -> Vec<f64>>(f: F, z: &[f64], d: &[f64], h: f64) -> Vec<f64> {
    let zp: Vec<f64> = z.iter().zip(d).map(|(a, b)| a + h * b).collect();
    let zm: Vec<f64> = z.iter().zip(d).map(|(a, b)| a - h * b).collect();
    f(&zp).iter().zip(f(&zm)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

pub const FD_H: f64 = 1e-5;

/// Largest relative error of the jet derivatives of `m` against central
/// differences over `points` random points: full Jacobian columns,
/// `D_xx f(u, v)` against differences of `D_x f v`, and `D_xxx f(u, v, w)`
/// against differences of `D_xx f(u, v)`.
pub fn model_fd_error(m: &ModelSpec, points: usize, seed: u64) -> f64 {
    let floor = (m.id == "predator-prey").then_some(0.0);
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    let n = m.n;
    for _ in 0..points {
        let z = random_point(m, &mut r, floor);
        let j = m.jacobian(&z).unwrap();
        for c in 0..m.dim() {
            let mut e = vec![0.0; m.dim()];
            e[c] = 1.0;
            let fd = central(|p| m.eval(p).unwrap(), &z, &e, FD_H);
            let col: Vec<f64> = (0..n).map(|i| j[(i, c)]).collect();
            worst = worst.max(rel_err(&col, &fd));
        }
        let (u, v, w) = (random_unit(&mut r, n), random_unit(&mut r, n), random_unit(&mut r, n));
        let lift = |d: &[f64]| {
            let mut full = d.to_vec();
            full.extend([0.0, 0.0]);
            full
        };
        let b = m.bilinear(&z, &u, &v).unwrap();
        let fd_b = central(
            |p| {
                let jx = m.jacobian_x(p).unwrap();
                (0..n).map(|i| (0..n).map(|k| jx[(i, k)] * v[k]).sum()).collect()
            },
            &z,
            &lift(&u),
            FD_H,
        );
        worst = worst.max(rel_err(&b, &fd_b));
        let t = m.trilinear(&z, &u, &v, &w).unwrap();
        let fd_t = central(|p| m.bilinear(p, &u, &v).unwrap(), &z, &lift(&w), FD_H);
        worst = worst.max(rel_err(&t, &fd_t));
    }
    worst
}

/// Largest relative error of `DF` of the cusp map against central
/// differences at random `X` whose `(x, lambda)` part lies in the region.
pub fn cusp_map_fd_error(m: &ModelSpec, points: usize, seed: u64) -> f64 {
    let floor = (m.id == "predator-prey").then_some(0.0);
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    let n = m.n;
    let p = packed_len(n);
    for _ in 0..points {
        let z = random_point(m, &mut r, floor);
        let mut x = vec![0.0; p];
        x[..n].copy_from_slice(&z[..n]);
        for v in x.iter_mut().skip(n).take(2 * n) {
            *v = r.gen_range(-1.0..1.0);
        }
        x[3 * n] = z[n];
        x[3 * n + 1] = z[n + 1];
        for v in x.iter_mut().skip(3 * n + 2) {
            *v = r.gen_range(-1.0..1.0);
        }
        let df = cusp_df(m, &x).unwrap();
        for c in 0..p {
            let mut e = vec![0.0; p];
            e[c] = 1.0;
            let fd = central(|q| cusp_f(m, q).unwrap(), &x, &e, FD_H);
            let col: Vec<f64> = (0..p).map(|i| df[(i, c)]).collect();
            worst = worst.max(rel_err(&col, &fd));
        }
    }
    worst
}

/// Worst reconstruction and orthogonality defects, and the number of
/// failed or improperly closed paths, over random closed paths
/// `J(t) = A0 + A1 cos 2 pi t + A2 sin 2 pi t`.
pub struct SvdSuite {
    pub reconstruction: f64,
    pub orthogonality: f64,
    /// Worst mismatch between the sorted `|sigma|` and a fresh standard SVD.
    pub abs_agreement: f64,
    pub bad_closure: usize,
    pub failures: usize,
}

pub fn svd_random_paths(paths: usize, seed: u64) -> SvdSuite {
    let mut r = rng(seed);
    let mut s = SvdSuite { reconstruction: 0.0, orthogonality: 0.0, abs_agreement: 0.0, bad_closure: 0, failures: 0 };
    use std::f64::consts::TAU;
    for k in 0..paths {
        let n = 2 + k % 3;
        let a: Vec<DMatrix<f64>> = (0..3).map(|_| DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0))).collect();
        let j = |t: f64| &a[0] + &a[1] * (TAU * t).cos() + &a[2] * (TAU * t).sin();
        let path = match continue_svd(|t| Ok::<_, String>(j(t)), &SvdOptions::default()) {
            Ok(p) => p,
            Err(_) => {
                s.failures += 1;
                continue;
            }
        };
        for f in &path.frames {
            let jt = j(f.t);
            let scale = jt.norm().max(1.0);
            let mut abs: Vec<f64> = f.sigma.iter().map(|x| x.abs()).collect();
            abs.sort_by(|a, b| b.total_cmp(a));
            let fresh = linalg::svd_sorted(&jt).expect("svd");
            for (a, b) in abs.iter().zip(&fresh.sigma) {
                s.abs_agreement = s.abs_agreement.max((a - b).abs());
            }
            s.reconstruction = s.reconstruction.max((f.reconstruct() - &jt).abs().max() / scale);
            let id = DMatrix::<f64>::identity(n, n);
            s.orthogonality = s
                .orthogonality
                .max((f.w.transpose() * &f.w - &id).abs().max())
                .max((f.v.transpose() * &f.v - &id).abs().max());
        }
        // closed path: the end frame is the start frame up to one sign for
        // w_i and one for v_i, with sigma_i multiplied by their product
        let (f0, f1) = (path.first(), path.last());
        let dw = path.monodromy();
        let ok = (0..n).all(|i| {
            let dv = f0.v.column(i).dot(&f1.v.column(i)).signum();
            let ew = (f1.w.column(i) - f0.w.column(i) * dw[i]).abs().max();
            let ev = (f1.v.column(i) - f0.v.column(i) * dv).abs().max();
            let es = (f1.sigma[i] - dw[i] * dv * f0.sigma[i]).abs();
            ew < 1e-8 && ev < 1e-8 && es < 1e-8 * f0.sigma[0].abs().max(1.0)
        });
        if !ok {
            s.bad_closure += 1;
        }
    }
    s
}

/// Monodromy signs of the signed SVD of `[[1 + s1, s2], [s2, 1 - s1]]`
/// along the circle of radius `rho` around the coalescence at `s = 0`.
pub fn coalescence_loop(rho: f64, max_step: f64) -> Vec<f64> {
    use std::f64::consts::TAU;
    let path = continue_svd(
        |t| {
            let (s1, s2) = (rho * (TAU * t).cos(), rho * (TAU * t).sin());
            Ok::<_, String>(DMatrix::from_row_slice(2, 2, &[1.0 + s1, s2, s2, 1.0 - s1]))
        },
        &SvdOptions { max_step, ..SvdOptions::default() },
    )
    .expect("loop path");
    path.monodromy()
}

/// A reference cusp: coarse seed `(x, lambda)`, reference values, and the
/// expected stability (`-1` stable, `+1` unstable).
pub struct RefCusp {
    pub model: &'static str,
    pub seed: &'static [f64],
    pub x: &'static [f64],
    pub lambda: [f64; 2],
    pub c: f64,
    pub sign: i8,
    pub lambda_tol: f64,
    pub c_rad_max: f64,
}

pub const REF_CUSPS: [RefCusp; 5] = [
    RefCusp {
        model: "bazykin",
        seed: &[25.8, 2.44, 0.0888, 2.8],
        x: &[25.823060900508402, 2.442085531687371],
        lambda: [0.088767308061008, 2.802361210268358],
        c: -1.948784809507697e-4,
        sign: -1,
        lambda_tol: 1e-10,
        c_rad_max: 1e-10,
    },
    RefCusp {
        model: "bazykin",
        seed: &[32.6, 20.5, 0.9012, 0.00357],
        x: &[32.593605766158269, 20.474303357201517],
        lambda: [0.901232691938992, 0.003568419361272],
        c: 7.590018095668060e-5,
        sign: 1,
        lambda_tol: 1e-10,
        c_rad_max: 1e-10,
    },
    RefCusp {
        model: "predator-prey",
        seed: &[13.2, 6.53, -0.0042, 0.55],
        x: &[13.196245980692725, 6.533219395017792],
        lambda: [-0.004206696164016, 0.550079382002905],
        c: -0.005350994279567,
        sign: -1,
        lambda_tol: 1e-9,
        c_rad_max: 1e-8,
    },
    RefCusp {
        model: "bykov",
        seed: &[0.036, 0.352, 0.451, 1.0064, 0.356],
        x: &[0.035940636548892, 0.352005430946603, 0.451370111738407],
        lambda: [1.006408329678319, 0.355991273208678],
        c: 0.362788656889452,
        sign: 1,
        lambda_tol: 1e-9,
        c_rad_max: 1e-8,
    },
    RefCusp {
        model: "metastatic",
        seed: &[0.932, 2.218, 0.0435, 1.028, 0.1344],
        x: &[0.932145719912463, 2.218402699305749, 0.043501045476190],
        lambda: [1.028071456932951, 0.134352688793418],
        c: -0.062132151368075,
        sign: -1,
        lambda_tol: 1e-9,
        c_rad_max: 1e-8,
    },
];

/// Problems with a certificate against a reference cusp; empty when it
/// matches.
pub fn ref_cusp_mismatches(r: &RefCusp, cert: &CuspCertificate) -> Vec<String> {
    let mut bad = Vec::new();
    if !cert.valid {
        bad.push(format!("certificate invalid: {:?}", cert.stages));
        return bad;
    }
    let rad = cert.bounds.as_ref().expect("valid has bounds").r;
    for (k, (got, want)) in cert.lambda().iter().zip(r.lambda).enumerate() {
        // distance from the certified enclosure to the reference value
        let gap = ((got - want).abs() - rad).max(0.0);
        if gap > r.lambda_tol {
            bad.push(format!("lambda_{} = {got} vs {want}", k + 1));
        }
    }
    for (got, want) in cert.state().iter().zip(r.x) {
        if (got - want).abs() > 1e-9 * (1.0 + want.abs()) {
            bad.push(format!("x = {got} vs {want}"));
        }
    }
    let c = cert.c.as_ref().expect("valid has c");
    if !c.interval().contains(r.c) {
        bad.push(format!("c in [{:e}, {:e}] misses {:e}", c.lo, c.hi, r.c));
    }
    if c.rad > r.c_rad_max {
        bad.push(format!("c radius {:e} > {:e}", c.rad, r.c_rad_max));
    }
    if c.sign != Some(r.sign) {
        bad.push(format!("c sign {:?}, expected {}", c.sign, r.sign));
    }
    bad
}

/// A fold of Bazykin's model away from both cusps: Newton on
/// `f = 0, D_x f v = 0, |v|^2 = 1` for `(x, v, lambda_1)` with `lambda_2`
/// fixed, starting from the first cusp with `lambda_2` shifted by `dl2`.
/// Returns `(x, lambda)`.
pub fn bazykin_fold(dl2: f64) -> Vec<f64> {
    let m = ModelSpec::by_name("bazykin").unwrap();
    let start = [25.823060900508402, 2.442085531687371, 0.088767308061008, 2.802361210268358];
    let l2 = start[3] + dl2;
    let j0 = m.jacobian_x(&start[..]).unwrap().to_dmatrix();
    let v0 = linalg::svd_sorted(&j0).unwrap().v.column(1).clone_owned();
    // unknowns (x1, x2, v1, v2, lambda_1)
    let resid = |u: &[f64]| -> Vec<f64> {
        let z = [u[0], u[1], u[4], l2];
        let f = m.eval(&z[..]).unwrap();
        let j = m.jacobian_x(&z[..]).unwrap().to_dmatrix();
        let jv = &j * nalgebra::DVector::from_column_slice(&u[2..4]);
        vec![f[0], f[1], jv[0], jv[1], u[2] * u[2] + u[3] * u[3] - 1.0]
    };
    let mut u = vec![start[0], start[1], v0[0], v0[1], start[2]];
    for _ in 0..100 {
        let r = resid(&u);
        if linalg::norm_inf(&r) < 1e-13 {
            break;
        }
        let jac = DMatrix::from_fn(5, 5, |i, k| {
            let h = 1e-7 * (1.0 + u[k].abs());
            let mut up = u.clone();
            let mut dn = u.clone();
            up[k] += h;
            dn[k] -= h;
            (resid(&up)[i] - resid(&dn)[i]) / (2.0 * h)
        });
        let step = linalg::solve(&jac, &-nalgebra::DVector::from_vec(r)).expect("fold Newton step");
        // damped: the system is singular at the cusp itself
        let scale = (1.0 / step.amax()).min(1.0);
        u.iter_mut().zip(step.iter()).for_each(|(a, d)| *a += scale * d);
    }
    assert!(linalg::norm_inf(&resid(&u)) < 1e-11, "fold Newton failed");
    vec![u[0], u[1], u[4], l2]
}

/// Violated mesh invariants, at most one message per kind: node residuals
/// within `tol`, symmetric adjacency, at most two triangles per edge,
/// counter-clockwise corners in each corner's tangent plane, closed fans
/// summing to `2 pi`, and with `open_at_boundary`, open edges only between
/// boundary-flagged nodes.
pub fn mesh_defects(m: &ModelSpec, t: &Triangulation, tol: f64, open_at_boundary: bool) -> Vec<String> {
    let mut bad = Vec::new();
    let mut note = |cond: bool, msg: String| {
        if !cond && !bad.iter().any(|b: &String| b.split(':').next() == msg.split(':').next()) {
            bad.push(msg);
        }
    };
    for node in &t.nodes {
        let r = linalg::norm_inf(&m.eval(&node.z()).unwrap());
        note(r <= tol && node.residual <= tol, format!("residual: node {} has {r:e}", node.id));
    }
    for s in &t.simplices {
        note(s.neighbors.len() <= 3, format!("adjacency: simplex {} has {} neighbors", s.id, s.neighbors.len()));
        for &k in &s.neighbors {
            note(t.simplices[k].neighbors.contains(&s.id), format!("adjacency: {} -> {k} not symmetric", s.id));
        }
    }
    for (&(a, b), tris) in &t.edges() {
        note(tris.len() <= 2, format!("edges: ({a}, {b}) in {} triangles", tris.len()));
        if open_at_boundary && tris.len() == 1 {
            note(
                t.nodes[a].boundary && t.nodes[b].boundary,
                format!("patch: open edge ({a}, {b}) between non-boundary nodes"),
            );
        }
    }
    for s in &t.simplices {
        for (i, &k) in s.nodes.iter().enumerate() {
            let zk = t.nodes[k].z();
            let [t1, t2] = tangent_plane(m, &zk).unwrap();
            let uv = |j: usize| {
                let d = linalg::sub(&t.nodes[j].z(), &zk);
                (linalg::dot(&d, &t1), linalg::dot(&d, &t2))
            };
            let (a, b) = (uv(s.nodes[(i + 1) % 3]), uv(s.nodes[(i + 2) % 3]));
            note(a.0 * b.1 - a.1 * b.0 > 0.0, format!("orientation: simplex {} clockwise at node {k}", s.id));
        }
    }
    for (k, sum) in t.closed_fan_angle_sums(m).unwrap() {
        note((sum - std::f64::consts::TAU).abs() < 1e-9, format!("fans: angles around node {k} sum to {sum}"));
    }
    bad
}
