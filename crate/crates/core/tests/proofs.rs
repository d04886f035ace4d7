//! Cusp map, Newton refinement, Newton-Kantorovich certification, spectrum
//! check and normal-form coefficient.

mod common;

use common::{bazykin_fold, ref_cusp_mismatches, REF_CUSPS};
use cusp::interval::Interval;
use rand::Rng;
use cusp::linalg;
use cusp::model::ModelSpec;
use cusp::prove::{
    certify, cusp_df, cusp_f, newton_refine, nk_certify, normal_form_c, packed_len, prove_cusp, residual_enclosure,
    same_cusp, seed_unknowns, spectrum_check, verify, CuspCertificate, CuspUnknowns, ProveError, ProveOptions,
};

fn scalar() -> ModelSpec {
    ModelSpec::by_name("scalar-oracle").unwrap()
}

fn scalar_cusp() -> Vec<f64> {
    CuspUnknowns { x: vec![0.0], v: vec![1.0], w: vec![1.0], lambda: [0.0, 0.0], h: vec![0.0], s: [0.0, 0.0] }.pack()
}

fn prove_ref(k: usize) -> (ModelSpec, CuspCertificate) {
    let r = &REF_CUSPS[k];
    let m = ModelSpec::by_name(r.model).unwrap();
    let cert = prove_cusp(&m, r.seed, &ProveOptions::for_model(&m)).unwrap();
    (m, cert)
}

#[test]
fn packing_order_and_length() {
    let u = CuspUnknowns {
        x: vec![1.0, 2.0],
        v: vec![3.0, 4.0],
        w: vec![5.0, 6.0],
        lambda: [7.0, 8.0],
        h: vec![9.0, 10.0],
        s: [11.0, 12.0],
    };
    let p = u.pack();
    assert_eq!(p, (1..=12).map(f64::from).collect::<Vec<_>>());
    assert_eq!(CuspUnknowns::unpack(2, &p).unwrap(), u);
    assert!(CuspUnknowns::unpack(2, &p[..11]).is_err());
    for m in cusp::model::builtin_models() {
        assert_eq!(packed_len(m.n), 4 * m.n + 4);
        let x = seed_unknowns(&m, &m.seed.as_ref().unwrap().to_z()).unwrap();
        assert_eq!(cusp_f(&m, &x).unwrap().len(), 4 * m.n + 4, "{}", m.id);
    }
}

#[test]
fn scalar_cusp_map_vanishes_and_df_is_well_conditioned() {
    let m = scalar();
    let x = scalar_cusp();
    assert_eq!(cusp_f(&m, &x).unwrap(), vec![0.0; 8]);
    let df = cusp_df(&m, &x).unwrap().to_dmatrix();
    assert_eq!(df.shape(), (8, 8));
    let s = linalg::svd_sorted(&df).unwrap().sigma;
    let cond = s[0] / s[7];
    assert!(cond < 1e5, "condition {cond:e}");
}

#[test]
fn interval_cusp_map_contains_float_values() {
    let m = ModelSpec::by_name("bazykin").unwrap();
    let mut r = common::rng(41);
    let base = seed_unknowns(&m, REF_CUSPS[0].seed).unwrap();
    for _ in 0..50 {
        let x: Vec<f64> = base.iter().map(|v| v + 1e-3 * r.gen_range(-1.0..1.0)).collect();
        let xi: Vec<Interval> = x.iter().map(|&v| Interval::point(v)).collect();
        let f = cusp_f(&m, &x).unwrap();
        let fi = cusp_f(&m, &xi).unwrap();
        assert!(f.iter().zip(&fi).all(|(a, b)| b.contains(*a)));
        let df = cusp_df(&m, &x).unwrap().to_dmatrix();
        let dfi = cusp_df(&m, &xi).unwrap();
        for i in 0..df.nrows() {
            for j in 0..df.ncols() {
                assert!(dfi[(i, j)].contains(df[(i, j)]));
            }
        }
    }
    // degenerate point: the scalar cusp itself
    let s = scalar();
    let xi: Vec<Interval> = scalar_cusp().iter().map(|&v| Interval::point(v)).collect();
    assert!(cusp_f(&s, &xi).unwrap().iter().all(|b| b.contains(0.0)));
}

#[test]
fn scalar_newton_converges_to_the_origin() {
    let m = scalar();
    let x0 = seed_unknowns(&m, &[0.1, 0.01, 0.02]).unwrap();
    let nr = newton_refine(&m, &x0, 1e-13, 60).unwrap();
    assert!(nr.residual() <= 1e-13);
    let u = CuspUnknowns::unpack(1, &nr.x).unwrap();
    assert!(u.x[0].abs() < 1e-10 && u.lambda[0].abs() < 1e-10 && u.lambda[1].abs() < 1e-10, "{u:?}");
    assert!((u.v[0].abs() - 1.0).abs() < 1e-12 && (u.w[0] * u.v[0] - 1.0).abs() < 1e-12);
}

#[test]
fn newton_tail_is_quadratic() {
    let m = ModelSpec::by_name("bazykin").unwrap();
    let x0 = seed_unknowns(&m, REF_CUSPS[0].seed).unwrap();
    let nr = newton_refine(&m, &x0, 1e-13, 60).unwrap();
    let res = &nr.residuals;
    assert!(nr.residual() <= 1e-12, "{res:?}");
    // some step from above 1e-6 lands below C r^2 (up to rounding)
    let quadratic = res.windows(2).any(|p| p[0] > 1e-6 && p[0] < 1e-2 && p[1] <= 100.0 * p[0] * p[0] + 1e-12);
    assert!(quadratic, "{res:?}");
    let f = cusp_f(&m, &nr.x).unwrap();
    assert!(linalg::norm_inf(&f) <= 1e-12);
}

#[test]
fn scalar_certificate() {
    let m = scalar();
    let cert = prove_cusp(&m, &[0.1, 0.01, 0.02], &ProveOptions::for_model(&m)).unwrap();
    assert!(cert.valid, "{:?}", cert.stages);
    let b = cert.bounds.as_ref().unwrap();
    assert!(b.r < 1e-10 && b.r > b.r0 - 1e-300 && b.r <= b.r_star);
    let [l1, l2] = cert.lambda_enclosure().unwrap();
    assert!(l1.contains(0.0) && l2.contains(0.0));
    let c = cert.c.as_ref().unwrap();
    assert!(c.interval().contains(-1.0) && c.rad < 1e-12, "{c:?}");
    assert_eq!(cert.disks.len(), 1);
    assert!(cert.disks[0].contains_zero);
    // c from the exact point is an enclosure of exactly -1
    let c0 = normal_form_c(&m, &scalar_cusp(), 0.0).unwrap();
    assert!(c0.contains(-1.0) && c0.rad() < 1e-15);
    // spectrum of the 1x1 kernel block is vacuously valid
    let sp = spectrum_check(&m, &[0.0, 0.0, 0.0], b.r).unwrap();
    assert!(sp.valid && sp.zero_disks == 1 && sp.disks.len() == 1);
}

#[test]
fn reference_cusps_are_reproduced() {
    for (k, r) in REF_CUSPS.iter().enumerate() {
        let (_, cert) = prove_ref(k);
        let bad = ref_cusp_mismatches(r, &cert);
        assert!(bad.is_empty(), "{} #{k}: {bad:?}", r.model);
        let b = cert.bounds.as_ref().unwrap();
        assert!(b.r <= b.r_star && b.r >= b.r0, "{b:?}");
    }
}

#[test]
fn reference_radii() {
    // Bazykin with r_star = 1e-12: r <= 8e-14 and 4e-14
    for (k, rmax) in [(0, 8e-14), (1, 4e-14)] {
        let (m, cert) = prove_ref(k);
        assert_eq!(m.defaults.r_star, 1e-12);
        let b = cert.bounds.unwrap();
        assert!(b.r <= rmax, "cusp {k}: r = {:e}", b.r);
    }
    // Bykov with r_star = 1e-10: r <= 3.7e-13
    let (m, cert) = prove_ref(3);
    assert_eq!(m.defaults.r_star, 1e-10);
    assert!(cert.bounds.unwrap().r <= 3.7e-13);
    // predator-prey with r_star = 5e-12: r <= 1.42e-12; metastatic 3.1e-13
    assert!(prove_ref(2).1.bounds.unwrap().r <= 1.42e-12);
    assert!(prove_ref(4).1.bounds.unwrap().r <= 3.1e-13);
}

#[test]
fn spectrum_disks() {
    // Bazykin cusp 1: one disk at zero, one on the left
    let (m, cert) = prove_ref(0);
    let r = cert.bounds.as_ref().unwrap().r;
    let sp = spectrum_check(&m, &cert.unknowns().z(), r).unwrap();
    assert!(sp.valid && sp.disjoint && sp.zero_disks == 1);
    let other: Vec<_> = sp.disks.iter().filter(|d| !d.may_contain_zero()).collect();
    assert_eq!(other.len(), 1);
    assert!(other[0].excludes_imaginary_axis() && other[0].center.re.hi() < 0.0);
    // the float eigenvalues are inside the disks
    let j = m.jacobian_x(&cert.unknowns().z()).unwrap().to_dmatrix();
    let tr = j.trace();
    assert!(other[0].center.re.inflate(other[0].radius.hi()).contains(tr), "trace {tr}");

    // Bykov: one zero disk, two off the imaginary axis
    let (m, cert) = prove_ref(3);
    let sp = spectrum_check(&m, &cert.unknowns().z(), cert.bounds.as_ref().unwrap().r).unwrap();
    assert_eq!(sp.disks.len(), 3);
    assert!(sp.valid && sp.zero_disks == 1);
    assert_eq!(sp.disks.iter().filter(|d| d.excludes_imaginary_axis()).count(), 2);
    assert_eq!(cert.disks.len(), 3);
    assert_eq!(cert.disks.iter().filter(|d| d.contains_zero).count(), 1);
}

#[test]
fn perturbed_point_fails_certification() {
    let (m, cert) = prove_ref(0);
    let far: Vec<f64> = cert.x_bar.iter().map(|v| v + 1e-2).collect();
    assert!(matches!(nk_certify(&m, &far, 1e-12), Err(ProveError::CertificationFailed { .. })));
    let c = certify(&m, far, 1e-12).unwrap();
    assert!(!c.valid && !c.stages.nk.passed());
    assert!(matches!(nk_certify(&m, &cert.x_bar[..5], 1e-12), Err(ProveError::Invalid(_))));
}

#[test]
fn y_independent_of_r_star_and_z_monotone() {
    let (m, cert) = prove_ref(0);
    let radii = [1e-13, 1e-12, 1e-11, 1e-10];
    let bounds: Vec<_> = radii.iter().map(|&r| nk_certify(&m, &cert.x_bar, r).unwrap()).collect();
    for (b, &r) in bounds.iter().zip(&radii) {
        assert_eq!(b.r_star, r, "no retry expected");
        assert_eq!(b.y, bounds[0].y);
    }
    assert!(bounds.windows(2).all(|p| p[0].z <= p[1].z), "{bounds:?}");
}

#[test]
fn certified_box_contains_the_zero() {
    for k in 0..REF_CUSPS.len() {
        let (m, cert) = prove_ref(k);
        let r = cert.bounds.as_ref().unwrap().r;
        let boxed: Vec<Interval> = cert.x_bar.iter().map(|&v| Interval::ball(v, r)).collect();
        let f = cusp_f(&m, &boxed).unwrap();
        assert!(f.iter().all(|b| b.contains_zero()), "{}: {f:?}", m.id);
        // s_1 and s_2 vanish at the zero
        let u = CuspUnknowns::unpack(m.n, &boxed).unwrap();
        for s in u.s {
            assert!(s.contains_zero() && s.width() <= 2.0 * r * (1.0 + 1e-12), "{s:?}");
        }
        // residual at X_bar is tiny and rigorously enclosed
        let res = residual_enclosure(&m, &cert.x_bar).unwrap();
        let f0 = cusp_f(&m, &cert.x_bar).unwrap();
        assert!(res.iter().all(|b| b.mag() < 1e-11));
        assert!(res.iter().zip(&f0).all(|(b, v)| (b.mid() - v).abs() < 1e-11));
    }
}

#[test]
fn certificate_json_and_verify() {
    let (m, cert) = prove_ref(1);
    let json = cert.to_json();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["model", "X_bar", "Y", "Z", "r0", "r_star", "r", "disks", "c", "stages", "valid"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["center_re", "center_im", "radius", "contains_zero"] {
        assert!(v["disks"][0].get(key).is_some(), "missing disks.{key}");
    }
    for key in ["mid", "rad", "sign", "stability"] {
        assert!(v["c"].get(key).is_some(), "missing c.{key}");
    }
    assert_eq!(v["c"]["stability"], "unstable");
    let back = CuspCertificate::from_json(&json).unwrap();
    assert_eq!(back, cert);
    assert_eq!(back.to_json(), json);

    let again = verify(&m, &back).unwrap();
    assert!(again.valid);
    assert_eq!(again, cert);

    // tampering with X_bar invalidates the certificate
    let mut bad = back.clone();
    bad.x_bar[m.n * 3] += 1e-6;
    assert!(!verify(&m, &bad).unwrap().valid);
    // stored bounds are recomputed, not trusted
    let mut forged = back.clone();
    forged.x_bar[0] += 1.0;
    forged.valid = true;
    assert!(!verify(&m, &forged).unwrap().valid);
    // wrong model, wrong length
    let other = ModelSpec::by_name("bykov").unwrap();
    assert!(matches!(verify(&other, &back), Err(ProveError::Invalid(_))));
    let mut short = v.clone();
    short["X_bar"].as_array_mut().unwrap().pop();
    assert!(CuspCertificate::from_json(&short.to_string()).is_err());
    assert!(CuspCertificate::from_json("{}").is_err());
}

#[test]
fn same_cusp_from_different_seeds() {
    let m = ModelSpec::by_name("bazykin").unwrap();
    let o = ProveOptions::for_model(&m);
    let a = prove_cusp(&m, REF_CUSPS[1].seed, &o).unwrap();
    let b = prove_cusp(&m, &[32.5, 20.4, 0.9, 0.0036], &o).unwrap();
    let c = prove_cusp(&m, REF_CUSPS[0].seed, &o).unwrap();
    assert!(a.valid && b.valid && c.valid);
    assert!(same_cusp(&a, &b));
    assert!(!same_cusp(&a, &c));
}

fn assert_plain_fold(m: &ModelSpec, z: &[f64]) {
    assert!(m.region.contains(z, 0.0), "{z:?}");
    // singular D_x f with w^T D_xx f(v, v) far from 0
    let j = m.jacobian_x(z).unwrap().to_dmatrix();
    let svd = linalg::svd_sorted(&j).unwrap();
    assert!(svd.sigma[1] < 1e-10 * svd.sigma[0], "{:?}", svd.sigma);
    let v: Vec<f64> = svd.v.column(1).iter().copied().collect();
    let w: Vec<f64> = svd.u.column(1).iter().copied().collect();
    let g2 = linalg::dot(&w, &m.bilinear(z, &v, &v).unwrap());
    assert!(g2.abs() > 1e-4, "g2 = {g2:e}");
}

#[test]
fn distant_fold_is_not_certified() {
    let m = ModelSpec::by_name("bazykin").unwrap();
    for dl2 in [-1.0, -1.5, -2.0] {
        let z = bazykin_fold(dl2);
        assert_plain_fold(&m, &z);
        let cert = prove_cusp(&m, &z, &ProveOptions::for_model(&m)).unwrap();
        assert!(!cert.valid, "fold at {z:?} certified as a cusp");
    }
}

#[test]
fn nearby_fold_only_certifies_the_true_cusp() {
    // close to a cusp, Newton may be attracted to it; the certificate must
    // then describe that cusp, not the fold
    let m = ModelSpec::by_name("bazykin").unwrap();
    for dl2 in [-0.2, -0.5] {
        let z = bazykin_fold(dl2);
        assert_plain_fold(&m, &z);
        let cert = prove_cusp(&m, &z, &ProveOptions::for_model(&m)).unwrap();
        if cert.valid {
            let l = cert.lambda();
            assert!((l[1] - z[3]).abs() > 0.1, "certified at the fold {z:?}");
            assert!(REF_CUSPS[..2].iter().any(|r| ref_cusp_mismatches(r, &cert).is_empty()), "{l:?}");
        }
    }
}
