//! Parameter-dependent vector fields `f(x, lambda)` with `x` in R^n and
//! `lambda` in R^2, and exact derivative actions up to third order.
//!
//! Every right-hand side is written once over [`Scalar`]; derivatives come
//! from evaluating it on forward-mode jets, so the same code yields float
//! values, interval enclosures and exact multilinear actions.

mod builtin;
pub mod user;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Matrix;
use crate::jet::{mask, Dual, Hyper};
use crate::scalar::Scalar;
use user::{UserModel, UserModelFile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("unknown model `{0}`")]
    Unknown(String),
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Axis-aligned box in `(x, lambda)` space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Region { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn validate(&self, dim: usize) -> Result<(), ModelError> {
        if self.lo.len() != dim || self.hi.len() != dim {
            return Err(ModelError::Invalid(format!("region bounds must have {dim} entries")));
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
            return Err(ModelError::Invalid("region needs finite bounds with lo < hi".into()));
        }
        Ok(())
    }

    /// Containment in the box grown by `margin` times its extent on every side.
    pub fn contains(&self, z: &[f64], margin: f64) -> bool {
        z.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| {
            let pad = margin * (h - l);
            *v >= l - pad && *v <= h + pad
        })
    }
}

/// A state `x` together with the two parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    pub x: Vec<f64>,
    pub lambda: [f64; 2],
}

impl StatePoint {
    pub fn new(x: Vec<f64>, lambda: [f64; 2]) -> Self {
        StatePoint { x, lambda }
    }

    /// Splits a packed `(x, lambda)` vector.
    pub fn from_z(z: &[f64]) -> Self {
        let n = z.len() - 2;
        StatePoint { x: z[..n].to_vec(), lambda: [z[n], z[n + 1]] }
    }

    pub fn to_z(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.lambda);
        z
    }
}

/// Per-model numerical defaults for continuation and proof.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelDefaults {
    /// Initial continuation step.
    pub step: f64,
    /// Largest continuation step.
    pub step_max: f64,
    /// Smallest continuation step before the front gives up locally.
    pub step_min: f64,
    /// Radius of the box over which the contraction bound is taken.
    pub r_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Bazykin,
    PredatorPrey,
    Bykov,
    Metastatic,
    ScalarCusp,
    Sphere { radius: f64 },
    Plane,
    User(Arc<UserModel>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub id: String,
    pub n: usize,
    pub kind: ModelKind,
    pub region: Region,
    pub seed: Option<StatePoint>,
    pub defaults: ModelDefaults,
}

/// Derivative requested from [`eval_derivatives`].
#[derive(Debug, Clone, PartialEq)]
pub enum Derivative {
    /// `D_x f`, n x n.
    JacobianX,
    /// `D_lambda f`, n x 2.
    JacobianLambda,
    /// `D_(x,lambda) f`, n x (n+2).
    JacobianFull,
    /// `D_xx f (u, v)`.
    Bilinear(Vec<f64>, Vec<f64>),
    /// `D_xxx f (u, v, w)`.
    Trilinear(Vec<f64>, Vec<f64>, Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DerivativeValue {
    Matrix(Matrix<f64>),
    Vector(Vec<f64>),
}

impl ModelSpec {
    /// Dimension of the packed `(x, lambda)` vector.
    pub fn dim(&self) -> usize {
        self.n + 2
    }

    /// `f(z)` for packed `z = (x, lambda)` over any scalar type.
    pub fn eval<T: Scalar>(&self, z: &[T]) -> Result<Vec<T>, ModelError> {
        if z.len() != self.dim() {
            return Err(ModelError::Dimension(format!(
                "model `{}` expects {} coordinates, got {}",
                self.id,
                self.dim(),
                z.len()
            )));
        }
        match &self.kind {
            ModelKind::Bazykin => builtin::bazykin(z),
            ModelKind::PredatorPrey => builtin::predator_prey(z),
            ModelKind::Bykov => builtin::bykov(z),
            ModelKind::Metastatic => builtin::metastatic(z),
            ModelKind::ScalarCusp => builtin::scalar_cusp(z),
            ModelKind::Sphere { radius } => builtin::sphere(z, *radius),
            ModelKind::Plane => builtin::plane(z),
            ModelKind::User(u) => u.eval(z),
        }
    }

    /// Directional derivative `D_z f(z) dz` for a full-space direction.
    pub fn directional<T: Scalar>(&self, z: &[T], dz: &[T]) -> Result<Vec<T>, ModelError> {
        let dual: Vec<Dual<T>> = z.iter().zip(dz).map(|(&a, &d)| Dual::new(a, d)).collect();
        Ok(self.eval(&dual)?.into_iter().map(|d| d.eps).collect())
    }

    /// Full Jacobian `D_(x,lambda) f`, n x (n+2).
    pub fn jacobian<T: Scalar>(&self, z: &[T]) -> Result<Matrix<T>, ModelError> {
        self.jacobian_cols(z, self.dim())
    }

    /// State Jacobian `D_x f`, n x n.
    pub fn jacobian_x<T: Scalar>(&self, z: &[T]) -> Result<Matrix<T>, ModelError> {
        self.jacobian_cols(z, self.n)
    }

    fn jacobian_cols<T: Scalar>(&self, z: &[T], cols: usize) -> Result<Matrix<T>, ModelError> {
        let mut jac = Matrix::zeros(self.n, cols);
        for j in 0..cols {
            let dual: Vec<Dual<T>> = z
                .iter()
                .enumerate()
                .map(|(k, &a)| Dual::new(a, if k == j { T::one() } else { T::zero() }))
                .collect();
            for (i, d) in self.eval(&dual)?.into_iter().enumerate() {
                jac[(i, j)] = d.eps;
            }
        }
        Ok(jac)
    }

    fn hyper_x<T: Scalar>(&self, z: &[T], dirs: [&[T]; 3]) -> Result<Vec<Hyper<T>>, ModelError> {
        for d in dirs {
            if d.len() != self.n && !d.is_empty() {
                return Err(ModelError::Dimension(format!(
                    "direction has length {}, expected {}",
                    d.len(),
                    self.n
                )));
            }
        }
        let comp = |d: &[T], k: usize| if k < d.len() { d[k] } else { T::zero() };
        let hz: Vec<Hyper<T>> = z
            .iter()
            .enumerate()
            .map(|(k, &a)| Hyper::seeded(a, [comp(dirs[0], k), comp(dirs[1], k), comp(dirs[2], k)]))
            .collect();
        self.eval(&hz)
    }

    /// Bilinear action `D_xx f(z)(u, v)`.
    pub fn bilinear<T: Scalar>(&self, z: &[T], u: &[T], v: &[T]) -> Result<Vec<T>, ModelError> {
        Ok(self.hyper_x(z, [u, v, &[]])?.iter().map(|h| h.part(mask::E12)).collect())
    }

    /// Trilinear action `D_xxx f(z)(u, v, w)`.
    pub fn trilinear<T: Scalar>(
        &self,
        z: &[T],
        u: &[T],
        v: &[T],
        w: &[T],
    ) -> Result<Vec<T>, ModelError> {
        Ok(self.hyper_x(z, [u, v, w])?.iter().map(|h| h.part(mask::E123)).collect())
    }

    /// True when the model is a built-in bundled for testing only.
    pub fn is_test_model(&self) -> bool {
        matches!(self.kind, ModelKind::Sphere { .. } | ModelKind::Plane)
    }

    /// Builds a model from a parsed user model file.
    pub fn from_user(file: UserModelFile) -> Result<Self, ModelError> {
        file.validate()?;
        let n = file.n;
        let seed = file.seed.as_deref().map(StatePoint::from_z);
        let extent = file
            .region
            .lo
            .iter()
            .zip(&file.region.hi)
            .map(|(l, h)| h - l)
            .fold(f64::INFINITY, f64::min);
        let step = file.step.unwrap_or(extent / 40.0);
        Ok(ModelSpec {
            id: file.name,
            n,
            kind: ModelKind::User(Arc::new(UserModel { equations: file.equations })),
            region: file.region,
            seed,
            defaults: ModelDefaults {
                step,
                step_max: file.step_max.unwrap_or(4.0 * step),
                step_min: step / 64.0,
                r_star: file.r_star.unwrap_or(1e-10),
            },
        })
    }

    /// Looks up a bundled model by name.
    pub fn by_name(name: &str) -> Result<Self, ModelError> {
        let spec = |id: &str, n, kind, lo: Vec<f64>, hi: Vec<f64>, seed: Vec<f64>, d| ModelSpec {
            id: id.to_string(),
            n,
            kind,
            region: Region::new(lo, hi),
            seed: Some(StatePoint::from_z(&seed)),
            defaults: d,
        };
        let defaults = |step: f64, step_max: f64, r_star: f64| ModelDefaults {
            step,
            step_max,
            step_min: step / 64.0,
            r_star,
        };
        let m = match name {
            "bazykin" => spec(
                "bazykin",
                2,
                ModelKind::Bazykin,
                vec![0.0, 0.0, 0.0, 0.0],
                vec![35.0, 35.0, 4.0, 4.0],
                vec![10.0, 10.0, 91.0 / 90.0, -0.01],
                defaults(0.4, 1.2, 1e-12),
            ),
            "predator-prey" => spec(
                "predator-prey",
                2,
                ModelKind::PredatorPrey,
                vec![0.0, 0.0, -3.0, -3.0],
                vec![20.0, 20.0, 3.0, 3.0],
                vec![1200.0 / 1001.0, 989.0 / 1001.0, 0.0, 0.0],
                defaults(0.25, 0.5, 5e-12),
            ),
            "bykov" => spec(
                "bykov",
                3,
                ModelKind::Bykov,
                vec![0.0; 5],
                vec![1.6; 5],
                vec![0.29033981205911497, 0.10128169330369164, 0.3041892473185967, 1.0, 1.0],
                defaults(0.04, 0.1, 1e-10),
            ),
            "metastatic" => spec(
                "metastatic",
                3,
                ModelKind::Metastatic,
                vec![0.0, 0.0, 0.0, 0.05, 0.05],
                vec![3.0, 3.0, 3.0, 1.5, 1.5],
                vec![0.9295727333604222, 1.3143314211660162, 0.07576305125149478, 1.0, 1.0],
                defaults(0.05, 0.15, 1e-12),
            ),
            "scalar-oracle" => spec(
                "scalar-oracle",
                1,
                ModelKind::ScalarCusp,
                vec![-1.5, -1.0, -1.0],
                vec![1.5, 1.0, 1.0],
                vec![0.5, 0.0, 0.25],
                defaults(0.1, 0.2, 1e-11),
            ),
            "sphere-test" => spec(
                "sphere-test",
                1,
                ModelKind::Sphere { radius: 1.0 },
                vec![-1.5; 3],
                vec![1.5; 3],
                vec![1.0, 0.0, 0.0],
                defaults(0.2, 0.3, 1e-10),
            ),
            "plane-test" => spec(
                "plane-test",
                1,
                ModelKind::Plane,
                vec![-1.0; 3],
                vec![1.0; 3],
                vec![0.0; 3],
                defaults(0.2, 0.2, 1e-10),
            ),
            other => return Err(ModelError::Unknown(other.to_string())),
        };
        Ok(m)
    }

    /// Sphere of the given radius, centered at the origin of `(x, lambda)`.
    pub fn sphere(radius: f64) -> Self {
        let mut m = Self::by_name("sphere-test").expect("bundled model");
        m.kind = ModelKind::Sphere { radius };
        m.region = Region::new(vec![-1.5 * radius; 3], vec![1.5 * radius; 3]);
        m.seed = Some(StatePoint::new(vec![radius], [0.0, 0.0]));
        m.defaults.step = 0.2 * radius;
        m.defaults.step_max = 0.3 * radius;
        m.defaults.step_min = m.defaults.step / 64.0;
        m.id = format!("sphere-{radius}");
        m
    }
}

/// Names accepted by [`ModelSpec::by_name`].
pub const MODEL_NAMES: [&str; 7] = [
    "bazykin",
    "predator-prey",
    "bykov",
    "metastatic",
    "scalar-oracle",
    "sphere-test",
    "plane-test",
];

/// The four application models and the scalar cusp oracle.
pub fn builtin_models() -> Vec<ModelSpec> {
    MODEL_NAMES[..5]
        .iter()
        .map(|n| ModelSpec::by_name(n).expect("bundled model"))
        .collect()
}

pub fn eval_f(m: &ModelSpec, p: &StatePoint) -> Result<Vec<f64>, ModelError> {
    m.eval(&p.to_z())
}

pub fn eval_derivatives(
    m: &ModelSpec,
    p: &StatePoint,
    what: &Derivative,
) -> Result<DerivativeValue, ModelError> {
    let z = p.to_z();
    Ok(match what {
        Derivative::JacobianX => DerivativeValue::Matrix(m.jacobian_x(&z)?),
        Derivative::JacobianFull => DerivativeValue::Matrix(m.jacobian(&z)?),
        Derivative::JacobianLambda => {
            let full = m.jacobian(&z)?;
            DerivativeValue::Matrix(Matrix::from_fn(m.n, 2, |i, j| full[(i, m.n + j)]))
        }
        Derivative::Bilinear(u, v) => DerivativeValue::Vector(m.bilinear(&z, u, v)?),
        Derivative::Trilinear(u, v, w) => DerivativeValue::Vector(m.trilinear(&z, u, v, w)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    #[test]
    fn bundled_seeds_are_equilibria() {
        for m in builtin_models() {
            let f = eval_f(&m, m.seed.as_ref().unwrap()).unwrap();
            assert!(f.iter().all(|v| v.abs() < 1e-13), "{}: {f:?}", m.id);
        }
    }

    #[test]
    fn bazykin_seed_exact() {
        let m = ModelSpec::by_name("bazykin").unwrap();
        let f = eval_f(&m, &StatePoint::new(vec![10.0, 10.0], [91.0 / 90.0, -0.01])).unwrap();
        assert!(f[0].abs() < 1e-14 && f[1].abs() < 1e-14);
    }

    #[test]
    fn scalar_model_derivatives() {
        let m = ModelSpec::by_name("scalar-oracle").unwrap();
        let p = StatePoint::new(vec![1.0], [0.0, 0.0]);
        let DerivativeValue::Matrix(j) = eval_derivatives(&m, &p, &Derivative::JacobianX).unwrap() else {
            panic!()
        };
        assert_eq!(j[(0, 0)], -3.0);
        let b = eval_derivatives(&m, &p, &Derivative::Bilinear(vec![1.0], vec![1.0])).unwrap();
        assert_eq!(b, DerivativeValue::Vector(vec![-6.0]));
        let t = eval_derivatives(&m, &p, &Derivative::Trilinear(vec![1.0], vec![1.0], vec![1.0]))
            .unwrap();
        assert_eq!(t, DerivativeValue::Vector(vec![-6.0]));
        assert_eq!(eval_f(&m, &StatePoint::new(vec![0.0], [0.0, 0.0])).unwrap(), vec![0.0]);
    }

    #[test]
    fn regions_match_reference_boxes() {
        let b = ModelSpec::by_name("bazykin").unwrap();
        assert_eq!(b.region.hi, vec![35.0, 35.0, 4.0, 4.0]);
        let m = ModelSpec::by_name("metastatic").unwrap();
        assert_eq!(m.region.lo, vec![0.0, 0.0, 0.0, 0.05, 0.05]);
        assert_eq!(builtin_models().len(), 5);
    }

    #[test]
    fn bazykin_singular_denominator() {
        let m = ModelSpec::by_name("bazykin").unwrap();
        let r = m.eval(&[1.0, 1.0, -1.0, 0.0]);
        assert!(matches!(r, Err(ModelError::Domain(_))));
    }

    #[test]
    fn interval_evaluation_encloses_floats() {
        for m in builtin_models() {
            let z = m.seed.as_ref().unwrap().to_z();
            let zi: Vec<Interval> = z.iter().map(|&v| Interval::point(v)).collect();
            let f = m.eval(&z).unwrap();
            let fi = m.eval(&zi).unwrap();
            assert!(f.iter().zip(&fi).all(|(a, b)| b.contains(*a)), "{}", m.id);
            let u: Vec<f64> = (0..m.n).map(|k| 0.3 + k as f64).collect();
            let ui: Vec<Interval> = u.iter().map(|&v| Interval::point(v)).collect();
            let t = m.trilinear(&z, &u, &u, &u).unwrap();
            let ti = m.trilinear(&zi, &ui, &ui, &ui).unwrap();
            assert!(t.iter().zip(&ti).all(|(a, b)| b.contains(*a)), "{}", m.id);
        }
    }

    #[test]
    fn unknown_model_name() {
        assert!(matches!(ModelSpec::by_name("lorenz"), Err(ModelError::Unknown(_))));
    }
}
