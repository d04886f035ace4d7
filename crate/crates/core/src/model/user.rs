//! Declarative rational models loaded from JSON.
//!
//! Each equation is a sum of fractions of polynomials in
//! `z = (x_1..x_n, lambda_1, lambda_2)`. Coefficients are taken as exact
//! binary floats, so interval evaluation of a user model is as rigorous as for
//! the built-ins.
//!
//! ```json
//! {
//!   "name": "cusp-normal-form",
//!   "n": 1,
//!   "region": { "lo": [-1.5, -1, -1], "hi": [1.5, 1, 1] },
//!   "seed": [0.5, 0.0, 0.25],
//!   "equations": [
//!     [ { "num": [ {"coef": 1, "pow": [0,1,0]}, {"coef": 1, "pow": [1,0,1]},
//!                  {"coef": -1, "pow": [3,0,0]} ] } ]
//!   ]
//! }
//! ```

use serde::{Deserialize, Serialize};

use super::{ModelError, Region};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub pow: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: Vec<Monomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<Vec<Monomial>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserModelFile {
    pub name: String,
    pub n: usize,
    pub region: Region,
    #[serde(default)]
    pub seed: Option<Vec<f64>>,
    #[serde(default)]
    pub r_star: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub step_max: Option<f64>,
    pub equations: Vec<Vec<Fraction>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserModel {
    pub equations: Vec<Vec<Fraction>>,
}

impl UserModelFile {
    pub fn validate(&self) -> Result<(), ModelError> {
        let dim = self.n + 2;
        if self.n == 0 {
            return Err(ModelError::Invalid("state dimension n must be positive".into()));
        }
        if self.equations.len() != self.n {
            return Err(ModelError::Invalid(format!(
                "expected {} equations, found {}",
                self.n,
                self.equations.len()
            )));
        }
        self.region.validate(dim)?;
        if let Some(seed) = &self.seed {
            if seed.len() != dim {
                return Err(ModelError::Invalid(format!("seed must have {dim} entries")));
            }
        }
        for (i, eq) in self.equations.iter().enumerate() {
            if eq.is_empty() {
                return Err(ModelError::Invalid(format!("equation {i} is empty")));
            }
            for frac in eq {
                let polys = std::iter::once(&frac.num).chain(frac.den.iter());
                for poly in polys {
                    for m in poly {
                        if m.pow.len() != dim {
                            return Err(ModelError::Invalid(format!(
                                "equation {i}: monomial exponent list must have {dim} entries"
                            )));
                        }
                        if !m.coef.is_finite() {
                            return Err(ModelError::Invalid(format!(
                                "equation {i}: non-finite coefficient"
                            )));
                        }
                    }
                }
                if frac.den.as_ref().is_some_and(|d| d.is_empty()) {
                    return Err(ModelError::Invalid(format!("equation {i}: empty denominator")));
                }
            }
        }
        Ok(())
    }
}

fn poly<T: Scalar>(terms: &[Monomial], z: &[T]) -> T {
    terms.iter().fold(T::zero(), |acc, m| {
        let mono = m
            .pow
            .iter()
            .zip(z)
            .filter(|(p, _)| **p > 0)
            .fold(T::from_f64(m.coef), |t, (p, zi)| t * zi.powi(*p));
        acc + mono
    })
}

impl UserModel {
    pub fn eval<T: Scalar>(&self, z: &[T]) -> Result<Vec<T>, ModelError> {
        self.equations
            .iter()
            .map(|eq| {
                eq.iter().try_fold(T::zero(), |acc, frac| {
                    let num = poly(&frac.num, z);
                    let term = match &frac.den {
                        None => num,
                        Some(den) => num
                            .checked_div(&poly(den, z))
                            .ok_or(ModelError::Domain("user model denominator vanishes"))?,
                    };
                    Ok(acc + term)
                })
            })
            .collect()
    }
}
