use crate::interval::Matrix;
use crate::jet::Dual;
use crate::model::{ModelError, ModelSpec};
use crate::scalar::Scalar;

/// Unknowns `X = (x, v, w, lambda, h, s)` of the cusp map, packed in that
/// order into a vector of length `4n + 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspUnknowns<T> {
    pub x: Vec<T>,
    pub v: Vec<T>,
    pub w: Vec<T>,
    pub lambda: [T; 2],
    pub h: Vec<T>,
    pub s: [T; 2],
}

pub fn packed_len(n: usize) -> usize {
    4 * n + 4
}

impl<T: Copy> CuspUnknowns<T> {
    pub fn unpack(n: usize, p: &[T]) -> Result<Self, ModelError> {
        if p.len() != packed_len(n) {
            return Err(ModelError::Dimension(format!(
                "cusp unknowns need {} entries, got {}",
                packed_len(n),
                p.len()
            )));
        }
        Ok(CuspUnknowns {
            x: p[..n].to_vec(),
            v: p[n..2 * n].to_vec(),
            w: p[2 * n..3 * n].to_vec(),
            lambda: [p[3 * n], p[3 * n + 1]],
            h: p[3 * n + 2..4 * n + 2].to_vec(),
            s: [p[4 * n + 2], p[4 * n + 3]],
        })
    }

    pub fn pack(&self) -> Vec<T> {
        let mut p = Vec::with_capacity(packed_len(self.x.len()));
        p.extend_from_slice(&self.x);
        p.extend_from_slice(&self.v);
        p.extend_from_slice(&self.w);
        p.extend_from_slice(&self.lambda);
        p.extend_from_slice(&self.h);
        p.extend_from_slice(&self.s);
        p
    }

    /// `(x, lambda)`.
    pub fn z(&self) -> Vec<T> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.lambda);
        z
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Extends a state direction by zero parameter components.
fn state_dir<T: Scalar>(d: &[T]) -> Vec<T> {
    let mut out = d.to_vec();
    out.extend([T::zero(), T::zero()]);
    out
}

/// The cusp map `F(X)`, rows in the order
/// `f`, `D_x f v + s1 v`, `D_x f^T w`, `v.v - 1`, `w.v - 1`,
/// `D_x f h + s2 v + D_xx f(v, v)`, `w . D_xx f(v, v)`, `w . h`.
pub fn cusp_f<T: Scalar>(m: &ModelSpec, packed: &[T]) -> Result<Vec<T>, ModelError> {
    let n = m.n;
    let u = CuspUnknowns::unpack(n, packed)?;
    let z = u.z();
    let f = m.eval(&z)?;
    let jv = m.directional(&z, &state_dir(&u.v))?;
    let jx = m.jacobian_x(&z)?;
    let jh = m.directional(&z, &state_dir(&u.h))?;
    let b = m.bilinear(&z, &u.v, &u.v)?;
    let mut out = Vec::with_capacity(packed_len(n));
    out.extend(f);
    out.extend((0..n).map(|i| jv[i] + u.s[0] * u.v[i]));
    out.extend((0..n).map(|j| (0..n).fold(T::zero(), |acc, i| acc + jx[(i, j)] * u.w[i])));
    out.push(dot(&u.v, &u.v) - T::one());
    out.push(dot(&u.w, &u.v) - T::one());
    out.extend((0..n).map(|i| jh[i] + u.s[1] * u.v[i] + b[i]));
    out.push(dot(&u.w, &b));
    out.push(dot(&u.w, &u.h));
    Ok(out)
}

/// Jacobian of [`cusp_f`] with respect to the packed unknowns, one
/// forward-mode sweep per column.
pub fn cusp_df<T: Scalar>(m: &ModelSpec, packed: &[T]) -> Result<Matrix<T>, ModelError> {
    let p = packed_len(m.n);
    if packed.len() != p {
        return Err(ModelError::Dimension(format!("cusp unknowns need {p} entries, got {}", packed.len())));
    }
    let mut df = Matrix::zeros(p, p);
    for j in 0..p {
        let seeded: Vec<Dual<T>> = packed
            .iter()
            .enumerate()
            .map(|(k, &a)| Dual::new(a, if k == j { T::one() } else { T::zero() }))
            .collect();
        for (i, d) in cusp_f(m, &seeded)?.into_iter().enumerate() {
            df[(i, j)] = d.eps;
        }
    }
    Ok(df)
}

/// Normal-form coefficient `c = (1/6) w^T (D_xxx f(v, v, v) + 3 D_xx f(v, h))`.
pub fn normal_form_coefficient<T: Scalar>(m: &ModelSpec, u: &CuspUnknowns<T>) -> Result<T, ModelError> {
    let z = u.z();
    let t = m.trilinear(&z, &u.v, &u.v, &u.v)?;
    let b = m.bilinear(&z, &u.v, &u.h)?;
    let three = T::from_f64(3.0);
    let inner: Vec<T> = t.iter().zip(&b).map(|(&a, &c)| a + three * c).collect();
    Ok(T::ratio(1, 6) * dot(&u.w, &inner))
}
