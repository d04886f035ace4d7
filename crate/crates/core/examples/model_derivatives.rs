//! Analytic derivatives of a bundled model and of the cusp map.
//!
//! ```text
//! cargo run --example model_derivatives -- metastatic
//! ```

use cusp::model::{eval_derivatives, eval_f, Derivative, DerivativeValue, ModelSpec};
use cusp::prove::{cusp_df, cusp_f, seed_unknowns};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "bazykin".into());
    let m = ModelSpec::by_name(&name).expect("unknown model");
    let p = m.seed.clone().expect("bundled models have a seed");
    println!("{} at {:?}", m.id, p.to_z());
    println!("f = {:?}", eval_f(&m, &p).unwrap());
    let e1: Vec<f64> = (0..m.n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
    for what in [
        Derivative::JacobianX,
        Derivative::JacobianLambda,
        Derivative::Bilinear(e1.clone(), e1.clone()),
        Derivative::Trilinear(e1.clone(), e1.clone(), e1.clone()),
    ] {
        let label = format!("{what:?}").chars().take_while(|c| c.is_alphabetic()).collect::<String>();
        match eval_derivatives(&m, &p, &what).unwrap() {
            DerivativeValue::Matrix(j) => println!("{label}:\n{}", j.to_dmatrix()),
            DerivativeValue::Vector(v) => println!("{label}(e1, ...) = {v:?}"),
        }
    }
    let x = seed_unknowns(&m, &p.to_z()).unwrap();
    let f = cusp_f(&m, &x).unwrap();
    let df = cusp_df(&m, &x).unwrap().to_dmatrix();
    println!("cusp map: {} components, Jacobian {}x{}", f.len(), df.nrows(), df.ncols());
}
