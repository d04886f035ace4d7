//! Signed SVD along a closed path: a loop around a coalescence of singular
//! values returns with the last singular pair's sign flipped.
//!
//! ```text
//! cargo run --example svd_monodromy
//! ```

use std::f64::consts::TAU;

use cusp::svd_path::{continue_svd, SvdOptions};
use nalgebra::DMatrix;

fn main() {
    for rho in [0.5, 2.0] {
        // [[1 + s1, s2], [s2, 1 - s1]] has eigenvalues 1 +- |s|, equal at s = 0
        let path = continue_svd(
            |t| {
                let (s1, s2) = (rho * (TAU * t).cos(), rho * (TAU * t).sin());
                Ok::<_, String>(DMatrix::from_row_slice(2, 2, &[1.0 + s1, s2, s2, 1.0 - s1]))
            },
            &SvdOptions::default(),
        )
        .unwrap();
        let quarter = &path.frames[path.frames.len() / 4];
        println!("rho = {rho}: {} frames", path.frames.len());
        println!("  sigma(0)   = {:?}", path.first().sigma);
        println!("  sigma(1/4) = {:?}", quarter.sigma);
        println!("  sigma(1)   = {:?}", path.last().sigma);
        println!("  monodromy  = {:?}", path.monodromy());
    }
}
