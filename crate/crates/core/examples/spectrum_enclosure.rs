//! Rigorous eigenvalue enclosure: pseudo-diagonalize an interval matrix with
//! a float eigenvector basis, then take Gershgorin disks.
//!
//! ```text
//! cargo run --example spectrum_enclosure
//! ```

use cusp::interval::{
    disks_disjoint, enclose_inverse, enclose_inverse_complex, gershgorin_disks, ComplexIntervalMatrix, IntervalMatrix,
};
use cusp::linalg;
use nalgebra::DMatrix;

fn main() {
    let a = DMatrix::from_row_slice(3, 3, &[-2.0, 1.0, 0.0, 0.5, -1.0, 0.3, 0.0, 0.2, 1e-9]);
    // entries known only to within 1e-12
    let m = IntervalMatrix::from_point(&a).map(|x| x.inflate(1e-12));
    let (values, p) = linalg::eigen_decomposition(&a).unwrap();
    let pinv = enclose_inverse_complex(&p).unwrap();
    let l = pinv.mul(&m.to_complex()).mul(&ComplexIntervalMatrix::from_point_complex(&p));
    let disks = gershgorin_disks(&l);
    for (d, ev) in disks.iter().zip(&values) {
        println!(
            "disk center {:+.6e}{:+.6e}i radius {:.2e}  float eigenvalue {ev:.6e}  contains 0: {}  off the axis: {}",
            d.center.mid().re,
            d.center.mid().im,
            d.radius.hi(),
            d.may_contain_zero(),
            d.excludes_imaginary_axis()
        );
    }
    let disjoint = (0..3).all(|i| (i + 1..3).all(|j| disks_disjoint(&disks[i], &disks[j])));
    println!("pairwise disjoint: {disjoint}");

    // enclosure of a real inverse contains the identity when multiplied back
    let inv = enclose_inverse(&a).unwrap();
    let prod = inv.mul(&IntervalMatrix::from_point(&a));
    println!("P^-1 P contains I: {}", prod.contains(&DMatrix::identity(3, 3)));
}
