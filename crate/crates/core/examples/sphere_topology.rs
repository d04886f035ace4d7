//! Triangulating a closed manifold: the unit sphere in `(x, lambda)` space
//! closes up with Euler characteristic 2.
//!
//! ```text
//! cargo run --release --example sphere_topology
//! ```

use cusp::continuation::{continue_manifold, ContinuationOptions};
use cusp::model::ModelSpec;

fn main() {
    for radius in [1.0, 3.0] {
        let m = ModelSpec::sphere(radius);
        let tri = continue_manifold(&m, m.seed.as_ref().unwrap(), &ContinuationOptions::for_model(&m)).unwrap();
        let open = tri.edges().values().filter(|t| t.len() == 1).count();
        let fans = tri.closed_fan_angle_sums(&m).unwrap();
        let worst = fans.iter().map(|(_, s)| (s - std::f64::consts::TAU).abs()).fold(0.0, f64::max);
        println!(
            "radius {radius}: {} nodes, {} simplices, {open} open edges, Euler characteristic {}, max |angle sum - 2 pi| = {worst:.1e}",
            tri.nodes.len(),
            tri.simplices.len(),
            tri.euler_characteristic()
        );
    }
}
