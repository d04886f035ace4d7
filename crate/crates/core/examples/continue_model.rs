//! Triangulates the equilibrium manifold of a bundled model and prints
//! mesh statistics.
//!
//! ```text
//! cargo run --release --example continue_model -- bazykin
//! ```

use std::time::Instant;

use cusp::continuation::{continue_manifold, ContinuationOptions};
use cusp::model::ModelSpec;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "bazykin".into());
    let m = ModelSpec::by_name(&name).expect("unknown model");
    let mut opts = ContinuationOptions::for_model(&m);
    if let Some(cap) = std::env::args().nth(2) {
        opts.max_nodes = cap.parse().expect("node cap");
    }
    let t0 = Instant::now();
    let tri = match continue_manifold(&m, m.seed.as_ref().unwrap(), &opts) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("continuation failed: {e}");
            std::process::exit(1);
        }
    };
    let lengths = tri.edge_lengths();
    let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
    println!("model      {}", tri.model);
    println!("nodes      {}", tri.nodes.len());
    println!("simplices  {}", tri.simplices.len());
    println!("euler      {}", tri.euler_characteristic());
    println!("residual   {:e}", tri.max_residual());
    println!("mean edge  {mean:.4}");
    println!("front      {:?}", tri.stats);
    println!("elapsed    {:.2?}", t0.elapsed());
    if let Some(path) = std::env::args().nth(3) {
        std::fs::write(path, tri.to_json()).expect("write triangulation");
    }
}
