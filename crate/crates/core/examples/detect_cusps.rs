//! Triangulates a bundled model, runs the cusp test on every triangle and
//! lists the flagged ones.
//!
//! ```text
//! cargo run --release --example detect_cusps -- predator-prey
//! ```

use std::time::Instant;

use cusp::continuation::{continue_manifold, ContinuationOptions, Flag};
use cusp::detect::{detect_all, DetectOptions};
use cusp::model::ModelSpec;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "bazykin".into());
    let m = ModelSpec::by_name(&name).expect("unknown model");
    let opts = ContinuationOptions::for_model(&m);
    let t0 = Instant::now();
    let mut tri = continue_manifold(&m, m.seed.as_ref().unwrap(), &opts).expect("continuation");
    let t1 = Instant::now();
    let summary = detect_all(&m, &mut tri, &DetectOptions::default());
    println!(
        "{}: {} nodes, {} simplices (continuation {:.2?}, detection {:.2?})",
        m.id,
        tri.nodes.len(),
        tri.simplices.len(),
        t1 - t0,
        t1.elapsed()
    );
    println!(
        "CUSP: {}, UNDETERMINED: {}, NO_CUSP: {}",
        summary.counts.cusp, summary.counts.undetermined, summary.counts.no_cusp
    );
    for r in summary.candidates() {
        let c: Vec<String> = r.centroid.iter().map(|v| format!("{v:.6}")).collect();
        let tag = if r.verdict.flag == Flag::Cusp { "CUSP" } else { "UNDETERMINED" };
        println!(
            "  #{:<6} {tag:<12} step {} I1 {:?} I2 {:?} at ({}) {}",
            r.id,
            r.verdict.exit_step,
            r.verdict.i1,
            r.verdict.i2,
            c.join(", "),
            r.verdict.message.as_deref().unwrap_or("")
        );
    }
}
