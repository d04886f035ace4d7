//! A model defined in JSON as sums of rational terms, triangulated, scanned
//! and proven like a bundled one.
//!
//! ```text
//! cargo run --release --example user_model
//! ```
//!
//! The model is `x' = lambda_1 + lambda_2 x - x^3 + x^4 / 10`.

use cusp::continuation::{continue_manifold, ContinuationOptions};
use cusp::detect::{detect_all, DetectOptions};
use cusp::model::{user::UserModelFile, ModelSpec};
use cusp::prove::{prove_cusp, ProveOptions};

const MODEL: &str = r#"{
  "name": "perturbed-cusp",
  "n": 1,
  "region": { "lo": [-1, -0.5, -0.5], "hi": [1, 0.5, 0.5] },
  "seed": [0.5, 0.0, 0.25],
  "equations": [[
    { "num": [ {"coef": 1, "pow": [0,1,0]}, {"coef": 1, "pow": [1,0,1]},
               {"coef": -1, "pow": [3,0,0]}, {"coef": 0.1, "pow": [4,0,0]} ] }
  ]]
}"#;

fn main() {
    let file: UserModelFile = serde_json::from_str(MODEL).unwrap();
    let mut m = ModelSpec::from_user(file).unwrap();
    // the seed in the file is for the unperturbed model; solve for lambda_1
    let (x, l2) = (0.5f64, 0.25);
    let l1 = x.powi(3) - 0.1 * x.powi(4) - l2 * x;
    m.seed = Some(cusp::model::StatePoint::new(vec![x], [l1, l2]));
    let mut tri = continue_manifold(&m, m.seed.as_ref().unwrap(), &ContinuationOptions::for_model(&m)).unwrap();
    println!("{}: {} nodes, {} simplices", m.id, tri.nodes.len(), tri.simplices.len());
    let summary = detect_all(&m, &mut tri, &DetectOptions::default());
    for r in summary.candidates() {
        let cert = prove_cusp(&m, &r.centroid, &ProveOptions::for_model(&m)).unwrap();
        let c = cert.c.as_ref().map(|c| format!("{:.12e} +- {:.1e}", c.mid, c.rad));
        println!("triangle {} {:?}: valid {}, x = {:?}, lambda = {:?}, c = {c:?}", r.id, r.verdict.flag, cert.valid, cert.state(), cert.lambda());
    }
}
