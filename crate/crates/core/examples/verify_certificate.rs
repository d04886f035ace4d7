//! Writing a certificate to JSON, re-checking it from `X_bar`, and rejecting
//! a tampered copy.
//!
//! ```text
//! cargo run --release --example verify_certificate
//! ```

use cusp::model::ModelSpec;
use cusp::prove::{prove_cusp, verify, CuspCertificate, ProveOptions};

fn main() {
    let m = ModelSpec::by_name("metastatic").unwrap();
    let cert = prove_cusp(&m, &[0.93, 2.22, 0.0435, 1.03, 0.134], &ProveOptions::for_model(&m)).unwrap();
    let json = cert.to_json();
    println!("certificate: {} bytes, valid {}", json.len(), cert.valid);

    let stored = CuspCertificate::from_json(&json).unwrap();
    let again = verify(&m, &stored).unwrap();
    let b = again.bounds.as_ref().unwrap();
    println!("re-checked: valid {}, Y = {:e}, Z = {:e}, r = {:e}", again.valid, b.y, b.z, b.r);

    let mut tampered = stored.clone();
    tampered.x_bar[3 * m.n] += 1e-7;
    let t = verify(&m, &tampered).unwrap();
    println!("tampered: valid {}, {:?}", t.valid, t.stages.nk);
}
