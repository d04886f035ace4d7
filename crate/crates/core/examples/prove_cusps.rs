//! Full pipeline on a bundled model: triangulate, flag triangles, and try to
//! certify a cusp from every CUSP or UNDETERMINED triangle.
//!
//! ```text
//! cargo run --release --example prove_cusps -- bykov
//! ```

use cusp::continuation::{continue_manifold, ContinuationOptions};
use cusp::detect::{detect_all, DetectOptions};
use cusp::model::ModelSpec;
use cusp::prove::{prove_cusp, same_cusp, CuspCertificate, ProveOptions};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "bazykin".into());
    let m = ModelSpec::by_name(&name).expect("unknown model");
    let mut tri = continue_manifold(&m, m.seed.as_ref().unwrap(), &ContinuationOptions::for_model(&m))
        .expect("continuation");
    let summary = detect_all(&m, &mut tri, &DetectOptions::default());
    println!("{}: CUSP {}, UNDETERMINED {}", m.id, summary.counts.cusp, summary.counts.undetermined);
    let opts = ProveOptions::for_model(&m);
    let mut found: Vec<CuspCertificate> = Vec::new();
    for r in summary.candidates() {
        let cert = prove_cusp(&m, &r.centroid, &opts).expect("seed has the right size");
        if !cert.valid {
            println!("  #{} ({:?}): no certificate {:?}", r.id, r.verdict.flag, cert.stages);
            continue;
        }
        if found.iter().any(|c| same_cusp(c, &cert)) {
            println!("  #{} ({:?}): duplicate of an earlier cusp", r.id, r.verdict.flag);
            continue;
        }
        let b = cert.bounds.as_ref().unwrap();
        let c = cert.c.as_ref().unwrap();
        println!("  #{} ({:?}): cusp certified", r.id, r.verdict.flag);
        println!("    x      = {:?}", cert.state());
        println!("    lambda = {:?}", cert.lambda());
        println!("    Y = {:e}, Z = {:e}, r0 = {:e}, r = {:e} (r* = {:e})", b.y, b.z, b.r0, b.r, b.r_star);
        println!("    c = {:.15e} +- {:.2e}, {:?}", c.mid, c.rad, c.stability.unwrap());
        for d in &cert.disks {
            println!(
                "    disk {:+.6e}{:+.6e}i radius {:.2e}{}",
                d.center_re,
                d.center_im,
                d.radius,
                if d.contains_zero { " (contains 0)" } else { "" }
            );
        }
        found.push(cert);
    }
    println!("{} distinct certified cusps", found.len());
}
