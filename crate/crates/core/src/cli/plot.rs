//! Raw plot data: CSV tables and a gnuplot script.

use std::path::Path;

use serde::Serialize;

use super::{write, CliError};
use crate::continuation::{Flag, Triangulation};
use crate::detect::GSample;
use crate::linalg;
use crate::prove::CuspCertificate;

#[derive(Serialize)]
struct NodeRow {
    id: usize,
    lambda1: f64,
    lambda2: f64,
    x_norm: f64,
    boundary: bool,
}

#[derive(Serialize)]
struct SimplexRow {
    id: usize,
    a: usize,
    b: usize,
    c: usize,
    flag: Flag,
}

#[derive(Serialize)]
struct CuspRow {
    lambda1: f64,
    lambda2: f64,
    x_norm: f64,
    c: f64,
}

fn csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Numerical(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numerical(format!("csv: {e}")))?;
    write(path, &String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn write_samples(path: &Path, samples: &[GSample]) -> Result<(), CliError> {
    csv(path, samples.iter().copied())
}

const SCRIPT: &str = r#"# gnuplot -p plot.gp
set datafile separator ","
set key autotitle columnhead
set multiplot layout 1,2
set xlabel "lambda1"; set ylabel "lambda2"; set zlabel "|x|"
splot "nodes.csv" using 2:3:4 with points pt 7 ps 0.2 title "nodes", \
      "cusps.csv" using 1:2:3 with points pt 6 ps 2 lc rgb "black" title "cusps"
unset zlabel
plot "nodes.csv" using 2:3 with points pt 7 ps 0.2 title "nodes", \
     "cusps.csv" using 1:2 with points pt 6 ps 2 lc rgb "black" title "cusps"
unset multiplot
"#;

/// Nodes projected to `(lambda_1, lambda_2, |x|_2)`, the flagged simplices,
/// the certified cusps, and a gnuplot script drawing both projections.
pub fn write_plot_data(
    dir: &Path,
    tri: &Triangulation,
    cusps: &[(super::ProofAttempt, CuspCertificate)],
) -> Result<(), CliError> {
    csv(
        &dir.join("nodes.csv"),
        tri.nodes.iter().map(|n| NodeRow {
            id: n.id,
            lambda1: n.lambda[0],
            lambda2: n.lambda[1],
            x_norm: linalg::norm(&n.x),
            boundary: n.boundary,
        }),
    )?;
    csv(
        &dir.join("simplices.csv"),
        tri.simplices.iter().map(|s| SimplexRow { id: s.id, a: s.nodes[0], b: s.nodes[1], c: s.nodes[2], flag: s.flag }),
    )?;
    csv(
        &dir.join("cusps.csv"),
        cusps.iter().map(|(_, cert)| {
            let l = cert.lambda();
            CuspRow {
                lambda1: l[0],
                lambda2: l[1],
                x_norm: linalg::norm(&cert.state()),
                c: cert.c.as_ref().map_or(f64::NAN, |c| c.mid),
            }
        }),
    )?;
    write(&dir.join("plot.gp"), SCRIPT)
}
