//! Triangulation of the two-dimensional equilibrium manifold
//! `{(x, lambda) : f(x, lambda) = 0}` by an advancing front.
//!
//! Starting from a hexagonal patch around a seed, the lowest-numbered open
//! node repeatedly has the angular gap in its fan filled with new nodes placed
//! in its tangent plane and corrected back to the manifold along its normal
//! space. The local step shrinks when neighbouring tangent planes disagree by
//! more than `theta_max`, which makes the mesh size follow the curvature.

mod front;
mod geometry;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::model::{ModelError, ModelSpec, Region, StatePoint};
pub use front::{continue_manifold, init_hexagon};
pub use geometry::{gauss_newton_project, normal_space, tangent_angle, tangent_plane};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuationError {
    #[error("Jacobian is rank deficient (sigma_min / sigma_max = {rcond:e})")]
    RankDeficient { rcond: f64 },
    #[error("Newton projection did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("advancing front stalled: {0}")]
    FrontStall(String),
    #[error("invalid triangulation: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Knobs of the advancing front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    /// Initial distance between neighbouring nodes.
    pub step: f64,
    pub step_min: f64,
    pub step_max: f64,
    /// Largest accepted angle between tangent planes of neighbours, degrees.
    pub theta_max_deg: f64,
    /// Step growth after an unhindered accepted patch.
    pub growth: f64,
    /// Sup-norm residual every node must meet.
    pub node_tol: f64,
    pub max_newton: usize,
    pub max_nodes: usize,
    pub region: Region,
}

impl ContinuationOptions {
    pub fn for_model(m: &ModelSpec) -> Self {
        ContinuationOptions {
            step: m.defaults.step,
            step_min: m.defaults.step_min,
            step_max: m.defaults.step_max,
            theta_max_deg: 10.0,
            growth: 1.3,
            node_tol: 1e-10,
            max_newton: 20,
            max_nodes: 200_000,
            region: m.region.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ContinuationError> {
        let positive = [self.step, self.step_min, self.step_max, self.theta_max_deg, self.node_tol];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(ContinuationError::Schema("continuation tolerances must be positive".into()));
        }
        if self.step_min > self.step || self.step > self.step_max {
            return Err(ContinuationError::Schema("need step_min <= step <= step_max".into()));
        }
        if !(self.growth >= 1.0) {
            return Err(ContinuationError::Schema("growth factor must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Flag {
    Untested,
    Cusp,
    NoCusp,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub x: Vec<f64>,
    pub lambda: [f64; 2],
    pub residual: f64,
    /// Outside the exploration region, or a front node that could not be
    /// closed; its fan is left open.
    #[serde(default)]
    pub boundary: bool,
}

impl Node {
    pub fn z(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.lambda);
        z
    }

    pub fn point(&self) -> StatePoint {
        StatePoint::new(self.x.clone(), self.lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    pub id: usize,
    /// Counter-clockwise with respect to the manifold orientation.
    pub nodes: [usize; 3],
    #[serde(default)]
    pub neighbors: Vec<usize>,
    #[serde(default = "untested")]
    pub flag: Flag,
}

fn untested() -> Flag {
    Flag::Untested
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub node_tol: f64,
    pub theta_max_deg: f64,
    pub step: f64,
    pub step_min: f64,
    pub step_max: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FrontStats {
    pub halvings: usize,
    pub stuck_nodes: usize,
    pub boundary_nodes: usize,
    pub snapped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangulation {
    pub model: String,
    pub tolerances: Tolerances,
    pub nodes: Vec<Node>,
    pub simplices: Vec<Simplex>,
    #[serde(default)]
    pub stats: FrontStats,
}

impl Triangulation {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("triangulation serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ContinuationError> {
        let t: Triangulation =
            serde_json::from_str(s).map_err(|e| ContinuationError::Schema(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    /// Structural checks on a loaded triangulation.
    pub fn validate(&self) -> Result<(), ContinuationError> {
        let bad = |msg: String| Err(ContinuationError::Schema(msg));
        if self.nodes.is_empty() || self.simplices.is_empty() {
            return bad("triangulation has no nodes or no simplices".into());
        }
        let n = self.nodes[0].x.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return bad(format!("node at position {i} has id {}", node.id));
            }
            if node.x.len() != n || n == 0 {
                return bad(format!("node {i} has state dimension {}", node.x.len()));
            }
            if node.z().iter().any(|v| !v.is_finite()) {
                return bad(format!("node {i} has non-finite coordinates"));
            }
        }
        for (i, s) in self.simplices.iter().enumerate() {
            if s.id != i {
                return bad(format!("simplex at position {i} has id {}", s.id));
            }
            let [a, b, c] = s.nodes;
            if a == b || b == c || a == c {
                return bad(format!("simplex {i} repeats a node"));
            }
            if s.nodes.iter().any(|&k| k >= self.nodes.len()) {
                return bad(format!("simplex {i} references a missing node"));
            }
            if s.neighbors.iter().any(|&k| k >= self.simplices.len()) {
                return bad(format!("simplex {i} references a missing neighbour"));
            }
        }
        Ok(())
    }

    pub fn state_dim(&self) -> usize {
        self.nodes[0].x.len()
    }

    pub fn edges(&self) -> std::collections::BTreeMap<(usize, usize), Vec<usize>> {
        let mut edges = std::collections::BTreeMap::new();
        for s in &self.simplices {
            for k in 0..3 {
                let (a, b) = (s.nodes[k], s.nodes[(k + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_insert_with(Vec::new).push(s.id);
            }
        }
        edges
    }

    /// Recomputes the adjacency lists from shared edges.
    pub fn rebuild_neighbors(&mut self) {
        let edges = self.edges();
        for s in self.simplices.iter_mut() {
            s.neighbors.clear();
        }
        for tris in edges.values() {
            if let [a, b] = tris[..] {
                self.simplices[a].neighbors.push(b);
                self.simplices[b].neighbors.push(a);
            }
        }
        for s in self.simplices.iter_mut() {
            s.neighbors.sort_unstable();
        }
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.edges().len() as i64 + self.simplices.len() as i64
    }

    pub fn max_residual(&self) -> f64 {
        self.nodes.iter().map(|n| n.residual).fold(0.0, f64::max)
    }

    pub fn centroid(&self, simplex: usize) -> Vec<f64> {
        let zs: Vec<Vec<f64>> = self.simplices[simplex].nodes.iter().map(|&k| self.nodes[k].z()).collect();
        (0..zs[0].len()).map(|i| (zs[0][i] + zs[1][i] + zs[2][i]) / 3.0).collect()
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges()
            .keys()
            .map(|&(a, b)| linalg::norm(&linalg::sub(&self.nodes[a].z(), &self.nodes[b].z())))
            .collect()
    }

    /// Sum of the triangle angles at every node whose fan is closed, measured
    /// in its tangent plane. Closed fans of a smooth surface sum to `2 pi`.
    pub fn closed_fan_angle_sums(&self, m: &ModelSpec) -> Result<Vec<(usize, f64)>, ContinuationError> {
        let edges = self.edges();
        let mut fans: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for s in &self.simplices {
            for &k in &s.nodes {
                fans[k].push(s.id);
            }
        }
        let mut out = Vec::new();
        for (k, fan) in fans.iter().enumerate() {
            if fan.is_empty() {
                continue;
            }
            let closed = fan.iter().all(|&t| {
                let s = &self.simplices[t];
                s.nodes.iter().filter(|&&j| j != k).all(|&j| edges[&(j.min(k), j.max(k))].len() == 2)
            });
            if !closed {
                continue;
            }
            let zk = self.nodes[k].z();
            let [t1, t2] = tangent_plane(m, &zk)?;
            let proj = |j: usize| {
                let d = linalg::sub(&self.nodes[j].z(), &zk);
                (linalg::dot(&d, &t1), linalg::dot(&d, &t2))
            };
            let mut sum = 0.0;
            for &t in fan {
                let s = &self.simplices[t];
                let i = s.nodes.iter().position(|&j| j == k).unwrap();
                let (a, b) = (proj(s.nodes[(i + 1) % 3]), proj(s.nodes[(i + 2) % 3]));
                let cross = a.0 * b.1 - a.1 * b.0;
                let dot = a.0 * b.0 + a.1 * b.1;
                sum += cross.atan2(dot);
            }
            out.push((k, sum));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_serializes_in_caps() {
        assert_eq!(serde_json::to_string(&Flag::NoCusp).unwrap(), "\"NO_CUSP\"");
    }

    #[test]
    fn rejects_empty_triangulation() {
        let t = r#"{"model":"x","tolerances":{"node_tol":1e-10,"theta_max_deg":10,"step":0.1,
            "step_min":0.01,"step_max":0.2},"nodes":[],"simplices":[]}"#;
        assert!(matches!(Triangulation::from_json(t), Err(ContinuationError::Schema(_))));
    }
}
