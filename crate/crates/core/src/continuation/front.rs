use std::collections::{BTreeSet, HashMap, HashSet};
use std::f64::consts::PI;

use super::geometry::{gauss_newton_project, normal_space, tangent_angle, tangent_plane};
use super::{
    ContinuationError, ContinuationOptions, Flag, FrontStats, Node, Simplex, Tolerances, Triangulation,
};
use crate::linalg;
use crate::model::{ModelSpec, StatePoint};

/// Gaps up to this angle are closed with a single triangle.
const CLOSE_ANGLE: f64 = PI / 2.0;
/// Larger gaps may still be closed directly when splitting them fails.
const CLOSE_ANGLE_FALLBACK: f64 = 5.0 * PI / 6.0;
/// Limit for direct closing when stuck nodes are revisited.
const CLOSE_ANGLE_RETRY: f64 = 0.97 * PI;
/// Rounds of revisiting stuck nodes after the front has stopped.
const RETRY_ROUNDS: usize = 3;
const SECTOR: f64 = PI / 3.0;
const SNAP: f64 = 0.5;
/// A prediction this close (relative to the step) to an interior node
/// landed on surface that is already triangulated.
const INTERIOR: f64 = 0.5;
/// Nodes further than this (normal over tangential offset) from a tangent
/// plane are on another part of the surface and ignored by the local tests.
const FLAT: f64 = 0.5;
/// Nodes within this fraction of the region extent outside it are still expanded.
const REGION_PAD: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Open,
    Complete,
    Boundary,
}

struct Gap {
    end: usize,
    start: usize,
    angle: f64,
}

struct Candidate {
    z: Vec<f64>,
    tangent: [Vec<f64>; 2],
    normal: Vec<Vec<f64>>,
    residual: f64,
}

enum Slot {
    Old(usize),
    New(Candidate),
}

/// Uniform hash grid over (up to) three coordinates of the ambient space.
/// Projected distances never exceed true ones, so box queries are exact
/// after filtering.
struct Grid {
    axes: Vec<usize>,
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl Grid {
    fn new(opts: &ContinuationOptions) -> Self {
        let lo = &opts.region.lo;
        let hi = &opts.region.hi;
        let mut axes: Vec<usize> = (0..lo.len()).collect();
        axes.sort_by(|&i, &j| (hi[j] - lo[j]).total_cmp(&(hi[i] - lo[i])).then(i.cmp(&j)));
        axes.truncate(3);
        Grid { axes, cell: opts.step_max, cells: HashMap::new() }
    }

    fn index(&self, z: &[f64]) -> Vec<i64> {
        self.axes.iter().map(|&a| (z[a] / self.cell).floor() as i64).collect()
    }

    fn insert(&mut self, id: usize, z: &[f64]) {
        let key = self.index(z);
        self.cells.entry(key).or_default().push(id);
    }

    /// Ids of all points in cells meeting the box of half-width `r` around `z`.
    fn candidates(&self, z: &[f64], r: f64) -> Vec<usize> {
        let lo: Vec<i64> = self.axes.iter().map(|&a| ((z[a] - r) / self.cell).floor() as i64).collect();
        let hi: Vec<i64> = self.axes.iter().map(|&a| ((z[a] + r) / self.cell).floor() as i64).collect();
        let mut out = Vec::new();
        let mut idx = lo.clone();
        loop {
            if let Some(v) = self.cells.get(&idx) {
                out.extend_from_slice(v);
            }
            let mut d = 0;
            loop {
                if d == idx.len() {
                    return out;
                }
                idx[d] += 1;
                if idx[d] <= hi[d] {
                    break;
                }
                idx[d] = lo[d];
                d += 1;
            }
        }
    }
}

struct Front<'a> {
    m: &'a ModelSpec,
    opts: &'a ContinuationOptions,
    z: Vec<Vec<f64>>,
    tan: Vec<[Vec<f64>; 2]>,
    normal: Vec<Vec<Vec<f64>>>,
    residual: Vec<f64>,
    h: Vec<f64>,
    state: Vec<State>,
    outside: Vec<bool>,
    tris: Vec<[usize; 3]>,
    fans: Vec<Vec<usize>>,
    half: HashSet<(usize, usize)>,
    edge_count: HashMap<(usize, usize), u8>,
    open: BTreeSet<usize>,
    /// Nodes whose fan is not closed (open or boundary).
    perimeter: BTreeSet<usize>,
    /// Longest edge created so far; front edges this long may pass near a
    /// node without either endpoint being close.
    max_edge: f64,
    grid: Grid,
    /// Set while stuck nodes are revisited.
    retry: bool,
    stats: FrontStats,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn sector(a: (f64, f64), b: (f64, f64)) -> f64 {
    cross(a, b).atan2(a.0 * b.0 + a.1 * b.1)
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    cross((b.0 - a.0, b.1 - a.1), (c.0 - a.0, c.1 - a.1))
}

/// Proper crossing of segments `pq` and `rs`.
fn segments_cross(p: (f64, f64), q: (f64, f64), r: (f64, f64), s: (f64, f64)) -> bool {
    let d1 = orient(p, q, r);
    let d2 = orient(p, q, s);
    let d3 = orient(r, s, p);
    let d4 = orient(r, s, q);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn inside_triangle(p: (f64, f64), a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> bool {
    let (d1, d2, d3) = (orient(a, b, p), orient(b, c, p), orient(c, a, p));
    (d1 > 0.0 && d2 > 0.0 && d3 > 0.0) || (d1 < 0.0 && d2 < 0.0 && d3 < 0.0)
}

impl<'a> Front<'a> {
    fn new(m: &'a ModelSpec, opts: &'a ContinuationOptions) -> Self {
        Front {
            m,
            opts,
            z: Vec::new(),
            tan: Vec::new(),
            normal: Vec::new(),
            residual: Vec::new(),
            h: Vec::new(),
            state: Vec::new(),
            outside: Vec::new(),
            tris: Vec::new(),
            fans: Vec::new(),
            half: HashSet::new(),
            edge_count: HashMap::new(),
            open: BTreeSet::new(),
            perimeter: BTreeSet::new(),
            max_edge: 0.0,
            grid: Grid::new(opts),
            retry: false,
            stats: FrontStats::default(),
        }
    }

    fn theta_max(&self) -> f64 {
        self.opts.theta_max_deg.to_radians()
    }

    fn candidate(&self, z: Vec<f64>, residual: f64) -> Result<Candidate, ContinuationError> {
        let tangent = tangent_plane(self.m, &z)?;
        let normal = normal_space(self.m, &z)?;
        Ok(Candidate { z, tangent, normal, residual })
    }

    fn push_node(&mut self, c: Candidate, h: f64) -> usize {
        let id = self.z.len();
        let outside = !self.opts.region.contains(&c.z, REGION_PAD);
        self.grid.insert(id, &c.z);
        self.z.push(c.z);
        self.tan.push(c.tangent);
        self.normal.push(c.normal);
        self.residual.push(c.residual);
        self.h.push(h);
        self.outside.push(outside);
        self.fans.push(Vec::new());
        self.perimeter.insert(id);
        if outside {
            self.state.push(State::Boundary);
            self.stats.boundary_nodes += 1;
        } else {
            self.state.push(State::Open);
            self.open.insert(id);
        }
        id
    }

    fn push_triangle(&mut self, t: [usize; 3]) {
        let id = self.tris.len();
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            self.half.insert((a, b));
            *self.edge_count.entry(key(a, b)).or_insert(0) += 1;
            self.max_edge = self.max_edge.max(linalg::norm(&linalg::sub(&self.z[a], &self.z[b])));
            self.fans[t[k]].push(id);
        }
        self.tris.push(t);
    }

    /// `(next, prev)` neighbours of `k` in each triangle of its fan, so the
    /// triangle covers the sector from `next` counter-clockwise to `prev`.
    fn spokes(&self, k: usize) -> Vec<(usize, usize)> {
        self.fans[k]
            .iter()
            .map(|&t| {
                let tri = self.tris[t];
                let i = tri.iter().position(|&j| j == k).expect("fan member");
                (tri[(i + 1) % 3], tri[(i + 2) % 3])
            })
            .collect()
    }

    fn closed(&self, k: usize) -> bool {
        !self.fans[k].is_empty()
            && self.spokes(k).iter().all(|&(a, b)| {
                self.edge_count.get(&key(k, a)) == Some(&2) && self.edge_count.get(&key(k, b)) == Some(&2)
            })
    }

    fn local(&self, k: usize, z: &[f64]) -> (f64, f64) {
        let d = linalg::sub(z, &self.z[k]);
        (linalg::dot(&d, &self.tan[k][0]), linalg::dot(&d, &self.tan[k][1]))
    }

    fn gaps(&self, k: usize) -> Vec<Gap> {
        let spokes = self.spokes(k);
        let starts: BTreeSet<usize> = spokes.iter().map(|s| s.0).collect();
        let stops: BTreeSet<usize> = spokes.iter().map(|s| s.1).collect();
        let ends: Vec<usize> = stops.difference(&starts).copied().collect();
        let begins: Vec<usize> = starts.difference(&stops).copied().collect();
        if ends.is_empty() || begins.is_empty() {
            return Vec::new();
        }
        let uv = |j: usize| self.local(k, &self.z[j]);
        if ends.len() == 1 && begins.len() == 1 {
            let covered: f64 = spokes.iter().map(|&(a, b)| sector(uv(a), uv(b))).sum();
            return vec![Gap { end: ends[0], start: begins[0], angle: 2.0 * PI - covered }];
        }
        ends.iter()
            .map(|&e| {
                let (start, angle) = begins
                    .iter()
                    .map(|&s| {
                        let a = sector(uv(e), uv(s));
                        (s, if a <= 0.0 { a + 2.0 * PI } else { a })
                    })
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .expect("nonempty");
                Gap { end: e, start, angle }
            })
            .collect()
    }

    fn mark_complete(&mut self, k: usize) {
        self.state[k] = State::Complete;
        self.open.remove(&k);
        self.perimeter.remove(&k);
    }

    fn refresh(&mut self, k: usize) {
        if self.state[k] != State::Complete && self.closed(k) {
            self.mark_complete(k);
        }
    }

    /// All nodes within `radius` of `z`, nearest first.
    fn within(&self, z: &[f64], radius: f64) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = self
            .grid
            .candidates(z, radius)
            .into_iter()
            .map(|j| (j, linalg::norm(&linalg::sub(&self.z[j], z))))
            .filter(|&(_, d)| d <= radius)
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }

    /// Perimeter nodes within `radius` of node `k`, excluding `k`.
    fn nearby(&self, k: usize, radius: f64) -> Vec<usize> {
        let mut near: Vec<usize> = self
            .within(&self.z[k], radius)
            .into_iter()
            .map(|(j, _)| j)
            .filter(|&j| j != k && self.perimeter.contains(&j))
            .collect();
        near.sort_unstable();
        near
    }

    /// Offset of `z` from node `k` split into tangential and normal length.
    fn offsets(&self, k: usize, z: &[f64]) -> (f64, f64) {
        let (u, v) = self.local(k, z);
        let d = linalg::norm(&linalg::sub(z, &self.z[k]));
        let t = (u * u + v * v).sqrt();
        (t, (d * d - t * t).max(0.0).sqrt())
    }

    /// Whether a point is close enough to the tangent plane at `k` for its
    /// projection to be meaningful.
    fn flat(&self, k: usize, z: &[f64]) -> bool {
        let (t, n) = self.offsets(k, z);
        n <= FLAT * t
    }

    /// Front edges passing within `radius` of node `k`.
    fn front_edges(&self, k: usize, radius: f64) -> Vec<(usize, usize)> {
        let zk = &self.z[k];
        let mut out = BTreeSet::new();
        for (j, _) in self.within(zk, radius + self.max_edge) {
            if !self.perimeter.contains(&j) {
                continue;
            }
            for (a, b) in self.spokes(j) {
                for o in [a, b] {
                    if self.edge_count.get(&key(j, o)) != Some(&1) || out.contains(&key(j, o)) {
                        continue;
                    }
                    let (p, q) = (&self.z[j], &self.z[o]);
                    let pq = linalg::sub(q, p);
                    let s = (linalg::dot(&linalg::sub(zk, p), &pq) / linalg::dot(&pq, &pq)).clamp(0.0, 1.0);
                    let closest = linalg::axpy(s, &pq, p);
                    if linalg::norm(&linalg::sub(&closest, zk)) <= radius
                        && (j == k || self.flat(k, p))
                        && (o == k || self.flat(k, q))
                    {
                        out.insert(key(j, o));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Checks the fan `(k, seq[i], seq[i+1])` against the existing mesh.
    /// `pos` maps slot ids (existing node ids, or fresh ids for candidates) to
    /// positions.
    fn valid_fan(&self, k: usize, seq: &[usize], pos: &HashMap<usize, Vec<f64>>, radius: f64, strict: bool) -> bool {
        let mut new_half = HashSet::new();
        for w in seq.windows(2) {
            let (a, b) = (w[0], w[1]);
            for he in [(k, a), (a, b), (b, k)] {
                if self.half.contains(&he) || !new_half.insert(he) {
                    return false;
                }
            }
        }
        let at = |j: usize| -> Vec<f64> { pos.get(&j).cloned().unwrap_or_else(|| self.z[j].clone()) };
        let uv = |j: usize| self.local(k, &at(j));
        let origin = (0.0, 0.0);
        if strict {
            for w in seq.windows(2) {
                if cross(uv(w[0]), uv(w[1])) <= 0.0 {
                    return false;
                }
            }
        }
        let near: Vec<usize> =
            self.nearby(k, radius).into_iter().filter(|&j| self.flat(k, &self.z[j])).collect();
        let edges = self.front_edges(k, radius);
        let mut new_edges: Vec<(usize, usize)> = seq.iter().map(|&a| (k, a)).collect();
        new_edges.extend(seq.windows(2).map(|w| (w[0], w[1])));
        for &(a, b) in &new_edges {
            if self.edge_count.contains_key(&key(a, b)) {
                continue;
            }
            let (pa, pb) = (uv(a), uv(b));
            for &(c, d) in &edges {
                if c == a || c == b || d == a || d == b {
                    continue;
                }
                if segments_cross(pa, pb, uv(c), uv(d)) {
                    return false;
                }
            }
        }
        for &j in &near {
            if seq.contains(&j) {
                continue;
            }
            let pj = uv(j);
            for w in seq.windows(2) {
                if inside_triangle(pj, origin, uv(w[0]), uv(w[1])) {
                    return false;
                }
            }
        }
        true
    }

    /// Every new triangle must be counter-clockwise in the tangent plane of
    /// each of its corners, and an existing corner's fan must not wind past
    /// `2 pi`: otherwise the triangle folds over the mesh at that corner,
    /// which the checks in `k`'s plane miss where the surface is curved.
    fn corners_ok(
        &self,
        k: usize,
        seq: &[usize],
        pos: &HashMap<usize, Vec<f64>>,
        tans: &HashMap<usize, [Vec<f64>; 2]>,
    ) -> bool {
        let at = |j: usize| -> &[f64] {
            match pos.get(&j) {
                Some(z) => z,
                None => &self.z[j],
            }
        };
        let mut added: HashMap<usize, f64> = HashMap::new();
        for w in seq.windows(2) {
            let tri = [k, w[0], w[1]];
            for i in 0..3 {
                let v = tri[i];
                let tan = tans.get(&v).unwrap_or_else(|| &self.tan[v]);
                let local = |j: usize| {
                    let d = linalg::sub(at(j), at(v));
                    (linalg::dot(&d, &tan[0]), linalg::dot(&d, &tan[1]))
                };
                let (a, b) = (local(tri[(i + 1) % 3]), local(tri[(i + 2) % 3]));
                if cross(a, b) <= 0.0 {
                    return false;
                }
                if v < self.z.len() {
                    *added.entry(v).or_insert(0.0) += sector(a, b);
                }
            }
        }
        added.into_iter().all(|(v, extra)| {
            let uv = |j: usize| self.local(v, &self.z[j]);
            let covered: f64 = self.spokes(v).iter().map(|&(a, b)| sector(uv(a), uv(b))).sum();
            covered + extra <= 2.0 * PI + 1e-9
        })
    }

    fn spoke_radius(&self, k: usize, gap: &Gap, h: f64) -> f64 {
        let le = linalg::norm(&linalg::sub(&self.z[gap.end], &self.z[k]));
        let ls = linalg::norm(&linalg::sub(&self.z[gap.start], &self.z[k]));
        2.5 * h.max(le).max(ls)
    }

    fn try_close(&mut self, k: usize, gap: &Gap) -> bool {
        let seq = [gap.end, gap.start];
        let radius = self.spoke_radius(k, gap, self.h[k]);
        let strict = gap.angle.abs() > 10f64.to_radians();
        let none = HashMap::new();
        if self.valid_fan(k, &seq, &none, radius, strict) && self.corners_ok(k, &seq, &none, &HashMap::new()) {
            self.push_triangle([k, gap.end, gap.start]);
            for j in [k, gap.end, gap.start] {
                self.refresh(j);
            }
            true
        } else {
            false
        }
    }

    fn predict(&self, k: usize, phi: f64, h: f64, check_angle: bool) -> Option<Candidate> {
        let [t1, t2] = &self.tan[k];
        let pred: Vec<f64> = (0..self.z[k].len())
            .map(|i| self.z[k][i] + h * (phi.cos() * t1[i] + phi.sin() * t2[i]))
            .collect();
        let (z, residual) =
            gauss_newton_project(self.m, &pred, &self.normal[k], self.opts.node_tol, self.opts.max_newton).ok()?;
        let dist = linalg::norm(&linalg::sub(&z, &self.z[k]));
        if !(dist <= 1.5 * h && dist >= 0.5 * h) {
            return None;
        }
        let c = self.candidate(z, residual).ok()?;
        (!check_angle || tangent_angle(&self.tan[k], &c.tangent) <= self.theta_max()).then_some(c)
    }

    /// Nearest node within `SNAP * h` of a prediction. `Err` when that node
    /// is interior: the prediction fell onto already triangulated surface.
    fn snap_target(&self, k: usize, z: &[f64], h: f64) -> Result<Option<usize>, ()> {
        let near = self.within(z, SNAP * h);
        if let Some((j, _)) = near.iter().find(|&&(j, d)| j != k && d < SNAP * h && self.perimeter.contains(&j)) {
            return Ok(Some(*j));
        }
        if near.iter().any(|&(j, d)| j != k && d < INTERIOR * h) {
            return Err(());
        }
        Ok(None)
    }

    /// Splits the gap into `sectors` triangles with new nodes at distance `h`.
    /// Returns `None` if a prediction or the validity test fails.
    fn try_fan(&mut self, k: usize, gap: &Gap, sectors: usize, h: f64, clean: bool) -> Option<()> {
        let phi_e = {
            let (a, b) = self.local(k, &self.z[gap.end]);
            b.atan2(a)
        };
        let mut slots = vec![Slot::Old(gap.end)];
        for j in 1..sectors {
            let phi = phi_e + gap.angle * j as f64 / sectors as f64;
            let c = self.predict(k, phi, h, 0.5 * h >= self.opts.step_min)?;
            match self.snap_target(k, &c.z, h).ok()? {
                Some(q) => slots.push(Slot::Old(q)),
                None => slots.push(Slot::New(c)),
            }
        }
        slots.push(Slot::Old(gap.start));

        // a prediction snapped onto an end spoke shortens the fan
        let id_of = |s: &Slot| match s {
            Slot::Old(q) => Some(*q),
            Slot::New(_) => None,
        };
        if let Some(i) = slots.iter().rposition(|s| id_of(s) == Some(gap.end)) {
            slots.drain(..i);
        }
        if let Some(i) = slots.iter().position(|s| id_of(s) == Some(gap.start)) {
            slots.truncate(i + 1);
        }

        let fresh0 = self.z.len();
        let mut seq = Vec::new();
        let mut pos = HashMap::new();
        let mut tans = HashMap::new();
        let mut fresh = fresh0;
        for s in &slots {
            let id = match s {
                Slot::Old(q) => *q,
                Slot::New(c) => {
                    pos.insert(fresh, c.z.clone());
                    tans.insert(fresh, c.tangent.clone());
                    fresh += 1;
                    fresh - 1
                }
            };
            if seq.last() != Some(&id) {
                seq.push(id);
            }
        }
        let unique: HashSet<usize> = seq.iter().copied().collect();
        if unique.len() != seq.len() || seq.len() < 2 || unique.contains(&k) {
            return None;
        }
        let radius = self.spoke_radius(k, gap, h);
        if !self.valid_fan(k, &seq, &pos, radius, true) || !self.corners_ok(k, &seq, &pos, &tans) {
            return None;
        }

        let h_new = if clean { (h * self.opts.growth).min(self.opts.step_max) } else { h };
        let snapped = slots.iter().filter(|s| matches!(s, Slot::Old(_))).count().saturating_sub(2);
        self.stats.snapped += snapped;
        for s in slots {
            if let Slot::New(c) = s {
                self.push_node(c, h_new);
            }
        }
        self.h[k] = h;
        for w in seq.windows(2) {
            self.push_triangle([k, w[0], w[1]]);
        }
        self.refresh(k);
        for &j in &seq {
            self.refresh(j);
        }
        Some(())
    }

    fn fill(&mut self, k: usize, gap: &Gap) -> bool {
        if gap.angle <= CLOSE_ANGLE && self.try_close(k, gap) {
            return true;
        }
        let sectors = ((gap.angle / SECTOR).round() as usize).max(2);
        let mut h = self.h[k];
        let mut clean = true;
        while h >= self.opts.step_min {
            if self.try_fan(k, gap, sectors, h, clean).is_some() {
                return true;
            }
            h *= 0.5;
            clean = false;
            self.stats.halvings += 1;
        }
        let limit = if self.retry { CLOSE_ANGLE_RETRY } else { CLOSE_ANGLE_FALLBACK };
        gap.angle <= limit && self.try_close(k, gap)
    }

    fn hexagon(&mut self, seed: &[f64]) -> Result<(), ContinuationError> {
        let normal = normal_space(self.m, seed)?;
        let (z0, r0) = gauss_newton_project(self.m, seed, &normal, self.opts.node_tol, self.opts.max_newton)?;
        let c0 = self.candidate(z0, r0)?;
        let mut h = self.opts.step;
        loop {
            let k = self.push_node(
                Candidate { z: c0.z.clone(), tangent: c0.tangent.clone(), normal: c0.normal.clone(), residual: r0 },
                h,
            );
            let ring: Option<Vec<Candidate>> = (0..6).map(|j| self.predict(k, j as f64 * SECTOR, h, true)).collect();
            match ring {
                Some(ring) => {
                    for c in ring {
                        self.push_node(c, h);
                    }
                    for j in 0..6 {
                        self.push_triangle([k, 1 + j, 1 + (j + 1) % 6]);
                    }
                    self.mark_complete(k);
                    return Ok(());
                }
                None => {
                    *self = Front::new(self.m, self.opts);
                    h *= 0.5;
                    self.stats.halvings += 1;
                    if h < self.opts.step_min {
                        return Err(ContinuationError::FrontStall(
                            "no admissible hexagon around the seed".into(),
                        ));
                    }
                }
            }
        }
    }

    /// Runs the front until no node is open, then revisits stuck nodes as
    /// long as that closes some of them.
    fn advance(&mut self) -> Result<(), ContinuationError> {
        self.sweep()?;
        for _ in 0..RETRY_ROUNDS {
            let stuck: Vec<usize> =
                (0..self.z.len()).filter(|&k| self.state[k] == State::Boundary && !self.outside[k]).collect();
            if stuck.is_empty() {
                break;
            }
            for &k in &stuck {
                self.state[k] = State::Open;
                self.open.insert(k);
            }
            self.stats.stuck_nodes -= stuck.len();
            self.retry = true;
            self.sweep()?;
            self.retry = false;
            if self.stats.stuck_nodes >= stuck.len() {
                break;
            }
        }
        Ok(())
    }

    fn sweep(&mut self) -> Result<(), ContinuationError> {
        while let Some(&k) = self.open.first() {
            if self.z.len() >= self.opts.max_nodes {
                return Err(ContinuationError::FrontStall(format!(
                    "node budget of {} exhausted ({} open, {} on the perimeter, {:?})",
                    self.opts.max_nodes,
                    self.open.len(),
                    self.perimeter.len(),
                    self.stats
                )));
            }
            let gaps = self.gaps(k);
            let Some(gap) = gaps.into_iter().min_by(|a, b| a.angle.total_cmp(&b.angle).then(a.end.cmp(&b.end)))
            else {
                self.mark_complete(k);
                continue;
            };
            if !self.fill(k, &gap) {
                self.state[k] = State::Boundary;
                self.open.remove(&k);
                self.stats.stuck_nodes += 1;
            }
        }
        Ok(())
    }

    fn finish(self) -> Triangulation {
        let n = self.m.n;
        let nodes = self
            .z
            .iter()
            .enumerate()
            .map(|(id, z)| Node {
                id,
                x: z[..n].to_vec(),
                lambda: [z[n], z[n + 1]],
                residual: self.residual[id],
                boundary: self.state[id] == State::Boundary,
            })
            .collect();
        let simplices = self
            .tris
            .iter()
            .enumerate()
            .map(|(id, &nodes)| Simplex { id, nodes, neighbors: Vec::new(), flag: Flag::Untested })
            .collect();
        let mut t = Triangulation {
            model: self.m.id.clone(),
            tolerances: Tolerances {
                node_tol: self.opts.node_tol,
                theta_max_deg: self.opts.theta_max_deg,
                step: self.opts.step,
                step_min: self.opts.step_min,
                step_max: self.opts.step_max,
            },
            nodes,
            simplices,
            stats: self.stats,
        };
        t.rebuild_neighbors();
        t
    }
}

/// Seven-node, six-triangle patch around the projection of `x0`.
pub fn init_hexagon(
    m: &ModelSpec,
    x0: &StatePoint,
    h: f64,
    opts: &ContinuationOptions,
) -> Result<Triangulation, ContinuationError> {
    let mut o = opts.clone();
    o.step = h;
    o.step_max = o.step_max.max(h);
    o.step_min = o.step_min.min(h);
    let mut front = Front::new(m, &o);
    front.hexagon(&x0.to_z())?;
    Ok(front.finish())
}

/// Triangulates the connected component of the equilibrium manifold that
/// contains `x0`, within `opts.region`.
pub fn continue_manifold(
    m: &ModelSpec,
    x0: &StatePoint,
    opts: &ContinuationOptions,
) -> Result<Triangulation, ContinuationError> {
    opts.validate()?;
    if x0.x.len() != m.n {
        return Err(ContinuationError::Schema(format!("seed must have {} state entries", m.n)));
    }
    let mut front = Front::new(m, opts);
    front.hexagon(&x0.to_z())?;
    front.advance()?;
    Ok(front.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_segments() {
        assert!(segments_cross((0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)));
        assert!(!segments_cross((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)));
    }

    #[test]
    fn plane_hexagon_is_regular() {
        let m = ModelSpec::by_name("plane-test").unwrap();
        let opts = ContinuationOptions::for_model(&m);
        let t = init_hexagon(&m, m.seed.as_ref().unwrap(), 0.1, &opts).unwrap();
        assert_eq!(t.nodes.len(), 7);
        assert_eq!(t.simplices.len(), 6);
        for node in &t.nodes[1..] {
            let d = linalg::norm(&node.z());
            assert!((d - 0.1).abs() < 1e-15);
            assert_eq!(node.x[0], 0.0);
        }
    }

    #[test]
    fn sphere_is_closed() {
        let m = ModelSpec::by_name("sphere-test").unwrap();
        let opts = ContinuationOptions::for_model(&m);
        let t = continue_manifold(&m, m.seed.as_ref().unwrap(), &opts).unwrap();
        assert_eq!(t.euler_characteristic(), 2, "stats {:?}", t.stats);
        assert!(t.max_residual() <= 1e-10);
        assert!(t.edges().values().all(|v| v.len() == 2));
    }

    #[test]
    fn plane_fills_region() {
        let m = ModelSpec::by_name("plane-test").unwrap();
        let opts = ContinuationOptions::for_model(&m);
        let t = continue_manifold(&m, m.seed.as_ref().unwrap(), &opts).unwrap();
        assert!(t.nodes.iter().all(|n| n.x[0] == 0.0));
        assert_eq!(t.stats.stuck_nodes, 0, "{:?}", t.stats);
        // the square [-1, 1]^2 is covered: its area is reached by triangle areas
        let area: f64 = t
            .simplices
            .iter()
            .map(|s| {
                let p: Vec<_> = s.nodes.iter().map(|&k| t.nodes[k].lambda).collect();
                0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
            })
            .sum();
        assert!(area >= 4.0, "area {area}");
        assert!(t.simplices.iter().all(|s| {
            let p: Vec<_> = s.nodes.iter().map(|&k| t.nodes[k].lambda).collect();
            (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]) > 0.0
        }));
    }
}
