//! Nodal sets of magnetic-real eigenfunctions as planar graphs.
//!
//! The field is read on each mesh edge through the gauge-invariant product
//! `Re(conj(u_j) u_k e^{-i∫A})`, so a sign change is detected identically on
//! either side of the phase cut. Interior vertices where the field vanishes
//! (the poles in particular) are kept as zero vertices; their degree is the
//! number of nodal arcs leaving them.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{dist, polyline_distance, Mesh, Obstacle, FLAG_BOUNDARY, FLAG_SLIT};
use crate::potential::{phase_psi, PoleConfig, VectorPotential};
use crate::{Error, Point, Result};

/// Largest allowed ratio of the imaginary to the total mass norm after
/// removing the gauge phase.
pub const REAL_PART_TOLERANCE: f64 = 1e-4;

/// Values below this fraction of the maximum count as zero.
const ZERO_FRACTION: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Pole,
    Crossing,
    Endpoint,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Pole => "pole",
            NodeKind::Crossing => "crossing",
            NodeKind::Endpoint => "endpoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalNode {
    pub position: Point,
    pub degree: usize,
    pub kind: NodeKind,
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalEdge {
    pub nodes: [usize; 2],
    /// Points from the first node to the second, both included.
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalGraph {
    pub nodes: Vec<NodalNode>,
    pub edges: Vec<NodalEdge>,
    /// Number of connected components.
    pub b1: usize,
    /// Number of faces, the unbounded one included.
    pub mu: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalStats {
    pub d_a: f64,
    pub single_arc: bool,
    pub log_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Pt {
    Cross(usize, usize),
    Zero(usize),
    /// Zero boundary vertex; each arc reaching it gets its own endpoint.
    Wall(usize, usize),
}

#[derive(Clone, Copy, PartialEq)]
enum Class {
    Value,
    Zero,
    Wall,
}

/// Nodal set of a real field given at the mesh vertices.
pub fn extract_real_field(mesh: &Mesh, values: &[f64]) -> Result<NodalGraph> {
    extract_core(mesh, values, &|_, _| 1.0)
}

/// Nodal set of a magnetic-real field `w` given at the mesh vertices.
pub fn extract_nodal_set(mesh: &Mesh, w: &[Complex64], config: &PoleConfig) -> Result<NodalGraph> {
    if w.len() != mesh.vertex_count() {
        return Err(Error::InvalidParameter(
            "one value per mesh vertex expected".into(),
        ));
    }
    let scale = mesh
        .vertices
        .iter()
        .fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let frame: Vec<Complex64> = mesh
        .vertices
        .iter()
        .map(|&p| match phase_psi(config, p) {
            Ok(psi) => Ok(Complex64::from_polar(1.0, psi)),
            Err(Error::OnCut(..)) => phase_psi(config, [p[0], p[1] + 1e-9 * scale])
                .map(|psi| Complex64::from_polar(1.0, psi)),
            Err(Error::AtPole(..)) => Ok(Complex64::new(1.0, 0.0)),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let lumped = lumped_mass(mesh);
    let mut total = 0.0;
    let mut imag = 0.0;
    let mut real = Vec::with_capacity(w.len());
    for ((x, f), m) in w.iter().zip(&frame).zip(&lumped) {
        let r = f.conj() * x;
        total += m * x.norm_sqr();
        imag += m * r.im * r.im;
        real.push(r.re);
    }
    if !(total > 0.0) {
        return Err(Error::ZeroVector);
    }
    let ratio = (imag / total).sqrt();
    if ratio > REAL_PART_TOLERANCE {
        return Err(Error::NotAligned(format!(
            "imaginary part carries {ratio:.2e} of the mass norm"
        )));
    }
    let sigma = |j: usize, k: usize| {
        let (p, q) = (mesh.vertices[j], mesh.vertices[k]);
        (frame[j].conj() * frame[k] * Complex64::from_polar(1.0, -config.edge_circulation(p, q))).re
    };
    extract_core(mesh, &real, &sigma)
}

fn lumped_mass(mesh: &Mesh) -> Vec<f64> {
    let mut m = vec![0.0; mesh.vertex_count()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let a = mesh.triangle_area(t) / 3.0;
        for &v in tri {
            m[v] += a;
        }
    }
    m
}

fn extract_core(mesh: &Mesh, r: &[f64], sigma: &dyn Fn(usize, usize) -> f64) -> Result<NodalGraph> {
    if r.len() != mesh.vertex_count() {
        return Err(Error::InvalidParameter(
            "one value per mesh vertex expected".into(),
        ));
    }
    let max = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(max > 0.0) {
        return Err(Error::ZeroVector);
    }
    let tol = ZERO_FRACTION * max;
    let class: Vec<Class> = (0..r.len())
        .map(|v| {
            if r[v].abs() > tol {
                Class::Value
            } else if mesh.flags[v] & (FLAG_BOUNDARY | FLAG_SLIT) != 0 {
                Class::Wall
            } else {
                Class::Zero
            }
        })
        .collect();
    let crosses = |j: usize, k: usize| {
        class[j] == Class::Value && class[k] == Class::Value && r[j] * r[k] * sigma(j, k) < 0.0
    };
    let cross = |j: usize, k: usize| Pt::Cross(j.min(k), j.max(k));

    let mut segments: Vec<(Pt, Pt)> = Vec::new();
    let mut zero_edges: HashMap<(usize, usize), ()> = HashMap::new();
    let mut wall_count = 0usize;
    let zero_pt = |v: usize, wall_count: &mut usize| match class[v] {
        Class::Wall => {
            *wall_count += 1;
            Pt::Wall(v, *wall_count)
        }
        _ => Pt::Zero(v),
    };
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let zeros: Vec<usize> = tri
            .iter()
            .copied()
            .filter(|&v| class[v] != Class::Value)
            .collect();
        let vals: Vec<usize> = tri
            .iter()
            .copied()
            .filter(|&v| class[v] == Class::Value)
            .collect();
        match zeros.len() {
            0 => {
                let e: Vec<Pt> = [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])]
                    .into_iter()
                    .filter(|&(j, k)| crosses(j, k))
                    .map(|(j, k)| cross(j, k))
                    .collect();
                match e.len() {
                    0 => {}
                    2 => segments.push((e[0], e[1])),
                    n => return Err(Error::Nodal(format!("triangle {t} has {n} sign changes"))),
                }
            }
            1 => {
                if crosses(vals[0], vals[1]) {
                    let z = zero_pt(zeros[0], &mut wall_count);
                    segments.push((z, cross(vals[0], vals[1])));
                }
            }
            2 => {
                let (a, b) = (zeros[0].min(zeros[1]), zeros[0].max(zeros[1]));
                if class[a] == Class::Wall && class[b] == Class::Wall {
                    continue;
                }
                if zero_edges.insert((a, b), ()).is_none() {
                    let pa = zero_pt(a, &mut wall_count);
                    let pb = zero_pt(b, &mut wall_count);
                    segments.push((pa, pb));
                }
            }
            _ => {}
        }
    }

    let position = |p: Pt| -> Point {
        match p {
            Pt::Zero(v) | Pt::Wall(v, _) => mesh.vertices[v],
            Pt::Cross(j, k) => {
                let t = r[j].abs() / (r[j].abs() + r[k].abs());
                let (a, b) = (mesh.vertices[j], mesh.vertices[k]);
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            }
        }
    };
    let poles = [mesh.marked.pole_minus, mesh.marked.pole_plus];
    let is_pole = |p: Pt| matches!(p, Pt::Zero(v) if poles.contains(&Some(v)));
    build_graph(&segments, &position, &is_pole)
}

/// Assembles polylines, components and faces from an unordered segment soup.
fn build_graph(
    segments: &[(Pt, Pt)],
    position: &dyn Fn(Pt) -> Point,
    is_pole: &dyn Fn(Pt) -> bool,
) -> Result<NodalGraph> {
    let mut ids: HashMap<Pt, usize> = HashMap::new();
    let mut pts: Vec<Pt> = Vec::new();
    let mut adj: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut id = |p: Pt, pts: &mut Vec<Pt>, adj: &mut Vec<Vec<(usize, usize)>>| {
        *ids.entry(p).or_insert_with(|| {
            pts.push(p);
            adj.push(Vec::new());
            pts.len() - 1
        })
    };
    let mut seg_ends = Vec::with_capacity(segments.len());
    for (s, &(a, b)) in segments.iter().enumerate() {
        let (ia, ib) = (id(a, &mut pts, &mut adj), id(b, &mut pts, &mut adj));
        adj[ia].push((ib, s));
        adj[ib].push((ia, s));
        seg_ends.push((ia, ib));
    }
    let np = pts.len();
    let pos: Vec<Point> = pts.iter().map(|&p| position(p)).collect();
    let mut node_of = vec![usize::MAX; np];
    let mut nodes: Vec<NodalNode> = Vec::new();
    let add_node =
        |i: usize, kind: NodeKind, node_of: &mut Vec<usize>, nodes: &mut Vec<NodalNode>| {
            node_of[i] = nodes.len();
            nodes.push(NodalNode {
                position: pos[i],
                degree: adj[i].len(),
                kind,
                component: 0,
            });
        };
    for i in 0..np {
        let d = adj[i].len();
        if is_pole(pts[i]) {
            add_node(i, NodeKind::Pole, &mut node_of, &mut nodes);
        } else if d == 1 {
            add_node(i, NodeKind::Endpoint, &mut node_of, &mut nodes);
        } else if d != 2 {
            add_node(i, NodeKind::Crossing, &mut node_of, &mut nodes);
        }
    }

    let mut used = vec![false; segments.len()];
    let mut edges: Vec<NodalEdge> = Vec::new();
    let trace = |start: usize,
                 first: (usize, usize),
                 used: &mut Vec<bool>,
                 node_of: &Vec<usize>|
     -> (Vec<usize>, usize) {
        let mut path = vec![start];
        let (mut cur, mut seg) = first;
        loop {
            used[seg] = true;
            path.push(cur);
            if node_of[cur] != usize::MAX {
                return (path, cur);
            }
            let next = adj[cur].iter().copied().find(|&(_, s)| !used[s]);
            match next {
                Some((n, s)) => {
                    cur = n;
                    seg = s;
                }
                None => return (path, cur),
            }
        }
    };
    let node_points: Vec<usize> = (0..np).filter(|&i| node_of[i] != usize::MAX).collect();
    for &i in &node_points {
        for k in 0..adj[i].len() {
            let (n, s) = adj[i][k];
            if used[s] {
                continue;
            }
            let (path, end) = trace(i, (n, s), &mut used, &node_of);
            if node_of[end] == usize::MAX {
                return Err(Error::Nodal("polyline ended away from a node".into()));
            }
            edges.push(NodalEdge {
                nodes: [node_of[i], node_of[end]],
                points: path.iter().map(|&p| pos[p]).collect(),
            });
        }
    }
    // closed loops without nodes get one artificial crossing node
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let i = seg_ends[s].0;
        add_node(i, NodeKind::Crossing, &mut node_of, &mut nodes);
        let first = adj[i]
            .iter()
            .copied()
            .find(|&(_, t)| !used[t])
            .expect("unused segment at loop start");
        let (path, end) = trace(i, first, &mut used, &node_of);
        if end != i {
            return Err(Error::Nodal("loop did not close".into()));
        }
        edges.push(NodalEdge {
            nodes: [node_of[i], node_of[i]],
            points: path.iter().map(|&p| pos[p]).collect(),
        });
    }

    // components
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for e in &edges {
        let (a, b) = (root(&mut parent, e.nodes[0]), root(&mut parent, e.nodes[1]));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut comp_ids: HashMap<usize, usize> = HashMap::new();
    for n in 0..nodes.len() {
        let r = root(&mut parent, n);
        let next = comp_ids.len();
        nodes[n].component = *comp_ids.entry(r).or_insert(next);
    }
    let b1 = comp_ids.len();
    let orbits = count_face_orbits(&nodes, &edges);
    let mu = if b1 == 0 { 1 } else { orbits + 1 - b1 };
    Ok(NodalGraph {
        nodes,
        edges,
        b1,
        mu,
    })
}

/// Face orbits of the rotation system, summed over components.
fn count_face_orbits(nodes: &[NodalNode], edges: &[NodalEdge]) -> usize {
    // ends[v]: (angle, edge, end) sorted counter-clockwise
    let mut ends: Vec<Vec<(f64, usize, usize)>> = vec![Vec::new(); nodes.len()];
    for (e, edge) in edges.iter().enumerate() {
        for end in 0..2 {
            let v = edge.nodes[end];
            let p = nodes[v].position;
            let seq: Box<dyn Iterator<Item = &Point>> = if end == 0 {
                Box::new(edge.points.iter().skip(1))
            } else {
                Box::new(edge.points.iter().rev().skip(1))
            };
            let q = seq
                .copied()
                .find(|q| dist(*q, p) > 0.0)
                .unwrap_or([p[0] + 1.0, p[1]]);
            ends[v].push(((q[1] - p[1]).atan2(q[0] - p[0]), e, end));
        }
    }
    for l in ends.iter_mut() {
        l.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    }
    let mut slot: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (v, l) in ends.iter().enumerate() {
        for (i, &(_, e, end)) in l.iter().enumerate() {
            slot.insert((e, end), (v, i));
        }
    }
    // dart (e, end): leaves the node at `end` along edge e
    let mut seen: HashMap<(usize, usize), bool> = HashMap::new();
    let mut orbits = 0;
    for e in 0..edges.len() {
        for end in 0..2 {
            if seen.contains_key(&(e, end)) {
                continue;
            }
            orbits += 1;
            let (mut ce, mut cend) = (e, end);
            while seen.insert((ce, cend), true).is_none() {
                let arrive = 1 - cend;
                let (v, i) = slot[&(ce, arrive)];
                let l = &ends[v];
                let (_, ne, nend) = l[(i + 1) % l.len()];
                ce = ne;
                cend = nend;
            }
        }
    }
    orbits
}

impl NodalGraph {
    /// `μ − b₁ − Σ(ν/2 − 1) − 1`, zero for a consistent planar graph.
    pub fn euler_check(&self) -> i64 {
        let twice_sum: i64 = self.nodes.iter().map(|n| n.degree as i64 - 2).sum();
        debug_assert!(twice_sum % 2 == 0);
        self.mu as i64 - self.b1 as i64 - twice_sum / 2 - 1
    }

    /// Nodes violating the degree parity rule: odd at poles, even at crossings.
    pub fn parity_violations(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| {
                let n = &self.nodes[i];
                match n.kind {
                    NodeKind::Pole => n.degree % 2 == 0,
                    NodeKind::Crossing => n.degree % 2 == 1 || n.degree < 2,
                    NodeKind::Endpoint => n.degree != 1,
                }
            })
            .collect()
    }

    fn pole_nodes(&self, config: &PoleConfig) -> Result<(usize, usize)> {
        let find = |p: Point| {
            self.nodes
                .iter()
                .position(|n| n.kind == NodeKind::Pole && n.position == p)
                .ok_or_else(|| {
                    Error::Nodal(format!("pole ({}, {}) is not on the nodal set", p[0], p[1]))
                })
        };
        Ok((find(config.minus())?, find(config.plus())?))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                s,
                "node {i} {} {} {} {}",
                n.position[0],
                n.position[1],
                n.degree,
                n.kind.as_str()
            );
        }
        for (i, e) in self.edges.iter().enumerate() {
            let _ = writeln!(
                s,
                "edge {i} {} {} {}",
                e.nodes[0],
                e.nodes[1],
                e.points.len()
            );
            for p in &e.points {
                let _ = writeln!(s, "{} {}", p[0], p[1]);
            }
        }
        s
    }

    /// The nodal set drawn over the outline of `mesh`.
    pub fn to_svg(&self, mesh: &Mesh) -> String {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &mesh.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let size = 600.0;
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
        let map = |p: Point| {
            (
                20.0 + (p[0] - lo[0]) / span * size,
                20.0 + (hi[1] - p[1]) / span * size,
            )
        };
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="0 0 {w} {w}">"#,
            w = size + 40.0
        );
        let _ = writeln!(s, r##"<g stroke="#888" stroke-width="1">"##);
        for ((i, j), c) in mesh.edge_counts() {
            if c == 1 {
                let (a, b) = (map(mesh.vertices[i]), map(mesh.vertices[j]));
                let _ = writeln!(
                    s,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                    a.0, a.1, b.0, b.1
                );
            }
        }
        let _ = writeln!(s, "</g>");
        for e in &self.edges {
            let pts: Vec<String> = e
                .points
                .iter()
                .map(|&p| {
                    let (x, y) = map(p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                s,
                r##"<polyline fill="none" stroke="#c00" stroke-width="2" points="{}"/>"##,
                pts.join(" ")
            );
        }
        for n in &self.nodes {
            let (x, y) = map(n.position);
            let color = match n.kind {
                NodeKind::Pole => "#00c",
                NodeKind::Crossing => "#080",
                NodeKind::Endpoint => "#000",
            };
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Diameter of the component holding both poles, and the single-arc test.
pub fn nodal_stats(graph: &NodalGraph, config: &PoleConfig) -> Result<NodalStats> {
    let (m, p) = graph.pole_nodes(config)?;
    let comp = graph.nodes[m].component;
    if graph.nodes[p].component != comp {
        return Err(Error::Nodal(
            "the poles lie on different nodal components".into(),
        ));
    }
    let mut pts: Vec<Point> = Vec::new();
    let mut comp_edges = 0;
    for e in &graph.edges {
        if graph.nodes[e.nodes[0]].component == comp {
            comp_edges += 1;
            pts.extend(e.points.iter().copied());
        }
    }
    let mut d_a: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d_a = d_a.max(dist(pts[i], pts[j]));
        }
    }
    let comp_nodes = graph.nodes.iter().filter(|n| n.component == comp).count();
    let single_arc = comp_edges == 1
        && comp_nodes == 2
        && graph.nodes[m].degree == 1
        && graph.nodes[p].degree == 1;
    let log_ratio = config.a().ln().abs() / d_a.ln().abs();
    Ok(NodalStats {
        d_a,
        single_arc,
        log_ratio,
    })
}

/// The arc joining the poles, oriented from `a⁻` to `a⁺`, as a slit.
pub fn export_curve(graph: &NodalGraph, config: &PoleConfig) -> Result<Obstacle> {
    let stats = nodal_stats(graph, config)?;
    if !stats.single_arc {
        return Err(Error::Nodal(
            "the nodal set near the poles is not a single arc".into(),
        ));
    }
    let (m, _) = graph.pole_nodes(config)?;
    let edge = graph
        .edges
        .iter()
        .find(|e| e.nodes.contains(&m))
        .ok_or_else(|| Error::Nodal("pole without an arc".into()))?;
    let mut pts = edge.points.clone();
    if edge.nodes[0] != m {
        pts.reverse();
    }
    pts.dedup();
    let n = pts.len();
    pts[0] = config.minus();
    pts[n - 1] = config.plus();
    Obstacle::new(pts)
}

/// Hausdorff distance between two polylines, sampled at their vertices and
/// measured to the other polyline's segments.
pub fn hausdorff(a: &[Point], b: &[Point]) -> f64 {
    let one = |x: &[Point], y: &[Point]| {
        x.iter()
            .fold(0.0f64, |m, &p| m.max(polyline_distance(y, false, p)))
    };
    one(a, b).max(one(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Structured mesh of `[-1, 1]²` with `n` cells per side (n even) and
    /// diagonals pointing away from the origin.
    pub(crate) fn grid(n: usize) -> Mesh {
        let mut v = Vec::new();
        let mut flags = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                v.push([
                    -1.0 + 2.0 * i as f64 / n as f64,
                    -1.0 + 2.0 * j as f64 / n as f64,
                ]);
                flags.push(if i == 0 || j == 0 || i == n || j == n {
                    FLAG_BOUNDARY
                } else {
                    0
                });
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut t = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if (2 * i + 1 < n) == (2 * j + 1 < n) {
                    t.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    t.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                } else {
                    t.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                    t.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
        }
        Mesh::new(v, t, flags).unwrap()
    }

    #[test]
    fn linear_field_gives_one_line() {
        let m = grid(6);
        let vals: Vec<f64> = m.vertices.iter().map(|p| p[0] + 0.01).collect();
        let g = extract_real_field(&m, &vals).unwrap();
        assert_eq!((g.b1, g.mu, g.edges.len()), (1, 1, 1));
        assert_eq!(g.euler_check(), 0);
        for p in &g.edges[0].points {
            assert!((p[0] + 0.01).abs() < 1e-12);
        }
    }

    #[test]
    fn saddle_has_degree_four() {
        let m = grid(8);
        let vals: Vec<f64> = m.vertices.iter().map(|p| p[0] * p[1]).collect();
        let g = extract_real_field(&m, &vals).unwrap();
        let centre: Vec<&NodalNode> = g
            .nodes
            .iter()
            .filter(|n| n.position == [0.0, 0.0])
            .collect();
        assert_eq!(centre.len(), 1);
        assert_eq!(centre[0].degree, 4);
        assert_eq!(centre[0].kind, NodeKind::Crossing);
        assert_eq!(g.edges.len(), 4);
        assert_eq!(
            g.nodes
                .iter()
                .filter(|n| n.kind == NodeKind::Endpoint)
                .count(),
            4
        );
        assert_eq!(g.euler_check(), 0);
        assert!(g.parity_violations().is_empty());
    }

    #[test]
    fn closed_loop_gets_an_artificial_node() {
        let m = grid(10);
        let vals: Vec<f64> = m
            .vertices
            .iter()
            .map(|p| p[0] * p[0] + p[1] * p[1] - 0.37)
            .collect();
        let g = extract_real_field(&m, &vals).unwrap();
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.nodes[0].degree, 2);
        assert_eq!((g.b1, g.mu), (1, 2));
        assert_eq!(g.euler_check(), 0);
    }

    #[test]
    fn text_export_lists_nodes_and_edges() {
        let m = grid(4);
        let vals: Vec<f64> = m.vertices.iter().map(|p| p[1] - 0.1).collect();
        let g = extract_real_field(&m, &vals).unwrap();
        let t = g.to_text();
        assert!(t.starts_with("node 0 "));
        assert!(t.contains("edge 0 "));
        assert!(g.to_svg(&m).contains("<polyline"));
    }
}
