//! Planar domains and conforming triangulations.
//!
//! Domains are polygons; a disk is represented by an inscribed regular
//! polygon with a configurable number of boundary segments. Meshes carry a
//! per-vertex bitmask recording boundary, slit, pole and origin vertices.

pub mod io;
mod mesher;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Point, Result};

pub use mesher::generate_mesh;

pub const FLAG_BOUNDARY: u8 = 1;
pub const FLAG_SLIT: u8 = 2;
pub const FLAG_POLE: u8 = 4;
pub const FLAG_ORIGIN: u8 = 8;

/// Default number of segments used to approximate a circular boundary.
pub const DEFAULT_DISK_SEGMENTS: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    /// Disk centred at the origin, approximated by an inscribed regular polygon.
    Disk {
        radius: f64,
        boundary_segments: usize,
    },
    /// Simple, counter-clockwise polygon.
    Polygon { vertices: Vec<Point> },
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec::Disk {
            radius: 1.0,
            boundary_segments: DEFAULT_DISK_SEGMENTS,
        }
    }

    pub fn disk(radius: f64, boundary_segments: usize) -> Result<Self> {
        let d = DomainSpec::Disk {
            radius,
            boundary_segments,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        let d = DomainSpec::Polygon { vertices };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Disk {
                radius,
                boundary_segments,
            } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidDomain(format!(
                        "disk radius {radius} must be positive"
                    )));
                }
                if *boundary_segments < 3 {
                    return Err(Error::InvalidDomain(
                        "a disk needs at least 3 boundary segments".into(),
                    ));
                }
                Ok(())
            }
            DomainSpec::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::InvalidDomain(
                        "polygon needs at least 3 vertices".into(),
                    ));
                }
                if vertices.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidDomain("non-finite polygon vertex".into()));
                }
                if signed_area(vertices) <= 0.0 {
                    return Err(Error::InvalidDomain(
                        "polygon must be positively oriented".into(),
                    ));
                }
                let n = vertices.len();
                for i in 0..n {
                    for j in i + 1..n {
                        let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                        let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                        let (r, s) = (vertices[j], vertices[(j + 1) % n]);
                        if !adjacent && segments_intersect(p, q, r, s) {
                            return Err(Error::InvalidDomain(format!(
                                "polygon edges {i} and {j} intersect"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Boundary polygon, counter-clockwise.
    pub fn boundary(&self) -> Vec<Point> {
        match self {
            DomainSpec::Disk {
                radius,
                boundary_segments,
            } => (0..*boundary_segments)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / *boundary_segments as f64;
                    [radius * t.cos(), radius * t.sin()]
                })
                .collect(),
            DomainSpec::Polygon { vertices } => vertices.clone(),
        }
    }

    /// Area of the polygonal domain actually meshed.
    pub fn area(&self) -> f64 {
        signed_area(&self.boundary())
    }

    /// Strict interior test.
    pub fn contains(&self, p: Point) -> bool {
        let b = self.boundary();
        point_in_polygon(&b, p) && polyline_distance(&b, true, p) > 0.0
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        polyline_distance(&self.boundary(), true, p)
    }

    /// True when the domain is invariant under `(x1, x2) -> (x1, -x2)`.
    pub fn is_reflection_symmetric(&self) -> bool {
        match self {
            DomainSpec::Disk { .. } => true,
            DomainSpec::Polygon { vertices } => {
                let scale = vertices
                    .iter()
                    .map(|p| p[0].abs().max(p[1].abs()))
                    .fold(0.0, f64::max);
                vertices.iter().all(|p| {
                    vertices.iter().any(|q| {
                        (q[0] - p[0]).abs() <= 1e-12 * scale && (q[1] + p[1]).abs() <= 1e-12 * scale
                    })
                })
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DomainSpec::Disk {
                radius,
                boundary_segments,
            } => format!("disk(radius={radius}, segments={boundary_segments})"),
            DomainSpec::Polygon { vertices } => format!("polygon({} vertices)", vertices.len()),
        }
    }

    pub(crate) fn diameter(&self) -> f64 {
        let b = self.boundary();
        let mut d: f64 = 0.0;
        for p in &b {
            for q in &b {
                d = d.max(dist(*p, *q));
            }
        }
        d
    }
}

/// An open polyline removed from the domain (a slit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub polyline: Vec<Point>,
}

impl Obstacle {
    pub fn new(polyline: Vec<Point>) -> Result<Self> {
        let o = Obstacle { polyline };
        o.validate()?;
        Ok(o)
    }

    /// The segment joining two points.
    pub fn segment(p: Point, q: Point) -> Self {
        Obstacle {
            polyline: vec![p, q],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pl = &self.polyline;
        if pl.len() < 2 {
            return Err(Error::InvalidParameter(
                "obstacle needs at least two points".into(),
            ));
        }
        for w in pl.windows(2) {
            if dist(w[0], w[1]) == 0.0 {
                return Err(Error::InvalidParameter(
                    "obstacle has repeated points".into(),
                ));
            }
        }
        let n = pl.len() - 1;
        for i in 0..n {
            for j in i + 2..n {
                if segments_intersect(pl[i], pl[i + 1], pl[j], pl[j + 1]) {
                    return Err(Error::InvalidParameter(format!(
                        "obstacle segments {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.polyline.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    pub fn distance(&self, p: Point) -> f64 {
        polyline_distance(&self.polyline, false, p)
    }
}

/// Geometric grading towards a set of centres: the target edge length is
/// `target_h_at_center` at each centre and grows by `growth_ratio` per ring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradingPolicy {
    pub refine_centers: Vec<Point>,
    pub target_h_at_center: f64,
    pub growth_ratio: f64,
}

impl GradingPolicy {
    pub fn new(refine_centers: Vec<Point>, target_h_at_center: f64, growth_ratio: f64) -> Self {
        GradingPolicy {
            refine_centers,
            target_h_at_center,
            growth_ratio,
        }
    }

    pub fn validate(&self, h_max: f64) -> Result<()> {
        if !(self.target_h_at_center > 0.0 && self.target_h_at_center <= h_max) {
            return Err(Error::UnsatisfiableGrading(format!(
                "target size {} must lie in (0, h_max = {h_max}]",
                self.target_h_at_center
            )));
        }
        if !(self.growth_ratio > 1.0 && self.growth_ratio <= 2.0) {
            return Err(Error::UnsatisfiableGrading(format!(
                "growth ratio {} must lie in (1, 2]",
                self.growth_ratio
            )));
        }
        Ok(())
    }

    /// Target edge length at `p`, capped at `h_max`.
    pub fn size_at(&self, p: Point, h_max: f64) -> f64 {
        let d = self
            .refine_centers
            .iter()
            .map(|c| dist(*c, p))
            .fold(f64::INFINITY, f64::min);
        if d.is_finite() {
            (self.target_h_at_center + (self.growth_ratio - 1.0) * d).min(h_max)
        } else {
            h_max
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedVertices {
    pub pole_minus: Option<usize>,
    pub pole_plus: Option<usize>,
    pub origin: Option<usize>,
}

/// Conforming triangulation. Triangles are counter-clockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub flags: Vec<u8>,
    pub marked: MarkedVertices,
    /// Longest edge.
    pub h_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshQuality {
    pub min_angle: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub vertex_count: usize,
    pub triangle_count: usize,
}

impl Mesh {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, flags: Vec<u8>) -> Result<Self> {
        if flags.len() != vertices.len() {
            return Err(Error::Meshing(
                "flag count differs from vertex count".into(),
            ));
        }
        let mut marked = MarkedVertices::default();
        for (i, &f) in flags.iter().enumerate() {
            if f & FLAG_ORIGIN != 0 {
                marked.origin = Some(i);
            }
            if f & FLAG_POLE != 0 {
                let x = vertices[i][0];
                if x < 0.0 {
                    marked.pole_minus = Some(i);
                } else {
                    marked.pole_plus = Some(i);
                }
            }
        }
        let mut mesh = Mesh {
            vertices,
            triangles,
            flags,
            marked,
            h_max: 0.0,
        };
        mesh.h_max = mesh.edge_length_range().1;
        Ok(mesh)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.flags[v] & FLAG_BOUNDARY != 0
    }

    pub fn is_slit(&self, v: usize) -> bool {
        self.flags[v] & FLAG_SLIT != 0
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        tri_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Index of the vertex located at `p` (within `tol`), if any.
    pub fn find_vertex(&self, p: Point, tol: f64) -> Option<usize> {
        self.vertices.iter().position(|q| dist(*q, p) <= tol)
    }

    /// All vertices located at `p` (slit duplicates share coordinates).
    pub fn find_vertices(&self, p: Point, tol: f64) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| dist(self.vertices[i], p) <= tol)
            .collect()
    }

    /// Undirected edges `(i, j)` with `i < j`, mapped to the number of
    /// triangles sharing them.
    pub fn edge_counts(&self) -> HashMap<(usize, usize), u8> {
        let mut m = HashMap::with_capacity(self.triangles.len() * 2);
        for t in &self.triangles {
            for k in 0..3 {
                let (i, j) = (t[k], t[(k + 1) % 3]);
                *m.entry((i.min(j), i.max(j))).or_insert(0) += 1;
            }
        }
        m
    }

    /// Undirected edges in deterministic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.edge_counts().into_keys().collect();
        e.sort_unstable();
        e
    }

    /// Shortest and longest edge length.
    pub fn edge_length_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for t in &self.triangles {
            for k in 0..3 {
                let l = dist(self.vertices[t[k]], self.vertices[t[(k + 1) % 3]]);
                lo = lo.min(l);
                hi = hi.max(l);
            }
        }
        (lo, hi)
    }

    /// Checks orientation and conformity.
    pub fn check(&self) -> Result<()> {
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::Meshing(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(Error::DegenerateTriangle(t));
            }
        }
        for (&(i, j), &c) in &self.edge_counts() {
            if c > 2 {
                return Err(Error::Meshing(format!(
                    "edge ({i}, {j}) shared by {c} triangles"
                )));
            }
        }
        Ok(())
    }

    /// Incident triangles per vertex.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut vt = vec![Vec::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                vt[v].push(t);
            }
        }
        vt
    }
}

/// Splits every triangle into four by joining edge midpoints.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let counts = mesh.edge_counts();
    let mut vertices = mesh.vertices.clone();
    let mut flags = mesh.flags.clone();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::with_capacity(counts.len());
    let mut triangles = Vec::with_capacity(mesh.triangles.len() * 4);
    let mut mid = |i: usize, j: usize, vertices: &mut Vec<Point>, flags: &mut Vec<u8>| -> usize {
        let key = (i.min(j), i.max(j));
        *midpoint.entry(key).or_insert_with(|| {
            let (p, q) = (vertices[i], vertices[j]);
            vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            let single = counts[&key] == 1;
            let mut f = 0;
            if single && flags[i] & FLAG_BOUNDARY != 0 && flags[j] & FLAG_BOUNDARY != 0 {
                f |= FLAG_BOUNDARY;
            }
            if single && flags[i] & FLAG_SLIT != 0 && flags[j] & FLAG_SLIT != 0 {
                f |= FLAG_SLIT;
            }
            flags.push(f);
            vertices.len() - 1
        })
    };
    for &[a, b, c] in &mesh.triangles {
        let ab = mid(a, b, &mut vertices, &mut flags);
        let bc = mid(b, c, &mut vertices, &mut flags);
        let ca = mid(c, a, &mut vertices, &mut flags);
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    let mut out = Mesh {
        vertices,
        triangles,
        flags,
        marked: mesh.marked,
        h_max: 0.0,
    };
    out.h_max = out.edge_length_range().1;
    out
}

pub fn mesh_quality(mesh: &Mesh) -> MeshQuality {
    let mut min_angle = f64::INFINITY;
    for t in &mesh.triangles {
        let p = [
            mesh.vertices[t[0]],
            mesh.vertices[t[1]],
            mesh.vertices[t[2]],
        ];
        for k in 0..3 {
            let o = p[k];
            let u = sub(p[(k + 1) % 3], o);
            let v = sub(p[(k + 2) % 3], o);
            let ang = cross(u, v).abs().atan2(dot(u, v));
            min_angle = min_angle.min(ang.to_degrees());
        }
    }
    let (h_min, h_max) = mesh.edge_length_range();
    MeshQuality {
        min_angle,
        h_max,
        h_min,
        vertex_count: mesh.vertices.len(),
        triangle_count: mesh.triangles.len(),
    }
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn tri_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

pub(crate) fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    0.5 * (0..n)
        .map(|i| cross(poly[i], poly[(i + 1) % n]))
        .sum::<f64>()
}

pub(crate) fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 {
        (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

pub(crate) fn polyline_distance(pl: &[Point], closed: bool, p: Point) -> f64 {
    let n = pl.len();
    let segs = if closed { n } else { n.saturating_sub(1) };
    (0..segs)
        .map(|i| point_segment_distance(p, pl[i], pl[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Distance from `p` to the closed triangle, zero inside.
pub(crate) fn point_triangle_distance(p: Point, t: [Point; 3]) -> f64 {
    let s = [
        tri_area(t[0], t[1], p),
        tri_area(t[1], t[2], p),
        tri_area(t[2], t[0], p),
    ];
    let orient = tri_area(t[0], t[1], t[2]).signum();
    if s.iter().all(|x| x * orient >= 0.0) {
        return 0.0;
    }
    (0..3)
        .map(|i| point_segment_distance(p, t[i], t[(i + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn point_in_polygon(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Closed-segment intersection test (touching counts).
pub(crate) fn segments_intersect(p: Point, q: Point, r: Point, s: Point) -> bool {
    let o = |a: Point, b: Point, c: Point| cross(sub(b, a), sub(c, a));
    let on = |a: Point, b: Point, c: Point| {
        c[0] >= a[0].min(b[0])
            && c[0] <= a[0].max(b[0])
            && c[1] >= a[1].min(b[1])
            && c[1] <= a[1].max(b[1])
    };
    let (d1, d2, d3, d4) = (o(r, s, p), o(r, s, q), o(p, q, r), o(p, q, s));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on(r, s, p))
        || (d2 == 0.0 && on(r, s, q))
        || (d3 == 0.0 && on(p, q, r))
        || (d4 == 0.0 && on(p, q, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> DomainSpec {
        DomainSpec::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn square_with_large_h_is_two_triangles() {
        let mesh = generate_mesh(&unit_square(), None, None, 10.0, None).unwrap();
        assert_eq!(mesh.triangle_count(), 2);
        assert_eq!(mesh.vertex_count(), 4);
        assert_eq!(
            mesh.marked.origin.map(|o| mesh.vertices[o]),
            Some([0.0, 0.0])
        );
        let q = mesh_quality(&mesh);
        assert!((q.min_angle - 45.0).abs() < 1e-12);
        assert!(mesh.flags.iter().all(|f| f & FLAG_BOUNDARY != 0));
    }

    #[test]
    fn refine_splits_each_triangle_in_four() {
        let mesh = generate_mesh(&unit_square(), None, None, 10.0, None).unwrap();
        let fine = refine_uniform(&mesh);
        assert_eq!(fine.triangle_count(), 8);
        let interior: Vec<_> = (0..fine.vertex_count())
            .filter(|&v| !fine.is_boundary(v))
            .collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(fine.vertices[interior[0]], [0.5, 0.5]);
        assert_eq!(fine.vertices[fine.marked.origin.unwrap()], [0.0, 0.0]);
        let finer = refine_uniform(&fine);
        assert_eq!(finer.triangle_count(), 4 * fine.triangle_count());
        assert!((mesh_quality(&finer).min_angle - 45.0).abs() < 1e-12);
        finer.check().unwrap();
    }

    #[test]
    fn equilateral_triangle_quality() {
        let h = 3f64.sqrt() / 2.0;
        let mesh = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.5, h]],
            vec![[0, 1, 2]],
            vec![FLAG_BOUNDARY; 3],
        )
        .unwrap();
        let q = mesh_quality(&mesh);
        assert!((q.min_angle - 60.0).abs() < 1e-9);
        assert_eq!(q.triangle_count, 1);
        assert!((q.h_max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_validation() {
        assert!(DomainSpec::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(DomainSpec::polygon(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(DomainSpec::disk(0.0, 16).is_err());
        assert!(unit_square().area() == 1.0);
    }

    #[test]
    fn reflection_symmetry() {
        assert!(DomainSpec::unit_disk().is_reflection_symmetric());
        assert!(!unit_square().is_reflection_symmetric());
        let sym =
            DomainSpec::polygon(vec![[-1.0, -1.0], [2.0, -1.0], [2.0, 1.0], [-1.0, 1.0]]).unwrap();
        assert!(sym.is_reflection_symmetric());
    }
}
