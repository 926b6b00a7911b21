//! Graded constrained-Delaunay mesher.
//!
//! Seed points are laid out in rings around each grading centre and on a
//! triangular lattice elsewhere, thinned against a size field, then
//! triangulated with the boundary and slit as constraint edges. Delaunay
//! refinement (spade) enforces the angle bound. Slits are opened afterwards
//! by duplicating their interior vertices.

use std::collections::{HashMap, HashSet};

use spade::handles::FixedVertexHandle;
use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation,
};

use super::{
    dist, point_segment_distance, polyline_distance, segments_intersect, tri_area, DomainSpec,
    GradingPolicy, MarkedVertices, Mesh, Obstacle, FLAG_BOUNDARY, FLAG_ORIGIN, FLAG_POLE,
    FLAG_SLIT,
};
use crate::{Error, Point, Result};

/// Angle bound requested from the refiner; the contract is 20 degrees.
const REFINE_ANGLE_DEG: f64 = 25.0;
const MAX_SEED_POINTS: f64 = 4.0e6;

pub fn generate_mesh(
    domain: &DomainSpec,
    poles: Option<[Point; 2]>,
    obstacle: Option<&Obstacle>,
    h_max: f64,
    grading: Option<&GradingPolicy>,
) -> Result<Mesh> {
    domain.validate()?;
    if !(h_max.is_finite() && h_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "h_max = {h_max} must be positive"
        )));
    }
    if let Some(g) = grading {
        g.validate(h_max)?;
    }
    let boundary = domain.boundary();
    let diam = domain.diameter();
    let size = |p: Point| grading.map_or(h_max, |g| g.size_at(p, h_max));
    estimate_vertex_budget(domain, grading, h_max)?;

    let mut forced: Vec<Point> = Vec::new();
    if let Some(pp) = poles {
        for p in pp {
            if !domain.contains(p) || domain.distance_to_boundary(p) <= 1e-12 * diam {
                return Err(Error::PoleOnBoundary(p[0], p[1]));
            }
            forced.push(p);
        }
        if dist(pp[0], pp[1]) == 0.0 {
            return Err(Error::InvalidParameter("poles coincide".into()));
        }
    }
    let origin = [0.0, 0.0];
    let origin_on_boundary_vertex = boundary.contains(&origin);
    if domain.contains(origin) {
        forced.push(origin);
    }

    let slit = match obstacle {
        Some(o) => Some(prepare_obstacle(o, domain, poles, &forced, &size, diam)?),
        None => None,
    };

    // fixed points: boundary, slit, forced vertices
    let mut fixed: Vec<Point> = Vec::new();
    let mut boundary_chain: Vec<usize> = Vec::new();
    for i in 0..boundary.len() {
        let (p, q) = (boundary[i], boundary[(i + 1) % boundary.len()]);
        boundary_chain.push(fixed.len());
        fixed.push(p);
        for m in subdivide(p, q, &size) {
            boundary_chain.push(fixed.len());
            fixed.push(m);
        }
    }
    let mut slit_chain: Vec<usize> = Vec::new();
    if let Some(s) = &slit {
        for (i, w) in s.windows(2).enumerate() {
            if i == 0 {
                slit_chain.push(fixed.len());
                fixed.push(w[0]);
            }
            for m in subdivide(w[0], w[1], &size) {
                slit_chain.push(fixed.len());
                fixed.push(m);
            }
            slit_chain.push(fixed.len());
            fixed.push(w[1]);
        }
    }
    for p in &forced {
        if !fixed.contains(p) {
            fixed.push(*p);
        }
    }

    let mut seeds = seed_points(
        domain,
        &boundary,
        slit.as_deref(),
        grading,
        h_max,
        &fixed,
        &size,
    );
    // Without a slit the refiner can skip faces outside the boundary. A slit
    // breaks its inside/outside peeling, so outer faces are refined too; on
    // polygons an axis-aligned frame keeps those faces well shaped.
    let exclude_outer = slit.is_none();
    if !exclude_outer && matches!(domain, DomainSpec::Polygon { .. }) {
        seeds.extend(frame_points(&boundary, h_max));
    }

    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::new();
    let mut handles: Vec<FixedVertexHandle> = Vec::with_capacity(fixed.len() + seeds.len());
    for p in fixed.iter().chain(seeds.iter()) {
        let h = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| Error::Meshing(format!("insertion failed: {e:?}")))?;
        handles.push(h);
    }
    let chain_constraints =
        |chain: &[usize], closed: bool, cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>| {
            let n = chain.len();
            let m = if closed { n } else { n - 1 };
            for k in 0..m {
                let (a, b) = (handles[chain[k]], handles[chain[(k + 1) % n]]);
                if a != b && !cdt.can_add_constraint(a, b) {
                    return Err(Error::Meshing("constraint edges intersect".into()));
                }
                cdt.add_constraint(a, b);
            }
            Ok(())
        };
    chain_constraints(&boundary_chain, true, &mut cdt)?;
    if !slit_chain.is_empty() {
        chain_constraints(&slit_chain, false, &mut cdt)?;
    }

    let max_area = 0.4 * h_max * h_max;
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(REFINE_ANGLE_DEG))
        .with_max_allowed_area(max_area)
        .exclude_outer_faces(exclude_outer)
        .with_max_additional_vertices(10 * cdt.num_vertices() + 10_000);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(Error::Meshing(
            "Delaunay refinement ran out of vertices".into(),
        ));
    }

    // extract, compacting unused vertices
    let all: Vec<Point> = cdt
        .vertices()
        .map(|v| [v.position().x, v.position().y])
        .collect();
    let mut raw_tris: Vec<[usize; 3]> = Vec::new();
    for f in cdt.inner_faces() {
        let [a, b, c] = f.vertices().map(|v| v.fix().index());
        let centroid = [
            (all[a][0] + all[b][0] + all[c][0]) / 3.0,
            (all[a][1] + all[b][1] + all[c][1]) / 3.0,
        ];
        if !domain.contains(centroid) {
            continue;
        }
        // nearly collinear boundary points can leave zero-area slivers
        let longest = dist(all[a], all[b])
            .max(dist(all[b], all[c]))
            .max(dist(all[c], all[a]));
        if tri_area(all[a], all[b], all[c]).abs() <= 1e-12 * longest * longest {
            continue;
        }
        if tri_area(all[a], all[b], all[c]) > 0.0 {
            raw_tris.push([a, b, c]);
        } else {
            raw_tris.push([a, c, b]);
        }
    }
    let mut remap = vec![usize::MAX; all.len()];
    let mut vertices = Vec::new();
    for t in &raw_tris {
        for &v in t {
            if remap[v] == usize::MAX {
                remap[v] = usize::MAX - 1;
            }
        }
    }
    for (i, p) in all.iter().enumerate() {
        if remap[i] != usize::MAX {
            remap[i] = vertices.len();
            vertices.push(*p);
        }
    }
    let mut triangles: Vec<[usize; 3]> = raw_tris.iter().map(|t| t.map(|v| remap[v])).collect();
    for (t, tri) in triangles.iter().enumerate() {
        if tri_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]) <= 0.0 {
            return Err(Error::DegenerateTriangle(t));
        }
    }

    let mut flags = vec![0u8; vertices.len()];
    {
        let mut counts: HashMap<(usize, usize), u8> = HashMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (i, j) = (t[k], t[(k + 1) % 3]);
                *counts.entry((i.min(j), i.max(j))).or_insert(0) += 1;
            }
        }
        for (&(i, j), &c) in &counts {
            if c == 1 {
                flags[i] |= FLAG_BOUNDARY;
                flags[j] |= FLAG_BOUNDARY;
            }
        }
    }

    let tol = 1e-9 * diam;
    let find = |p: Point| vertices.iter().position(|q| dist(*q, p) <= tol);
    let mut marked = MarkedVertices::default();
    if let Some([pm, pp]) = poles {
        let (m, p) = (find(pm), find(pp));
        if m.is_none() || p.is_none() {
            return Err(Error::Meshing("pole vertex lost during meshing".into()));
        }
        marked.pole_minus = m;
        marked.pole_plus = p;
    }
    if domain.contains(origin) || origin_on_boundary_vertex {
        marked.origin = find(origin);
    }

    if let Some(s) = &slit {
        let chain = slit_vertex_chain(&vertices, s, tol)?;
        for &v in &chain {
            flags[v] |= FLAG_SLIT;
        }
        duplicate_slit(&mut vertices, &mut triangles, &mut flags, &chain)?;
    }
    for v in [marked.pole_minus, marked.pole_plus].into_iter().flatten() {
        flags[v] |= FLAG_POLE;
    }
    if let Some(o) = marked.origin {
        flags[o] |= FLAG_ORIGIN;
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

/// Corners and exactly collinear edge points of a box around the boundary.
fn frame_points(boundary: &[Point], h_max: f64) -> Vec<Point> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in boundary {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let margin = 2.0 * h_max;
    let (x0, x1, y0, y1) = (
        lo[0] - margin,
        hi[0] + margin,
        lo[1] - margin,
        hi[1] + margin,
    );
    let nx = ((x1 - x0) / h_max).ceil() as usize;
    let ny = ((y1 - y0) / h_max).ceil() as usize;
    let mut out = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        let x = x0 + (x1 - x0) * i as f64 / nx as f64;
        out.push([x, y0]);
        out.push([x, y1]);
    }
    for j in 0..ny {
        let y = y0 + (y1 - y0) * j as f64 / ny as f64;
        out.push([x0, y]);
        out.push([x1, y]);
    }
    out.push([x1, y1]);
    out.push([x1, y0]);
    out.push([x0, y1]);
    out
}

fn estimate_vertex_budget(
    domain: &DomainSpec,
    grading: Option<&GradingPolicy>,
    h_max: f64,
) -> Result<()> {
    let mut n = 2.0 * domain.area() / (h_max * h_max);
    if let Some(g) = grading {
        let k = g.growth_ratio - 1.0;
        let per_center =
            2.0 * std::f64::consts::PI / (k * k) * (h_max / g.target_h_at_center).ln().max(0.0);
        n += per_center * g.refine_centers.len() as f64;
    }
    if n > MAX_SEED_POINTS {
        return Err(Error::UnsatisfiableGrading(format!(
            "grading would need about {n:.0} vertices"
        )));
    }
    Ok(())
}

/// Validates the obstacle, splices forced points lying on it, and drops
/// points that crowd their neighbours relative to the size field.
fn prepare_obstacle(
    o: &Obstacle,
    domain: &DomainSpec,
    poles: Option<[Point; 2]>,
    forced: &[Point],
    size: &dyn Fn(Point) -> f64,
    diam: f64,
) -> Result<Vec<Point>> {
    o.validate()?;
    let pl = &o.polyline;
    let boundary = domain.boundary();
    for p in pl {
        if !domain.contains(*p) {
            return Err(Error::ObstacleIntersectsBoundary(format!(
                "point ({}, {}) is not interior",
                p[0], p[1]
            )));
        }
    }
    let nb = boundary.len();
    for w in pl.windows(2) {
        for i in 0..nb {
            if segments_intersect(w[0], w[1], boundary[i], boundary[(i + 1) % nb]) {
                return Err(Error::ObstacleIntersectsBoundary(format!(
                    "segment crosses boundary edge {i}"
                )));
            }
        }
    }
    if let Some([pm, pp]) = poles {
        let (s, e) = (pl[0], pl[pl.len() - 1]);
        if !((s == pm && e == pp) || (s == pp && e == pm)) {
            return Err(Error::InvalidParameter(
                "obstacle endpoints must be the two poles".into(),
            ));
        }
    }
    let (start, end) = (pl[0], pl[pl.len() - 1]);
    let mut kept = vec![start];
    for &p in &pl[1..pl.len() - 1] {
        let h = size(p);
        if dist(p, *kept.last().unwrap()) >= 0.3 * h && dist(p, end) >= 0.3 * h {
            kept.push(p);
        }
    }
    kept.push(end);
    // splice forced points (e.g. the origin) lying on or very near the polyline
    for &f in forced {
        if kept.contains(&f) {
            continue;
        }
        let tol = (1e-12 * diam).max(0.25 * size(f));
        if let Some(i) =
            (0..kept.len() - 1).find(|&i| point_segment_distance(f, kept[i], kept[i + 1]) <= tol)
        {
            let h = size(f);
            if dist(f, kept[i]) < 0.3 * h && i > 0 {
                kept[i] = f;
            } else if dist(f, kept[i + 1]) < 0.3 * h && i + 1 < kept.len() - 1 {
                kept[i + 1] = f;
            } else {
                kept.insert(i + 1, f);
            }
        }
    }
    Ok(kept)
}

/// Interior points splitting `p`-`q` by recursive bisection until every
/// piece is no longer than the local size.
fn subdivide(p: Point, q: Point, size: &dyn Fn(Point) -> f64) -> Vec<Point> {
    let m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let h = size(m).min(size(p)).min(size(q));
    if dist(p, q) <= 1.2 * h {
        return Vec::new();
    }
    let mut out = subdivide(p, m, size);
    out.push(m);
    out.extend(subdivide(m, q, size));
    out
}

struct PointGrid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<Point>>,
}

impl PointGrid {
    fn new(cell: f64) -> Self {
        PointGrid {
            cell,
            cells: HashMap::new(),
        }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        (
            (p[0] / self.cell).floor() as i64,
            (p[1] / self.cell).floor() as i64,
        )
    }

    fn insert(&mut self, p: Point) {
        let k = self.key(p);
        self.cells.entry(k).or_default().push(p);
    }

    fn any_within(&self, p: Point, r: f64) -> bool {
        let (cx, cy) = self.key(p);
        let span = (r / self.cell).ceil() as i64;
        for i in cx - span..=cx + span {
            for j in cy - span..=cy + span {
                if let Some(v) = self.cells.get(&(i, j)) {
                    if v.iter().any(|q| dist(*q, p) < r) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

fn seed_points(
    domain: &DomainSpec,
    boundary: &[Point],
    slit: Option<&[Point]>,
    grading: Option<&GradingPolicy>,
    h_max: f64,
    fixed: &[Point],
    size: &dyn Fn(Point) -> f64,
) -> Vec<Point> {
    let mut cand: Vec<Point> = Vec::new();
    let diam = domain.diameter();
    if let Some(g) = grading {
        let k = g.growth_ratio - 1.0;
        for c in &g.refine_centers {
            let local = |r: f64| (g.target_h_at_center + k * r).min(h_max);
            let mut r = g.target_h_at_center;
            let mut ring = 0usize;
            while r < diam {
                let h = local(r);
                let n = ((2.0 * std::f64::consts::PI * r / h).ceil() as usize).max(6);
                let phase = if ring % 2 == 1 {
                    std::f64::consts::PI / n as f64
                } else {
                    0.0
                };
                for j in 0..n {
                    let t = phase + 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    cand.push([c[0] + r * t.cos(), c[1] + r * t.sin()]);
                }
                if h >= h_max {
                    break;
                }
                r += 0.87 * h;
                ring += 1;
            }
        }
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in boundary {
        xmin = xmin.min(p[0]);
        xmax = xmax.max(p[0]);
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let dy = 0.5 * 3f64.sqrt() * h_max;
    let rows = ((ymax - ymin) / dy).ceil() as usize + 1;
    let cols = ((xmax - xmin) / h_max).ceil() as usize + 1;
    if rows.saturating_mul(cols) < 50_000_000 {
        for j in 0..rows {
            let off = if j % 2 == 1 { 0.5 * h_max } else { 0.0 };
            for i in 0..cols {
                cand.push([xmin + off + i as f64 * h_max, ymin + j as f64 * dy]);
            }
        }
    }
    let mut order: Vec<(f64, usize)> = cand
        .iter()
        .enumerate()
        .map(|(i, p)| (size(*p), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut grid = PointGrid::new(0.5 * h_max);
    for p in fixed {
        grid.insert(*p);
    }
    let mut accepted = Vec::new();
    for (h, i) in order {
        let p = cand[i];
        if !super::point_in_polygon(boundary, p) {
            continue;
        }
        if polyline_distance(boundary, true, p) < 0.5 * h {
            continue;
        }
        if let Some(s) = slit {
            if polyline_distance(s, false, p) < 0.5 * h {
                continue;
            }
        }
        if grid.any_within(p, 0.7 * h) {
            continue;
        }
        grid.insert(p);
        accepted.push(p);
    }
    accepted
}

/// Mesh vertices lying on the slit, ordered from its first to its last point.
fn slit_vertex_chain(vertices: &[Point], slit: &[Point], tol: f64) -> Result<Vec<usize>> {
    let mut on: Vec<(usize, f64, usize)> = Vec::new();
    for (v, p) in vertices.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for s in 0..slit.len() - 1 {
            if point_segment_distance(*p, slit[s], slit[s + 1]) <= tol {
                let d = dist(slit[s], *p) / dist(slit[s], slit[s + 1]);
                best = Some((s, d));
                break;
            }
        }
        if let Some((s, t)) = best {
            on.push((s, t, v));
        }
    }
    on.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let chain: Vec<usize> = on.into_iter().map(|x| x.2).collect();
    if chain.len() < 2 {
        return Err(Error::Meshing("slit has no mesh vertices".into()));
    }
    Ok(chain)
}

/// Opens the slit: each interior slit vertex is split so that the triangles
/// on either side reference distinct copies.
fn duplicate_slit(
    vertices: &mut Vec<Point>,
    triangles: &mut [[usize; 3]],
    flags: &mut Vec<u8>,
    chain: &[usize],
) -> Result<()> {
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    let on_chain: HashSet<usize> = chain.iter().copied().collect();
    for (t, tri) in triangles.iter().enumerate() {
        for &v in tri {
            if on_chain.contains(&v) {
                incident.entry(v).or_default().push(t);
            }
        }
    }
    {
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for tri in triangles.iter() {
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                edges.insert((i.min(j), i.max(j)));
            }
        }
        for w in chain.windows(2) {
            if !edges.contains(&(w[0].min(w[1]), w[0].max(w[1]))) {
                return Err(Error::Meshing("slit is not a union of mesh edges".into()));
            }
        }
    }
    for k in 1..chain.len() - 1 {
        let (prev, v, next) = (chain[k - 1], chain[k], chain[k + 1]);
        let tris = &incident[&v];
        // union triangles sharing an edge (v, x) with x off the slit
        let mut parent: Vec<usize> = (0..tris.len()).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let mut by_edge: HashMap<usize, usize> = HashMap::new();
        for (ti, &t) in tris.iter().enumerate() {
            for &x in &triangles[t] {
                if x == v || x == prev || x == next {
                    continue;
                }
                if let Some(&tj) = by_edge.get(&x) {
                    let (a, b) = (root(&mut parent, ti), root(&mut parent, tj));
                    parent[a.max(b)] = a.min(b);
                } else {
                    by_edge.insert(x, ti);
                }
            }
        }
        let roots: Vec<usize> = (0..tris.len()).map(|i| root(&mut parent, i)).collect();
        let distinct: HashSet<usize> = roots.iter().copied().collect();
        if distinct.len() != 2 {
            return Err(Error::Meshing(format!(
                "slit vertex {v} has {} sides instead of 2",
                distinct.len()
            )));
        }
        let keep = roots[0];
        let copy = vertices.len();
        vertices.push(vertices[v]);
        flags.push((flags[v] & !FLAG_ORIGIN) | FLAG_SLIT);
        for (ti, &t) in tris.iter().enumerate() {
            if roots[ti] != keep {
                for x in triangles[t].iter_mut() {
                    if *x == v {
                        *x = copy;
                    }
                }
            }
        }
    }
    Ok(())
}
