//! P1 finite elements for the magnetic operator and the Dirichlet Laplacian.
//!
//! Vertices on the outer boundary and on slits are always eliminated. The
//! magnetic assembly additionally eliminates the pole vertices.

use num_complex::Complex64;

use crate::geometry::{Mesh, FLAG_BOUNDARY, FLAG_SLIT};
use crate::potential::VectorPotential;
use crate::quadrature::QuadratureRule;
use crate::sparse::SparseHermitian;
use crate::{par, Error, Point, Result};

/// Discretization of the magnetic term.
#[derive(Debug, Clone, Default)]
pub enum MagneticScheme {
    /// Laplacian element matrices multiplied by the phase `exp(-i ∫ A·dl)`
    /// along each edge. Commutes exactly with gauge transformations that are
    /// smooth across mesh edges.
    #[default]
    EdgePhase,
    /// Direct quadrature of `(i∇φ_j + Aφ_j)·conj(i∇φ_k + Aφ_k)` with the given
    /// rule, and `pole_rule` on triangles that touch a pole.
    Quadrature {
        rule: QuadratureRule,
        pole_rule: QuadratureRule,
    },
}

impl MagneticScheme {
    pub fn quadrature() -> Self {
        MagneticScheme::Quadrature {
            rule: QuadratureRule::symmetric6(),
            pole_rule: QuadratureRule::order10(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub s: SparseHermitian,
    pub m: SparseHermitian,
    /// Mesh vertex to degree of freedom, `None` when eliminated.
    pub dof_map: Vec<Option<usize>>,
    /// Degree of freedom to mesh vertex.
    pub free_vertices: Vec<usize>,
    pub eliminated: Vec<usize>,
}

impl AssembledSystem {
    pub fn dim(&self) -> usize {
        self.free_vertices.len()
    }

    /// Expands a dof vector to one value per mesh vertex, zero where eliminated.
    pub fn to_vertex_values(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.dof_map
            .iter()
            .map(|d| d.map_or(Complex64::new(0.0, 0.0), |k| v[k]))
            .collect()
    }

    pub fn from_vertex_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        self.free_vertices.iter().map(|&v| values[v]).collect()
    }

    pub fn m_norm(&self, v: &[Complex64]) -> f64 {
        self.m.form(v, v).re.max(0.0).sqrt()
    }
}

/// Element data with vertices in ascending index order.
struct Element {
    verts: [usize; 3],
    pts: [Point; 3],
    area: f64,
    grads: [[f64; 2]; 3],
}

impl Element {
    fn new(mesh: &Mesh, t: usize) -> Result<Self> {
        let mut verts = mesh.triangles[t];
        verts.sort_unstable();
        let pts = verts.map(|v| mesh.vertices[v]);
        let signed = 0.5
            * ((pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1])
                - (pts[2][0] - pts[0][0]) * (pts[1][1] - pts[0][1]));
        if !(signed.abs() > 0.0) || mesh.triangle_area(t) <= 0.0 {
            return Err(Error::DegenerateTriangle(t));
        }
        let grads = std::array::from_fn(|i| {
            let (p, q) = (pts[(i + 1) % 3], pts[(i + 2) % 3]);
            [
                (p[1] - q[1]) / (2.0 * signed),
                (q[0] - p[0]) / (2.0 * signed),
            ]
        });
        Ok(Self {
            verts,
            pts,
            area: signed.abs(),
            grads,
        })
    }

    fn stiffness(&self) -> [[f64; 3]; 3] {
        let g = &self.grads;
        std::array::from_fn(|i| {
            std::array::from_fn(|j| self.area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]))
        })
    }

    fn mass(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                if i == j {
                    self.area / 6.0
                } else {
                    self.area / 12.0
                }
            })
        })
    }
}

type Entry = (usize, usize, [usize; 3], Complex64);

fn dof_layout(mesh: &Mesh, extra: &[usize]) -> (Vec<Option<usize>>, Vec<usize>, Vec<usize>) {
    let mut eliminated = vec![false; mesh.vertex_count()];
    for (v, &f) in mesh.flags.iter().enumerate() {
        if f & (FLAG_BOUNDARY | FLAG_SLIT) != 0 {
            eliminated[v] = true;
        }
    }
    for &v in extra {
        eliminated[v] = true;
    }
    let mut dof_map = vec![None; mesh.vertex_count()];
    let mut free = Vec::new();
    let mut gone = Vec::new();
    for v in 0..mesh.vertex_count() {
        if eliminated[v] {
            gone.push(v);
        } else {
            dof_map[v] = Some(free.len());
            free.push(v);
        }
    }
    (dof_map, free, gone)
}

fn build(
    mesh: &Mesh,
    dof_map: Vec<Option<usize>>,
    free_vertices: Vec<usize>,
    eliminated: Vec<usize>,
    element: impl Fn(&Element) -> Result<([[Complex64; 3]; 3], [[Complex64; 3]; 3])> + Sync + Send,
) -> Result<AssembledSystem> {
    let locals: Vec<Result<(Vec<Entry>, Vec<Entry>)>> =
        par::map_range(mesh.triangle_count(), |t| {
            let e = Element::new(mesh, t)?;
            let (ks, ms) = element(&e)?;
            let mut s = Vec::with_capacity(9);
            let mut m = Vec::with_capacity(9);
            for i in 0..3 {
                let Some(di) = dof_map[e.verts[i]] else {
                    continue;
                };
                for j in 0..3 {
                    let Some(dj) = dof_map[e.verts[j]] else {
                        continue;
                    };
                    s.push((di, dj, e.verts, ks[i][j]));
                    m.push((di, dj, e.verts, ms[i][j]));
                }
            }
            Ok((s, m))
        });
    let mut s_entries = Vec::new();
    let mut m_entries = Vec::new();
    for l in locals {
        let (s, m) = l?;
        s_entries.extend(s);
        m_entries.extend(m);
    }
    let dim = free_vertices.len();
    Ok(AssembledSystem {
        s: SparseHermitian::from_keyed_triplets(dim, s_entries),
        m: SparseHermitian::from_keyed_triplets(dim, m_entries),
        dof_map,
        free_vertices,
        eliminated,
    })
}

fn real3(a: [[f64; 3]; 3]) -> [[Complex64; 3]; 3] {
    a.map(|r| r.map(|x| Complex64::new(x, 0.0)))
}

/// Dirichlet Laplacian on boundary and slit vertices; poles stay free.
pub fn assemble_laplacian(mesh: &Mesh) -> Result<AssembledSystem> {
    let (dof_map, free, gone) = dof_layout(mesh, &[]);
    build(mesh, dof_map, free, gone, |e| {
        Ok((real3(e.stiffness()), real3(e.mass())))
    })
}

/// Laplacian stiffness over all vertices, without any elimination.
pub fn laplacian_stiffness_full(mesh: &Mesh) -> Result<SparseHermitian> {
    let n = mesh.vertex_count();
    let dof_map = (0..n).map(Some).collect();
    let sys = build(mesh, dof_map, (0..n).collect(), Vec::new(), |e| {
        Ok((real3(e.stiffness()), real3(e.mass())))
    })?;
    Ok(sys.s)
}

/// Mesh vertices coinciding with the poles of `potential`.
pub fn pole_vertices(mesh: &Mesh, potential: &dyn VectorPotential) -> Result<Vec<usize>> {
    let scale = mesh
        .vertices
        .iter()
        .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()))
        .max(1.0);
    let mut out = Vec::new();
    for p in potential.poles() {
        let found = mesh.find_vertices(p, 1e-12 * scale);
        if found.is_empty() {
            return Err(Error::PoleNotVertex(p[0], p[1]));
        }
        out.extend(found);
    }
    Ok(out)
}

/// Magnetic operator `(i∇ + A)²` with the poles of `potential` eliminated.
///
/// The quadratic form is `vᴴ S v`.
pub fn assemble_magnetic(
    mesh: &Mesh,
    potential: &dyn VectorPotential,
    scheme: &MagneticScheme,
) -> Result<AssembledSystem> {
    let poles = pole_vertices(mesh, potential)?;
    let (dof_map, free, gone) = dof_layout(mesh, &poles);
    let is_pole = |v: usize| poles.contains(&v);
    match scheme {
        MagneticScheme::EdgePhase => build(mesh, dof_map.clone(), free, gone, |e| {
            let k = e.stiffness();
            let m = e.mass();
            let mut ks = [[Complex64::new(0.0, 0.0); 3]; 3];
            let mut ms = ks;
            for i in 0..3 {
                ks[i][i] = Complex64::new(k[i][i], 0.0);
                ms[i][i] = Complex64::new(m[i][i], 0.0);
                for j in i + 1..3 {
                    if dof_map[e.verts[i]].is_none() || dof_map[e.verts[j]].is_none() {
                        continue;
                    }
                    let phase =
                        Complex64::from_polar(1.0, -potential.edge_circulation(e.pts[i], e.pts[j]));
                    ks[i][j] = k[i][j] * phase;
                    ks[j][i] = ks[i][j].conj();
                    ms[i][j] = m[i][j] * phase;
                    ms[j][i] = ms[i][j].conj();
                }
            }
            Ok((ks, ms))
        }),
        MagneticScheme::Quadrature { rule, pole_rule } => build(mesh, dof_map, free, gone, |e| {
            let q = if e.verts.iter().any(|&v| is_pole(v)) {
                pole_rule
            } else {
                rule
            };
            let mut ks = real3(e.stiffness());
            let ms = real3(e.mass());
            for (x, bary, w) in q.points_on(e.pts) {
                let a = potential.eval(x)?;
                let wa = w * e.area;
                let aa = a[0] * a[0] + a[1] * a[1];
                for j in 0..3 {
                    let ga_j = e.grads[j][0] * a[0] + e.grads[j][1] * a[1];
                    for k in 0..3 {
                        let ga_k = e.grads[k][0] * a[0] + e.grads[k][1] * a[1];
                        ks[j][k] += wa
                            * Complex64::new(
                                aa * bary[j] * bary[k],
                                bary[j] * ga_k - bary[k] * ga_j,
                            );
                    }
                }
            }
            Ok((ks, ms))
        }),
    }
}

/// `vᴴSv / vᴴMv`.
pub fn rayleigh_quotient(system: &AssembledSystem, v: &[Complex64]) -> Result<f64> {
    if v.len() != system.dim() {
        return Err(Error::InvalidParameter(
            "vector length does not match the system".into(),
        ));
    }
    let den = system.m.form(v, v).re;
    if !(den > 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(system.s.form(v, v).re / den)
}
