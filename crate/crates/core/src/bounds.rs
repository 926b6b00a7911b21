//! Log cut-off functions, test functions built from Laplacian eigenfunctions,
//! and the resulting upper bounds on magnetic eigenvalues.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::dense::{self, Dense};
use crate::eig::SpectrumSlice;
use crate::fem::AssembledSystem;
use crate::geometry::Mesh;
use crate::potential::{phase_psi, PoleConfig};
use crate::quadrature::{gauss_legendre, QuadratureRule};
use crate::{par, Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffParams {
    epsilon: f64,
    tau: f64,
}

impl CutoffParams {
    pub fn new(epsilon: f64, tau: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {epsilon} must lie in (0, 1)"
            )));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau = {tau} must lie in (0, 1)"
            )));
        }
        Ok(Self { epsilon, tau })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Radius beyond which the cut-off equals one.
    pub fn outer_radius(&self) -> f64 {
        self.epsilon.powf(self.tau)
    }

    /// `(τ − 1) log ε`, positive.
    fn denom(&self) -> f64 {
        (self.tau - 1.0) * self.epsilon.ln()
    }
}

pub fn rho(x: Point, params: &CutoffParams) -> f64 {
    rho_radial(x[0].hypot(x[1]), params)
}

fn rho_radial(r: f64, params: &CutoffParams) -> f64 {
    if r <= params.epsilon {
        0.0
    } else if r >= params.outer_radius() {
        1.0
    } else {
        ((r.ln() - params.epsilon.ln()) / params.denom()).clamp(0.0, 1.0)
    }
}

/// `∇ρ = x / ((τ − 1) log ε |x|²)` on the annulus, zero elsewhere.
pub fn grad_rho(x: Point, params: &CutoffParams) -> Point {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let r = r2.sqrt();
    if r <= params.epsilon || r >= params.outer_radius() {
        return [0.0, 0.0];
    }
    let c = params.denom() * r2;
    [x[0] / c, x[1] / c]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffEnergy {
    pub closed_form: f64,
    pub quadrature: f64,
}

impl CutoffEnergy {
    pub fn relative_error(&self) -> f64 {
        ((self.quadrature - self.closed_form) / self.closed_form).abs()
    }
}

/// Integrates `f` over `[lo, hi]` with Gauss–Legendre on geometrically graded
/// subintervals, suited to integrands varying like powers of `r`.
fn radial_integral(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (x, w) = gauss_legendre(20);
    let pieces = 64;
    let ratio = (hi / lo).powf(1.0 / pieces as f64);
    let mut sum = 0.0;
    let mut a = lo;
    for k in 0..pieces {
        let b = if k + 1 == pieces { hi } else { a * ratio };
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        sum += x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| wi * f(m + h * xi))
            .sum::<f64>()
            * h;
        a = b;
    }
    sum
}

/// `∫|∇ρ|²` in closed form and by radial quadrature of the exact gradient.
pub fn cutoff_energy(params: &CutoffParams) -> CutoffEnergy {
    let closed_form = 2.0 * PI / params.denom();
    let quadrature = radial_integral(
        |r| {
            let g = grad_rho([r, 0.0], params);
            2.0 * PI * r * (g[0] * g[0] + g[1] * g[1])
        },
        params.epsilon,
        params.outer_radius(),
    );
    CutoffEnergy {
        closed_form,
        quadrature,
    }
}

/// `∫(1 − ρ²)` over the plane.
pub fn cutoff_mass_defect(params: &CutoffParams) -> f64 {
    let inner = PI * params.epsilon * params.epsilon;
    let annulus = radial_integral(
        |r| {
            let p = rho_radial(r, params);
            2.0 * PI * r * (1.0 - p * p)
        },
        params.epsilon,
        params.outer_radius(),
    );
    inner + annulus
}

/// Test functions `e^{iψ} ρ_{2a,τ} u_j` sampled at the mesh vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionBasis {
    /// One vector per source eigenfunction, one entry per mesh vertex.
    pub vectors: Vec<Vec<Complex64>>,
    pub a: f64,
    pub tau: f64,
}

fn cutoff_for(config: &PoleConfig, tau: f64, mesh: &Mesh) -> Result<CutoffParams> {
    let params = CutoffParams::new(2.0 * config.a(), tau)?;
    let reach = params.outer_radius();
    let inside = mesh
        .vertices
        .iter()
        .zip(&mesh.flags)
        .filter(|(_, &f)| f & crate::geometry::FLAG_BOUNDARY != 0)
        .all(|(p, _)| p[0].hypot(p[1]) > reach);
    if !inside {
        return Err(Error::InvalidParameter(format!(
            "cut-off radius {reach:.3} reaches the boundary; a = {} is too large",
            config.a()
        )));
    }
    Ok(params)
}

/// Real vertex values of the Laplacian eigenfunctions in `slice`.
fn eigenfunctions(slice: &SpectrumSlice, system: &AssembledSystem) -> Vec<Vec<f64>> {
    slice
        .pairs
        .iter()
        .map(|p| {
            system
                .to_vertex_values(&p.vector)
                .iter()
                .map(|z| z.re)
                .collect()
        })
        .collect()
}

pub fn build_test_basis(
    mesh: &Mesh,
    laplacian: &AssembledSystem,
    slice: &SpectrumSlice,
    config: &PoleConfig,
    tau: f64,
) -> Result<TestFunctionBasis> {
    let params = cutoff_for(config, tau, mesh)?;
    let us = eigenfunctions(slice, laplacian);
    let factor: Vec<Complex64> = mesh
        .vertices
        .iter()
        .map(|&p| {
            let r = rho(p, &params);
            if r == 0.0 {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                Ok(Complex64::from_polar(r, phase_psi(config, p)?))
            }
        })
        .collect::<Result<_>>()?;
    let vectors = us
        .iter()
        .map(|u| u.iter().zip(&factor).map(|(x, f)| f * x).collect())
        .collect();
    Ok(TestFunctionBasis {
        vectors,
        a: config.a(),
        tau,
    })
}

/// `VᴴAV` for the basis restricted to the free dofs of `system`.
fn project(
    basis: &TestFunctionBasis,
    system: &AssembledSystem,
    a: &crate::sparse::SparseHermitian,
) -> Dense {
    let vs: Vec<Vec<Complex64>> = basis
        .vectors
        .iter()
        .map(|v| system.from_vertex_values(v))
        .collect();
    let avs: Vec<Vec<Complex64>> = par::map(&vs, |v| a.matvec(v));
    vs.iter()
        .map(|x| avs.iter().map(|y| crate::sparse::dot(x, y)).collect())
        .collect()
}

/// Gram matrix of the basis in the mass inner product of `system`.
pub fn gram_matrix(basis: &TestFunctionBasis, system: &AssembledSystem) -> Dense {
    project(basis, system, &system.m)
}

/// Largest eigenvalue of the magnetic pencil restricted to the span of the basis.
pub fn upper_bound(
    mesh: &Mesh,
    magnetic: &AssembledSystem,
    laplacian: &AssembledSystem,
    slice: &SpectrumSlice,
    config: &PoleConfig,
    tau: f64,
) -> Result<f64> {
    let basis = build_test_basis(mesh, laplacian, slice, config, tau)?;
    for b in &basis.vectors {
        if b.iter()
            .enumerate()
            .any(|(v, z)| magnetic.dof_map[v].is_none() && z.norm() > 0.0)
        {
            return Err(Error::InvalidParameter(
                "test function is nonzero on an eliminated vertex".into(),
            ));
        }
    }
    let s = project(&basis, magnetic, &magnetic.s);
    let g = project(&basis, magnetic, &magnetic.m);
    let det_scale = g.iter().enumerate().map(|(i, r)| r[i].re).product::<f64>();
    if !(det_scale > 0.0) {
        return Err(Error::Singular("test functions vanish".into()));
    }
    let (vals, _) = dense::generalized_eigen(&s, &g)
        .map_err(|_| Error::Singular("test functions are linearly dependent".into()))?;
    vals.last()
        .copied()
        .ok_or_else(|| Error::Singular("empty basis".into()))
}

/// The matrix of the quadratic form comparing the test functions with `λ_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadFormMatrix {
    pub entries: Vec<Vec<f64>>,
    pub a: f64,
    pub tau: f64,
}

impl QuadFormMatrix {
    pub fn n(&self) -> usize {
        self.entries.len()
    }
}

/// Levels of uniform subdivision applied to triangles crossing the cut-off circles.
const STRADDLE_LEVELS: usize = 4;

fn sub_triangles(tri: [Point; 3], levels: usize) -> Vec<[Point; 3]> {
    let mut out = vec![tri];
    for _ in 0..levels {
        out = out
            .into_iter()
            .flat_map(|[a, b, c]| {
                let m = |p: Point, q: Point| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
                let (ab, bc, ca) = (m(a, b), m(b, c), m(c, a));
                [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
            })
            .collect();
    }
    out
}

/// `M_jk = (λ_j + λ_k)/2 ∫ρ²u_ju_k + ∫u_ju_k|∇ρ|² − λ_N δ_jk` with `ρ = ρ_{2a,τ}`.
pub fn assemble_m_matrix(
    mesh: &Mesh,
    laplacian: &AssembledSystem,
    slice: &SpectrumSlice,
    config: &PoleConfig,
    tau: f64,
) -> Result<QuadFormMatrix> {
    let params = cutoff_for(config, tau, mesh)?;
    let us = eigenfunctions(slice, laplacian);
    let lambdas = slice.eigenvalues();
    let n = us.len();
    let lambda_n = lambdas[n - 1];
    let rule = QuadratureRule::symmetric6();
    let (r_in, r_out) = (params.epsilon(), params.outer_radius());
    // per triangle: (∫ρ²u_ju_k, ∫u_ju_k|∇ρ|²)
    let parts: Vec<(Vec<f64>, Vec<f64>)> = par::map_range(mesh.triangle_count(), |t| {
        let tri = mesh.triangles[t];
        let pts = tri.map(|v| mesh.vertices[v]);
        let radii = pts.map(|p| p[0].hypot(p[1]));
        let rmax = radii.iter().copied().fold(0.0, f64::max);
        let rmin = crate::geometry::point_triangle_distance([0.0, 0.0], pts);
        let mut mass = vec![0.0; n * n];
        let mut grad = vec![0.0; n * n];
        if rmax <= r_in {
            return (mass, grad);
        }
        let straddles = rmin < r_out;
        let pieces = if straddles {
            sub_triangles(pts, STRADDLE_LEVELS)
        } else {
            vec![pts]
        };
        let area = mesh.triangle_area(t);
        // barycentric coordinates of x in the parent triangle
        let bary = |x: Point| {
            let d = (pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1])
                - (pts[2][0] - pts[0][0]) * (pts[1][1] - pts[0][1]);
            let l1 = ((x[0] - pts[0][0]) * (pts[2][1] - pts[0][1])
                - (pts[2][0] - pts[0][0]) * (x[1] - pts[0][1]))
                / d;
            let l2 = ((pts[1][0] - pts[0][0]) * (x[1] - pts[0][1])
                - (x[0] - pts[0][0]) * (pts[1][1] - pts[0][1]))
                / d;
            [1.0 - l1 - l2, l1, l2]
        };
        let scale = area / pieces.len() as f64;
        for piece in &pieces {
            for (x, _, w) in rule.points_on(*piece) {
                let b = bary(x);
                let vals: Vec<f64> = us
                    .iter()
                    .map(|u| b[0] * u[tri[0]] + b[1] * u[tri[1]] + b[2] * u[tri[2]])
                    .collect();
                let p = rho(x, &params);
                let g = grad_rho(x, &params);
                let g2 = g[0] * g[0] + g[1] * g[1];
                for j in 0..n {
                    for k in 0..n {
                        let uu = vals[j] * vals[k] * w * scale;
                        mass[j * n + k] += p * p * uu;
                        grad[j * n + k] += g2 * uu;
                    }
                }
            }
        }
        (mass, grad)
    });
    let mut mass = vec![0.0; n * n];
    let mut grad = vec![0.0; n * n];
    for (m, g) in parts {
        for i in 0..n * n {
            mass[i] += m[i];
            grad[i] += g[i];
        }
    }
    let entries = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let sym = |v: &[f64]| 0.5 * (v[j * n + k] + v[k * n + j]);
                    let delta = if j == k { lambda_n } else { 0.0 };
                    0.5 * (lambdas[j] + lambdas[k]) * sym(&mass) + sym(&grad) - delta
                })
                .collect()
        })
        .collect();
    Ok(QuadFormMatrix {
        entries,
        a: config.a(),
        tau,
    })
}

pub fn max_eig_quadform(q: &QuadFormMatrix) -> Result<f64> {
    dense::max_eigenvalue(&q.entries)
}
