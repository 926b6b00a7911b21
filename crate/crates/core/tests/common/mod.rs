#![allow(dead_code)]

use ab_lab::eig::{self, solve_lowest, SpectrumSlice};
use ab_lab::fem::{assemble_laplacian, assemble_magnetic, AssembledSystem, MagneticScheme};
use ab_lab::geometry::{generate_mesh, DomainSpec, GradingPolicy, Mesh};
use ab_lab::potential::PoleConfig;

/// Unit-disk problem with poles at `(±a, 0)`, graded to `0.05 a` at the poles and origin.
pub struct DiskCase {
    pub a: f64,
    pub mesh: Mesh,
    pub cfg: PoleConfig,
    pub lap: AssembledSystem,
    pub lap_slice: SpectrumSlice,
    pub mag: AssembledSystem,
}

pub fn disk_mesh(a: f64, h_max: f64) -> Mesh {
    let poles = [[-a, 0.0], [a, 0.0]];
    let g = GradingPolicy::new(vec![poles[0], poles[1], [0.0, 0.0]], 0.05 * a, 1.2);
    generate_mesh(&DomainSpec::unit_disk(), Some(poles), None, h_max, Some(&g)).unwrap()
}

pub fn disk_case(a: f64, n: usize) -> DiskCase {
    let mesh = disk_mesh(a, 0.1);
    let cfg = PoleConfig::new(a).unwrap();
    let lap = assemble_laplacian(&mesh).unwrap();
    let mut lap_slice = solve_lowest(&lap, n, 1e-10).unwrap();
    let dof = lap.dof_map[mesh.marked.origin.unwrap()].unwrap();
    for p in lap_slice.pairs.iter_mut() {
        eig::fix_sign(p, dof);
    }
    let mag = assemble_magnetic(&mesh, &cfg, &MagneticScheme::EdgePhase).unwrap();
    DiskCase {
        a,
        mesh,
        cfg,
        lap,
        lap_slice,
        mag,
    }
}

pub fn u_origin(c: &DiskCase, k: usize) -> f64 {
    eig::value_at_origin(&c.lap_slice.pairs[k], &c.lap, c.mesh.marked.origin).unwrap()
}

/// `2π u(0)² / ((1 − τ)|log a|)`.
pub fn leading_term(u0: f64, a: f64, tau: f64) -> f64 {
    2.0 * std::f64::consts::PI * u0 * u0 / ((1.0 - tau) * a.ln().abs())
}
