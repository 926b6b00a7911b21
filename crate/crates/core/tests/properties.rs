use std::f64::consts::PI;

use ab_lab::bounds::{
    cutoff_energy, cutoff_mass_defect, grad_rho, max_eig_quadform, rho, CutoffParams,
    QuadFormMatrix,
};
use ab_lab::eig::solve_lowest;
use ab_lab::fem::{assemble_laplacian, assemble_magnetic, rayleigh_quotient, MagneticScheme};
use ab_lab::geometry::{generate_mesh, DomainSpec, GradingPolicy, Mesh};
use ab_lab::harness::{fit_asymptotics, SweepRecord};
use ab_lab::potential::{eval_a, phase_psi, winding_integral, PoleConfig};
use ab_lab::Complex64;
use proptest::prelude::*;

fn star_polygon(radii: &[f64], jitter: &[f64]) -> Vec<[f64; 2]> {
    let n = radii.len();
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + 0.3 * jitter[k]) / n as f64;
            [radii[k] * t.cos(), radii[k] * t.sin()]
        })
        .collect()
}

fn pole_mesh(a: f64, h: f64) -> Mesh {
    let poles = [[-a, 0.0], [a, 0.0]];
    let g = GradingPolicy::new(vec![poles[0], poles[1], [0.0, 0.0]], 0.1 * a, 1.3);
    generate_mesh(&DomainSpec::unit_disk(), Some(poles), None, h, Some(&g)).unwrap()
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(12))]

    #[test]
    fn mesh_area_and_conformity(
        radii in prop::collection::vec(0.6f64..1.4, 5..9),
        jitter in prop::collection::vec(-1.0f64..1.0, 9),
        h in 0.12f64..0.4,
    ) {
        let domain = DomainSpec::polygon(star_polygon(&radii, &jitter)).unwrap();
        let m = generate_mesh(&domain, None, None, h, None).unwrap();
        let area = domain.area();
        prop_assert!((m.total_area() - area).abs() <= 1e-10 * area);
        m.check().unwrap();
        let counts = m.edge_counts();
        for (&(i, j), &c) in &counts {
            let on_boundary = m.is_boundary(i) && m.is_boundary(j) && c == 1;
            prop_assert!(c == 2 || on_boundary, "edge ({}, {}) has {} triangles", i, j, c);
        }
        prop_assert_eq!(m, generate_mesh(&domain, None, None, h, None).unwrap());
    }

    #[test]
    fn magnetic_matrices_are_hermitian_and_order_independent(a in 0.02f64..0.3, seed in any::<u64>()) {
        let mesh = pole_mesh(a, 0.3);
        let cfg = PoleConfig::new(a).unwrap();
        let sys = assemble_magnetic(&mesh, &cfg, &MagneticScheme::EdgePhase).unwrap();
        prop_assert!(sys.s.hermiticity_residual() <= 1e-12);
        prop_assert!(sys.m.hermiticity_residual() <= 1e-12);

        let mut shuffled = mesh.clone();
        let n = shuffled.triangles.len();
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.triangles.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let again = assemble_magnetic(&shuffled, &cfg, &MagneticScheme::EdgePhase).unwrap();
        prop_assert_eq!(&sys.s, &again.s);
        prop_assert_eq!(&sys.m, &again.m);
    }

    #[test]
    fn rayleigh_quotient_is_scale_invariant_and_above_ground_state(
        a in 0.05f64..0.3,
        re in prop::collection::vec(-1.0f64..1.0, 64),
        im in prop::collection::vec(-1.0f64..1.0, 64),
        scale in 0.01f64..100.0,
    ) {
        let mesh = pole_mesh(a, 0.3);
        let cfg = PoleConfig::new(a).unwrap();
        let sys = assemble_magnetic(&mesh, &cfg, &MagneticScheme::EdgePhase).unwrap();
        let lambda1 = solve_lowest(&sys, 1, 1e-10).unwrap().pairs[0].lambda;
        let v: Vec<Complex64> = (0..sys.dim()).map(|i| Complex64::new(re[i % 64], im[(7 * i) % 64])).collect();
        let w: Vec<Complex64> = v.iter().map(|x| x * Complex64::from_polar(scale, 0.7)).collect();
        let q = rayleigh_quotient(&sys, &v).unwrap();
        prop_assert!((q - rayleigh_quotient(&sys, &w).unwrap()).abs() <= 1e-10 * q);
        prop_assert!(q >= lambda1 * (1.0 - 1e-10));
    }

    #[test]
    fn magnetic_ground_state_dominates_laplacian(a in 0.02f64..0.3) {
        let mesh = pole_mesh(a, 0.25);
        let cfg = PoleConfig::new(a).unwrap();
        let lap = solve_lowest(&assemble_laplacian(&mesh).unwrap(), 1, 1e-10).unwrap().pairs[0].lambda;
        let mag = solve_lowest(&assemble_magnetic(&mesh, &cfg, &MagneticScheme::EdgePhase).unwrap(), 1, 1e-10).unwrap().pairs[0].lambda;
        prop_assert!(mag >= lap - 1e-8);
    }
}

proptest! {
    #![proptest_config(cases(100))]

    #[test]
    fn potential_is_curl_free(a in 0.01f64..0.4, r in 0.05f64..1.0, t in 0.0f64..(2.0 * PI), offset in 0usize..2) {
        let cfg = PoleConfig::new(a).unwrap();
        let c = cfg.poles()[offset];
        let x = [c[0] + r * t.cos(), c[1] + r * t.sin()];
        let other = cfg.poles()[1 - offset];
        prop_assume!(((x[0] - other[0]).powi(2) + (x[1] - other[1]).powi(2)).sqrt() >= 0.05);
        let d = 1e-6;
        let f = |p: [f64; 2]| eval_a(&cfg, p).unwrap();
        let dax2_dx1 = (f([x[0] + d, x[1]])[1] - f([x[0] - d, x[1]])[1]) / (2.0 * d);
        let dax1_dx2 = (f([x[0], x[1] + d])[0] - f([x[0], x[1] - d])[0]) / (2.0 * d);
        prop_assert!((dax2_dx1 - dax1_dx2).abs() <= 1e-6);
    }

    #[test]
    fn potential_reflection_identity(a in 0.01f64..0.4, x1 in -1.0f64..1.0, x2 in 0.01f64..1.0) {
        let cfg = PoleConfig::new(a).unwrap();
        let up = eval_a(&cfg, [x1, x2]).unwrap();
        let down = eval_a(&cfg, [x1, -x2]).unwrap();
        prop_assert!((down[0] + up[0]).abs() <= 1e-12 * (1.0 + up[0].abs()));
        prop_assert!((down[1] - up[1]).abs() <= 1e-12 * (1.0 + up[1].abs()));
    }

    #[test]
    fn phase_vanishes_as_poles_merge(r in 0.3f64..1.0, t in 0.0f64..(2.0 * PI)) {
        let x = [r * t.cos(), r * t.sin()];
        let m: Vec<f64> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&a| phase_psi(&PoleConfig::new(a).unwrap(), x).unwrap().abs())
            .collect();
        prop_assert!(m[1] <= m[0] && m[2] <= m[1]);
        prop_assert!(m[2] < 1e-2);
    }

    #[test]
    fn cutoff_is_monotone_and_bounded(eps in 1e-6f64..0.5, tau in 0.05f64..0.95, r1 in 0.0f64..1.5, r2 in 0.0f64..1.5) {
        let p = CutoffParams::new(eps, tau).unwrap();
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        let (a, b) = (rho([lo, 0.0], &p), rho([0.0, hi], &p));
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(a <= b);
        if hi > eps && hi < p.outer_radius() {
            let g = grad_rho([hi, 0.0], &p);
            prop_assert!(g[0] > 0.0 && g[1] == 0.0);
        }
    }

    #[test]
    fn cutoff_identities(eps in 1e-6f64..0.5, tau in 0.05f64..0.95) {
        let p = CutoffParams::new(eps, tau).unwrap();
        prop_assert!(cutoff_energy(&p).relative_error() <= 1e-8);
        let defect = cutoff_mass_defect(&p);
        prop_assert!(defect >= PI * eps * eps);
        prop_assert!(defect <= PI * eps.powf(2.0 * tau));
    }

    #[test]
    fn fit_recovers_exact_slope(slope in 0.1f64..20.0, u0 in 0.1f64..2.0) {
        let records: Vec<SweepRecord> = [0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625]
            .iter()
            .map(|&a| {
                let x = 1.0 / f64::ln(a).abs();
                let mut r = SweepRecord::new(a, &[]);
                r.lambda_n = Some(3.0);
                r.lambda_n_a = Some(3.0 + slope * x);
                r.u_n0 = Some(u0);
                r
            })
            .collect();
        let f = fit_asymptotics(&records).unwrap();
        prop_assert!((f.slope - slope).abs() <= 1e-12 * slope);
        prop_assert!((f.predicted - 2.0 * PI * u0 * u0).abs() <= 1e-12 * f.predicted);
        prop_assert_eq!(f.residuals.len(), 3);
    }
}

/// Matrices satisfying the hypotheses of the max-eigenvalue lemma: one small
/// positive diagonal entry `Cε`, negative diagonal elsewhere, `O(ε)` coupling.
fn lemma_matrix(
    n: usize,
    c: f64,
    eps: f64,
    k: &[f64],
    off: &[f64],
    d1: f64,
    d2: &[f64],
) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            m[i][j] = eps * off[idx % off.len()];
            m[j][i] = m[i][j];
            idx += 1;
        }
    }
    for j in 0..n - 1 {
        m[j][j] = k[j] + d2[j];
    }
    m[n - 1][n - 1] = c * eps * (1.0 + d1);
    m
}

proptest! {
    #![proptest_config(cases(100))]

    #[test]
    fn technical_lemma_max_eigenvalue(
        n in 2usize..7,
        c in 0.5f64..5.0,
        k in prop::collection::vec(-3.0f64..-0.5, 6),
        off in prop::collection::vec(-1.0f64..1.0, 21),
        d1 in -0.01f64..0.01,
        d2 in prop::collection::vec(-0.01f64..0.01, 6),
    ) {
        let eps = 1e-3;
        let entries = lemma_matrix(n, c, eps, &k, &off, d1, &d2);
        let top = max_eig_quadform(&QuadFormMatrix { entries, a: eps, tau: 0.5 }).unwrap();
        let ratio = top / (c * eps);
        prop_assert!((0.9..=1.1).contains(&ratio), "ratio {}", ratio);
    }
}

proptest! {
    #![proptest_config(cases(50))]

    #[test]
    fn winding_is_half_integer(
        a in 0.01f64..0.3,
        pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..9),
    ) {
        let cfg = PoleConfig::new(a).unwrap();
        let mut path: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
        path.push(path[0]);
        match winding_integral(&cfg, &path) {
            Ok(w) => {
                let twice = 2.0 * w;
                prop_assert!((twice - twice.round()).abs() <= 1e-6, "2w = {}", twice);
            }
            Err(_) => prop_assume!(false),
        }
    }
}
