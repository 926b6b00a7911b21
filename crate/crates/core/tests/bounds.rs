mod common;

use ab_lab::bounds::{
    assemble_m_matrix, build_test_basis, gram_matrix, max_eig_quadform, upper_bound, QuadFormMatrix,
};
use ab_lab::eig::solve_lowest;
use common::{disk_case, leading_term, u_origin};

#[test]
fn corner_entry_follows_leading_term() {
    let c = disk_case(0.01, 1);
    let q = assemble_m_matrix(&c.mesh, &c.lap, &c.lap_slice, &c.cfg, 0.5).unwrap();
    let lead = leading_term(u_origin(&c, 0), c.a, 0.5);
    let ratio = q.entries[0][0] / lead;
    assert!((ratio - 1.0).abs() <= 0.2, "M_NN / lead = {ratio}");
}

#[test]
fn max_eigenvalue_and_bound_at_small_a() {
    let c = disk_case(0.005, 1);
    let tau = 0.5;
    let lead = leading_term(u_origin(&c, 0), c.a, tau);
    let q = assemble_m_matrix(&c.mesh, &c.lap, &c.lap_slice, &c.cfg, tau).unwrap();
    let top = max_eig_quadform(&q).unwrap();
    assert!(
        (top / lead - 1.0).abs() <= 0.15,
        "max / lead = {}",
        top / lead
    );

    let bound = upper_bound(&c.mesh, &c.mag, &c.lap, &c.lap_slice, &c.cfg, tau).unwrap();
    let lambda = c.lap_slice.pairs[0].lambda;
    let lambda_a = solve_lowest(&c.mag, 1, 1e-10).unwrap().pairs[0].lambda;
    assert!(lambda <= lambda_a && lambda_a <= bound);
    assert!(
        bound - lambda <= 1.3 * lead,
        "excess / lead = {}",
        (bound - lambda) / lead
    );
}

#[test]
fn three_function_basis() {
    let c = disk_case(0.01, 3);
    let tau = 0.5;
    let basis = build_test_basis(&c.mesh, &c.lap, &c.lap_slice, &c.cfg, tau).unwrap();
    let g = gram_matrix(&basis, &c.mag);
    for (i, row) in g.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                assert!(x.norm() <= 1e-2, "G[{i}][{j}] = {x}");
            }
        }
    }
    // vanishes inside the inner disk, keeps the modulus outside the outer one
    let r_out = (2.0 * c.a).powf(tau);
    let values: Vec<Vec<f64>> = c
        .lap_slice
        .pairs
        .iter()
        .map(|p| {
            c.lap
                .to_vertex_values(&p.vector)
                .iter()
                .map(|z| z.re)
                .collect()
        })
        .collect();
    for (v, p) in c.mesh.vertices.iter().enumerate() {
        let r = p[0].hypot(p[1]);
        for j in 0..3 {
            let b = basis.vectors[j][v];
            if r <= 2.0 * c.a {
                assert_eq!(b.norm(), 0.0);
            } else if r >= r_out {
                assert!((b.norm() - values[j][v].abs()).abs() <= 1e-12);
            }
        }
    }

    let q = assemble_m_matrix(&c.mesh, &c.lap, &c.lap_slice, &c.cfg, tau).unwrap();
    let log_a = c.a.ln().abs();
    // λ₂ = λ₃ on the disk, so only λ₁ lies strictly below λ_N
    let l = c.lap_slice.eigenvalues();
    for j in 0..2 {
        if l[2] - l[j] > 1.0 {
            assert!(q.entries[j][j] < 0.0, "M_jj = {}", q.entries[j][j]);
        }
    }
    for j in 0..3 {
        for k in 0..3 {
            assert_eq!(q.entries[j][k], q.entries[k][j]);
            if j != k {
                // off-diagonal constant measured on this mesh is below 1
                assert!(
                    q.entries[j][k].abs() * log_a <= 1.0,
                    "C = {}",
                    q.entries[j][k].abs() * log_a
                );
            }
        }
    }
}

#[test]
fn bound_chain_and_gram_decay() {
    let mut fitted: Vec<(f64, f64)> = Vec::new();
    for a in [0.1, 0.05, 0.025, 0.0125] {
        let c = disk_case(a, 1);
        let lambda = c.lap_slice.pairs[0].lambda;
        let lambda_a = solve_lowest(&c.mag, 1, 1e-10).unwrap().pairs[0].lambda;
        for tau in [0.25, 0.5, 0.75] {
            let bound = upper_bound(&c.mesh, &c.mag, &c.lap, &c.lap_slice, &c.cfg, tau).unwrap();
            assert!(
                lambda <= lambda_a + 1e-10 && lambda_a <= bound + 1e-10,
                "a = {a}, tau = {tau}"
            );
            let basis = build_test_basis(&c.mesh, &c.lap, &c.lap_slice, &c.cfg, tau).unwrap();
            let dev = (gram_matrix(&basis, &c.mag)[0][0].re - 1.0).abs();
            fitted.push((tau, dev / a.powf(2.0 * tau)));
        }
    }
    // per τ the fitted constant must not grow as a decreases
    for tau in [0.25, 0.5, 0.75] {
        let c: Vec<f64> = fitted.iter().filter(|f| f.0 == tau).map(|f| f.1).collect();
        println!("tau = {tau}: Gram deviation constant C = {:.3}", c[0]);
        assert!(
            c.windows(2).all(|w| w[1] <= w[0] * 1.05),
            "tau = {tau}: {c:?}"
        );
    }
}

#[test]
fn single_entry_and_synthetic_lemma() {
    let one = QuadFormMatrix {
        entries: vec![vec![0.37]],
        a: 0.1,
        tau: 0.5,
    };
    assert_eq!(max_eig_quadform(&one).unwrap(), 0.37);
    let eps = 1e-4;
    let q = QuadFormMatrix {
        entries: vec![vec![-1.0, 0.0], vec![0.0, eps]],
        a: eps,
        tau: 0.5,
    };
    assert!((max_eig_quadform(&q).unwrap() - eps).abs() <= 1e-15);
}
