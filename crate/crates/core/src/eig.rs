//! Lowest eigenpairs of the pencil `(S, M)` and magnetic-real representatives.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fem::AssembledSystem;
use crate::sparse::{dot, SparseHermitian};
use crate::{par, Error, Result};

pub mod dense;

/// Relative gap below which an eigenvalue is treated as degenerate.
pub const SIMPLICITY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    /// M-normalized coefficients over the free degrees of freedom.
    pub vector: Vec<Complex64>,
    /// `‖Sv − λMv‖ / ‖v‖_M`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSlice {
    pub pairs: Vec<EigenPair>,
    /// `λ_{count+1} − λ_count`, infinite when the space is exhausted.
    pub gap_to_next: f64,
}

impl SpectrumSlice {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    /// Smallest relative distance from eigenvalue `index` to its neighbours.
    pub fn relative_gap(&self, index: usize) -> f64 {
        let l = self.pairs[index].lambda;
        let next = if index + 1 < self.pairs.len() {
            self.pairs[index + 1].lambda - l
        } else {
            self.gap_to_next
        };
        let prev = if index > 0 {
            l - self.pairs[index - 1].lambda
        } else {
            f64::INFINITY
        };
        next.min(prev) / l.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub shift: f64,
    /// Krylov basis size; 0 picks a size from the number of wanted pairs.
    pub krylov_dim: usize,
    pub max_restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            shift: 0.0,
            krylov_dim: 0,
            max_restarts: 200,
        }
    }
}

enum Factor {
    Llt(Llt<usize, Complex64>),
    Lu(Lu<usize, Complex64>),
}

/// `x ↦ (S − σM)⁻¹ M x`.
struct ShiftInvert<'a> {
    m: &'a SparseHermitian,
    factor: Factor,
}

impl<'a> ShiftInvert<'a> {
    fn new(s: &SparseHermitian, m: &'a SparseHermitian, shift: f64) -> Result<Self> {
        let a = s.shifted_faer(shift, m)?;
        let factor = match a.sp_cholesky(Side::Lower) {
            Ok(l) => Factor::Llt(l),
            Err(_) => Factor::Lu(a.sp_lu().map_err(|e| Error::Singular(format!("{e:?}")))?),
        };
        Ok(Self { m, factor })
    }

    fn apply_m(&self, mx: &[Complex64]) -> Vec<Complex64> {
        let mut b = Mat::from_fn(mx.len(), 1, |i, _| mx[i]);
        match &self.factor {
            Factor::Llt(l) => l.solve_in_place(b.as_mut()),
            Factor::Lu(l) => l.solve_in_place(b.as_mut()),
        }
        (0..mx.len()).map(|i| b[(i, 0)]).collect()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.apply_m(&self.m.matvec(x))
    }
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    par::for_each_mut(y, |i, yi| *yi += a * x[i]);
}

fn scale(x: &mut [Complex64], a: f64) {
    par::for_each_mut(x, |_, xi| *xi *= a);
}

/// Deterministic, structureless start vectors.
fn start_vector(n: usize, seed: usize) -> Vec<Complex64> {
    let s = seed as f64;
    (0..n)
        .map(|i| {
            let t = i as f64;
            Complex64::new(
                1.0 + 0.5 * (1.7 * t + 0.3 + 2.1 * s).sin() + 0.25 * (0.37 * t * (s + 1.0)).cos(),
                0.0,
            )
        })
        .collect()
}

/// M-orthogonalizes `f` against `basis` (with cached `M v` in `mbasis`), twice.
fn orthogonalize(f: &mut [Complex64], basis: &[Vec<Complex64>], mbasis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        let coeffs: Vec<Complex64> = par::map(mbasis, |mv| dot(mv, f));
        for (v, c) in basis.iter().zip(coeffs) {
            axpy(f, -c, v);
        }
    }
}

fn combine(vs: &[Vec<Complex64>], y: &[Complex64]) -> Vec<Complex64> {
    let n = vs[0].len();
    par::map_range(n, |i| vs.iter().zip(y).map(|(v, c)| v[i] * c).sum())
}

/// Rotates `v` so that its largest-modulus entry is real and positive.
pub fn normalize_phase(v: &mut [Complex64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > v[best].norm() * (1.0 + 1e-9) {
            best = i;
        }
    }
    if v.is_empty() || v[best].norm() == 0.0 {
        return;
    }
    let c = v[best].conj() / v[best].norm();
    for x in v.iter_mut() {
        *x *= c;
    }
}

fn residual(s: &SparseHermitian, m: &SparseHermitian, v: &[Complex64]) -> (f64, f64) {
    let sv = s.matvec(v);
    let mv = m.matvec(v);
    let nm = dot(v, &mv).re;
    let lambda = dot(v, &sv).re / nm;
    let r: f64 = sv
        .iter()
        .zip(&mv)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (lambda, r / nm.sqrt())
}

/// The `count` smallest eigenpairs, each with residual at most `tol`.
pub fn solve_lowest(system: &AssembledSystem, count: usize, tol: f64) -> Result<SpectrumSlice> {
    solve_pencil(&system.s, &system.m, count, tol, &SolverOptions::default())
}

/// Shift-invert Lanczos with full reorthogonalization and thick restarts.
pub fn solve_pencil(
    s: &SparseHermitian,
    m: &SparseHermitian,
    count: usize,
    tol: f64,
    opts: &SolverOptions,
) -> Result<SpectrumSlice> {
    let n = s.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(format!(
            "cannot compute {count} eigenpairs of a {n}-dimensional pencil"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let op = ShiftInvert::new(s, m, opts.shift)?;
    let nev = (count + 1).min(n);
    let kdim = if opts.krylov_dim == 0 {
        (2 * nev + 20).max(40)
    } else {
        opts.krylov_dim.max(nev + 2)
    }
    .min(n);
    let keep = (nev + (kdim - nev) / 2).min(kdim - 1).max(nev.min(kdim));

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut mbasis: Vec<Vec<Complex64>> = Vec::new();
    let mut images: Vec<Vec<Complex64>> = Vec::new();
    let mut seed = 0;

    // Appends `f` to the basis after orthogonalization; false if nothing new remains.
    let push = |f: Vec<Complex64>,
                basis: &mut Vec<Vec<Complex64>>,
                mbasis: &mut Vec<Vec<Complex64>>,
                seed: &mut usize|
     -> bool {
        let mut f = f;
        for attempt in 0..3 {
            let before = m.form(&f, &f).re.max(0.0).sqrt();
            orthogonalize(&mut f, basis, mbasis);
            let mut mf = m.matvec(&f);
            let beta = dot(&f, &mf).re.max(0.0).sqrt();
            if beta > 1e-10 * before && beta > 0.0 {
                scale(&mut f, 1.0 / beta);
                scale(&mut mf, 1.0 / beta);
                basis.push(f);
                mbasis.push(mf);
                return true;
            }
            if attempt == 2 || basis.len() >= n {
                break;
            }
            *seed += 1;
            f = start_vector(n, *seed);
        }
        false
    };

    if !push(start_vector(n, 0), &mut basis, &mut mbasis, &mut seed) {
        return Err(Error::ZeroVector);
    }
    let mut best = f64::INFINITY;
    for restart in 0..=opts.max_restarts {
        let mut exhausted = false;
        while images.len() < basis.len() {
            let w = op.apply(&basis[images.len()]);
            images.push(w.clone());
            if basis.len() < kdim && !push(w, &mut basis, &mut mbasis, &mut seed) {
                exhausted = true;
                break;
            }
        }
        let k = images.len();
        let h = Mat::from_fn(k, k, |i, j| {
            let a = dot(&mbasis[i], &images[j]);
            let b = dot(&mbasis[j], &images[i]).conj();
            0.5 * (a + b)
        });
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Singular(format!("projected eigenproblem failed: {e:?}")))?;
        // largest θ first; θ = 1/(λ − σ)
        let order: Vec<usize> = (0..k).rev().collect();
        let take = nev.min(k);
        let ys: Vec<Vec<Complex64>> = order
            .iter()
            .map(|&c| (0..k).map(|r| evd.U()[(r, c)]).collect())
            .collect();
        let ritz: Vec<Vec<Complex64>> =
            ys[..take].iter().map(|y| combine(&basis[..k], y)).collect();
        let checks: Vec<(f64, f64)> = par::map(&ritz, |v| residual(s, m, v));
        let worst = checks.iter().map(|c| c.1).fold(0.0, f64::max);
        let conv_needed = checks[..count.min(take)]
            .iter()
            .map(|c| c.1)
            .fold(0.0, f64::max);
        best = best.min(worst);
        let full_space = k == n || exhausted;
        if take == nev && worst <= tol || full_space && take >= count && conv_needed <= tol {
            return Ok(finish(ritz, checks, count, m));
        }
        if full_space || restart == opts.max_restarts {
            return Err(Error::NotConverged {
                best_residual: best,
                iterations: restart + 1,
            });
        }
        // thick restart: keep the leading Ritz vectors and the continuation direction
        let last = images.last().expect("nonempty basis").clone();
        let kept = keep.min(k);
        let new_basis: Vec<Vec<Complex64>> =
            ys[..kept].iter().map(|y| combine(&basis[..k], y)).collect();
        let new_mbasis: Vec<Vec<Complex64>> = ys[..kept]
            .iter()
            .map(|y| combine(&mbasis[..k], y))
            .collect();
        let new_images: Vec<Vec<Complex64>> = ys[..kept]
            .iter()
            .map(|y| combine(&images[..k], y))
            .collect();
        basis = new_basis;
        mbasis = new_mbasis;
        images = new_images;
        if !push(last, &mut basis, &mut mbasis, &mut seed) {
            seed += 1;
            if !push(start_vector(n, seed), &mut basis, &mut mbasis, &mut seed) {
                return Err(Error::NotConverged {
                    best_residual: best,
                    iterations: restart + 1,
                });
            }
        }
    }
    unreachable!("loop returns on its final iteration")
}

fn finish(
    ritz: Vec<Vec<Complex64>>,
    checks: Vec<(f64, f64)>,
    count: usize,
    m: &SparseHermitian,
) -> SpectrumSlice {
    let mut pairs: Vec<EigenPair> = ritz
        .into_iter()
        .zip(checks)
        .map(|(mut v, (lambda, residual))| {
            let nm = m.form(&v, &v).re.sqrt();
            scale(&mut v, 1.0 / nm);
            normalize_phase(&mut v);
            EigenPair {
                lambda,
                vector: v,
                residual,
            }
        })
        .collect();
    pairs.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let gap_to_next = if pairs.len() > count {
        pairs[count].lambda - pairs[count - 1].lambda
    } else {
        f64::INFINITY
    };
    pairs.truncate(count);
    SpectrumSlice { pairs, gap_to_next }
}

/// Result of aligning an eigenvector with the conjugation `Kv = g·v̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticReal {
    pub pair: EigenPair,
    /// `‖Kw − w‖_M`.
    pub conjugation_residual: f64,
}

/// Applies `Kv = g·v̄` with `g` given per degree of freedom.
pub fn conjugate(v: &[Complex64], gauge: &[Complex64]) -> Vec<Complex64> {
    v.iter().zip(gauge).map(|(x, g)| g * x.conj()).collect()
}

/// Rotates eigenvector `index` of `slice` by a unit phase so that it is fixed by `K`.
///
/// `gauge` holds `e^{2iψ}` at each degree of freedom. The eigenvalue must be
/// simple to relative gap [`SIMPLICITY_THRESHOLD`].
pub fn make_magnetic_real(
    slice: &SpectrumSlice,
    index: usize,
    gauge: &[Complex64],
    m: &SparseHermitian,
) -> Result<MagneticReal> {
    let gap = slice.relative_gap(index);
    if !(gap >= SIMPLICITY_THRESHOLD) {
        return Err(Error::NearDegenerate {
            index,
            gap,
            threshold: SIMPLICITY_THRESHOLD,
        });
    }
    let pair = &slice.pairs[index];
    let v = &pair.vector;
    let kv = conjugate(v, gauge);
    // K(cv) = c̄·Kv, so Kv = c²v on an exact K-eigenvector.
    let c2 = m.form(v, &kv);
    if c2.norm() == 0.0 {
        return Err(Error::NotAligned(
            "vector is orthogonal to its conjugate".into(),
        ));
    }
    let c = (c2 / c2.norm()).sqrt();
    let mut w: Vec<Complex64> = v.iter().map(|x| c * x).collect();
    let nm = m.form(&w, &w).re.sqrt();
    scale(&mut w, 1.0 / nm);
    let kw = conjugate(&w, gauge);
    let diff: Vec<Complex64> = kw.iter().zip(&w).map(|(a, b)| a - b).collect();
    let conjugation_residual = m.form(&diff, &diff).re.max(0.0).sqrt();
    Ok(MagneticReal {
        pair: EigenPair {
            lambda: pair.lambda,
            vector: w,
            residual: pair.residual,
        },
        conjugation_residual,
    })
}

/// Makes a real eigenvector real-valued with a nonnegative entry at `dof`.
pub fn fix_sign(pair: &mut EigenPair, dof: usize) {
    let x = pair.vector[dof];
    let c = if x.norm() > 0.0 {
        x.conj() / x.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    for v in pair.vector.iter_mut() {
        *v *= c;
    }
}

/// Coefficient of `pair` at the origin vertex of the mesh.
pub fn value_at_origin(
    pair: &EigenPair,
    system: &AssembledSystem,
    origin: Option<usize>,
) -> Result<f64> {
    let v = origin.ok_or(Error::OriginEliminated)?;
    let dof = system
        .dof_map
        .get(v)
        .copied()
        .flatten()
        .ok_or(Error::OriginEliminated)?;
    Ok(pair.vector[dof].re)
}
