//! Finite-element spectral laboratory for Schrödinger operators with two
//! coalescing Aharonov–Bohm poles of circulation 1/2.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] builds graded, conforming triangulations of planar domains,
//!   optionally cut along a slit.
//! * [`potential`] evaluates the two-pole vector potential, its phase and the
//!   gauge used by the magnetic conjugation.
//! * [`fem`] assembles the sparse Hermitian stiffness and mass matrices.
//! * [`eig`] solves for the lowest eigenpairs and aligns magnetic-real
//!   representatives.
//! * [`nodal`] extracts nodal sets as planar graphs.
//! * [`bounds`] builds the cut-off test functions and the resulting
//!   variational upper bounds.
//! * [`harness`] drives sweeps over the pole distance and writes reports.
//!
//! Data-parallel loops (element assembly, matrix-vector products, sweeps)
//! run on rayon when the `parallel` feature is enabled, which it is by
//! default; without it every loop runs sequentially with identical results.

pub mod bounds;
pub mod eig;
mod error;
pub mod fem;
pub mod geometry;
pub mod harness;
pub mod nodal;
pub mod oracle;
pub(crate) mod par;
pub mod potential;
pub mod quadrature;
pub mod sparse;

pub use error::{Error, Result};

/// A point (or vector) in the plane.
pub type Point = [f64; 2];

pub use num_complex::Complex64;
