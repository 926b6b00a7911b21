//! Compressed-row storage for complex Hermitian matrices.

use std::io::Write;

use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

use crate::par;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseHermitian {
    /// Builds the matrix from `(row, col, key, value)` entries.
    ///
    /// Duplicates are summed in `key` order, so the result does not depend on
    /// the order in which entries were produced. Entries that sum to exactly
    /// zero are dropped.
    pub fn from_keyed_triplets<K>(
        dim: usize,
        mut entries: Vec<(usize, usize, K, Complex64)>,
    ) -> Self
    where
        K: Ord + Copy + Send + Sync,
    {
        par::sort_unstable_by_key(&mut entries, |e| (e.0, e.1, e.2));
        let mut row_offsets = vec![0usize; dim + 1];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        let mut k = 0;
        while k < entries.len() {
            let (r, c) = (entries[k].0, entries[k].1);
            let mut sum = Complex64::new(0.0, 0.0);
            while k < entries.len() && entries[k].0 == r && entries[k].1 == c {
                sum += entries[k].3;
                k += 1;
            }
            if sum != Complex64::new(0.0, 0.0) {
                row_offsets[r + 1] += 1;
                col_indices.push(c);
                values.push(sum);
            }
        }
        for r in 0..dim {
            row_offsets[r + 1] += row_offsets[r];
        }
        Self {
            dim,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn from_triplets(dim: usize, entries: Vec<(usize, usize, Complex64)>) -> Self {
        let keyed = entries
            .into_iter()
            .enumerate()
            .map(|(i, (r, c, v))| (r, c, i, v))
            .collect();
        Self::from_keyed_triplets(dim, keyed)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let t = diag
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, i, Complex64::new(d, 0.0)))
            .collect();
        Self::from_triplets(diag.len(), t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        par::map_range(self.dim, |i| self.row(i).map(|(j, v)| v * x[j]).sum())
    }

    /// `xᴴ A y`.
    pub fn form(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let ay = self.matvec(y);
        x.iter().zip(&ay).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest entrywise `|A - Aᴴ|`, including structurally missing mirrors.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut d = vec![vec![Complex64::new(0.0, 0.0); self.dim]; self.dim];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    /// `A - shift·B` in faer's column-major sparse format.
    pub fn shifted_faer(
        &self,
        shift: f64,
        other: &SparseHermitian,
    ) -> Result<SparseColMat<usize, Complex64>> {
        if other.dim != self.dim {
            return Err(Error::InvalidParameter("dimension mismatch".into()));
        }
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                t.push(Triplet::new(i, j, v));
            }
            if shift != 0.0 {
                for (j, v) in other.row(i) {
                    t.push(Triplet::new(i, j, -shift * v));
                }
            }
        }
        SparseColMat::try_new_from_triplets(self.dim, self.dim, &t)
            .map_err(|e| Error::InvalidParameter(format!("sparse conversion failed: {e:?}")))
    }

    /// Coordinate dump, one `i j re im` line per stored entry.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {:e} {:e}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}

pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}
