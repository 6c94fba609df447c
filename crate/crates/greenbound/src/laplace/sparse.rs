//! Compressed sparse row storage and a sparse Cholesky wrapper.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{MatMut, Side};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Square matrix from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> Self {
        trip.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in trip {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// Restriction to the rows and columns listed in `keep`, renumbered in
    /// that order.
    pub fn submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut slot = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            slot[i] = k;
        }
        let mut trip = Vec::new();
        for (k, &i) in keep.iter().enumerate() {
            for (j, v) in self.row(i) {
                if slot[j] != usize::MAX {
                    trip.push((k, slot[j], v));
                }
            }
        }
        CsrMatrix::from_triplets(keep.len(), trip)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }
}

/// Sparse LL^T factorization of a symmetric positive definite matrix,
/// computed once and reused for any number of right-hand sides.
pub struct SparseCholesky {
    n: usize,
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
}

impl std::fmt::Debug for SparseCholesky {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseCholesky").field("n", &self.n).finish()
    }
}

const BLOCK: usize = 32;

impl SparseCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let mut trip = Vec::with_capacity(a.vals.len() / 2 + a.n);
        for i in 0..a.n {
            for (j, v) in a.row(i) {
                if i >= j {
                    trip.push(Triplet::new(i, j, v));
                }
            }
        }
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(a.n, a.n, &trip)
            .map_err(|e| Error::Solver(format!("assembly: {e:?}")))?;
        let llt = mat
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Solver(format!("Cholesky of {}x{} matrix failed: {e:?}", a.n, a.n)))?;
        Ok(SparseCholesky { n: a.n, llt })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.llt.solve_in_place(MatMut::from_column_major_slice_mut(&mut x, self.n, 1));
        x
    }

    /// Solves for `k` right-hand sides stored column-major, in place. Column
    /// blocks are independent, so the result does not depend on threading.
    pub fn solve_many(&self, rhs: &mut [f64], k: usize) {
        assert_eq!(rhs.len(), self.n * k);
        if k == 0 {
            return;
        }
        rhs.par_chunks_mut(self.n * BLOCK).for_each(|chunk| {
            let cols = chunk.len() / self.n;
            self.llt.solve_in_place(MatMut::from_column_major_slice_mut(chunk, self.n, cols));
        });
    }
}
