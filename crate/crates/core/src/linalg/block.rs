//! Operators on a direct sum, stored as a grid of optional dense blocks.
//!
//! The graded spaces of the dilation construction decompose into levels and
//! the operators only connect neighbouring levels, so absent blocks are the
//! common case.

use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use super::matrix::{ComplexMatrix, C64};

#[derive(Clone, Debug)]
pub struct BlockMatrix {
    row_sizes: Vec<usize>,
    col_sizes: Vec<usize>,
    blocks: Vec<Option<ComplexMatrix>>,
}

impl BlockMatrix {
    pub fn zeros(row_sizes: &[usize], col_sizes: &[usize]) -> Self {
        BlockMatrix {
            row_sizes: row_sizes.to_vec(),
            col_sizes: col_sizes.to_vec(),
            blocks: vec![None; row_sizes.len() * col_sizes.len()],
        }
    }

    pub fn identity(sizes: &[usize]) -> Self {
        let mut m = Self::zeros(sizes, sizes);
        for (l, &s) in sizes.iter().enumerate() {
            m.set(l, l, ComplexMatrix::identity(s));
        }
        m
    }

    /// Splits a dense matrix along the given partitions, dropping all-zero
    /// blocks.
    pub fn from_dense(a: &ComplexMatrix, row_sizes: &[usize], col_sizes: &[usize]) -> Self {
        assert_eq!(a.rows(), row_sizes.iter().sum::<usize>());
        assert_eq!(a.cols(), col_sizes.iter().sum::<usize>());
        let mut m = Self::zeros(row_sizes, col_sizes);
        let mut r0 = 0;
        for (r, &rs) in row_sizes.iter().enumerate() {
            let mut c0 = 0;
            for (c, &cs) in col_sizes.iter().enumerate() {
                let b = a.submatrix(r0, c0, rs, cs);
                if b.nnz() > 0 {
                    m.set(r, c, b);
                }
                c0 += cs;
            }
            r0 += rs;
        }
        m
    }

    pub fn row_sizes(&self) -> &[usize] {
        &self.row_sizes
    }

    pub fn col_sizes(&self) -> &[usize] {
        &self.col_sizes
    }

    pub fn rows(&self) -> usize {
        self.row_sizes.iter().sum()
    }

    pub fn cols(&self) -> usize {
        self.col_sizes.iter().sum()
    }

    fn idx(&self, r: usize, c: usize) -> usize {
        r * self.col_sizes.len() + c
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&ComplexMatrix> {
        self.blocks[self.idx(r, c)].as_ref()
    }

    /// The block at `(r, c)`, materialized as zeros when absent.
    pub fn block(&self, r: usize, c: usize) -> ComplexMatrix {
        self.get(r, c)
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.row_sizes[r], self.col_sizes[c]))
    }

    pub fn set(&mut self, r: usize, c: usize, b: ComplexMatrix) {
        assert_eq!(b.shape(), (self.row_sizes[r], self.col_sizes[c]), "block shape");
        let i = self.idx(r, c);
        self.blocks[i] = Some(b);
    }

    pub fn clear(&mut self, r: usize, c: usize) {
        let i = self.idx(r, c);
        self.blocks[i] = None;
    }

    pub fn add_to(&mut self, r: usize, c: usize, b: &ComplexMatrix) {
        let i = self.idx(r, c);
        match &mut self.blocks[i] {
            Some(existing) => *existing += b,
            slot @ None => {
                assert_eq!(b.shape(), (self.row_sizes[r], self.col_sizes[c]), "block shape");
                *slot = Some(b.clone());
            }
        }
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut ComplexMatrix {
        let (rs, cs) = (self.row_sizes[r], self.col_sizes[c]);
        let i = self.idx(r, c);
        self.blocks[i].get_or_insert_with(|| ComplexMatrix::zeros(rs, cs))
    }

    pub fn matmul(&self, rhs: &BlockMatrix) -> BlockMatrix {
        assert_eq!(self.col_sizes, rhs.row_sizes, "block partition mismatch");
        let mut out = BlockMatrix::zeros(&self.row_sizes, &rhs.col_sizes);
        for r in 0..self.row_sizes.len() {
            for k in 0..self.col_sizes.len() {
                let Some(a) = self.get(r, k) else { continue };
                for c in 0..rhs.col_sizes.len() {
                    if let Some(b) = rhs.get(k, c) {
                        out.add_to(r, c, &a.matmul(b));
                    }
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> BlockMatrix {
        let mut out = BlockMatrix::zeros(&self.col_sizes, &self.row_sizes);
        for r in 0..self.row_sizes.len() {
            for c in 0..self.col_sizes.len() {
                if let Some(b) = self.get(r, c) {
                    out.set(c, r, b.adjoint());
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> BlockMatrix {
        let mut out = self.clone();
        for b in out.blocks.iter_mut().flatten() {
            *b = b.scale(s);
        }
        out
    }

    pub fn add(&self, rhs: &BlockMatrix) -> BlockMatrix {
        self.combine(rhs, false)
    }

    pub fn sub(&self, rhs: &BlockMatrix) -> BlockMatrix {
        self.combine(rhs, true)
    }

    fn combine(&self, rhs: &BlockMatrix, negate: bool) -> BlockMatrix {
        assert_eq!(self.row_sizes, rhs.row_sizes);
        assert_eq!(self.col_sizes, rhs.col_sizes);
        let mut out = self.clone();
        for r in 0..self.row_sizes.len() {
            for c in 0..self.col_sizes.len() {
                if let Some(b) = rhs.get(r, c) {
                    if negate {
                        out.add_to(r, c, &b.scale_real(-1.0));
                    } else {
                        out.add_to(r, c, b);
                    }
                }
            }
        }
        out
    }

    /// Keeps only the blocks whose row index is `<= max_row` and column index
    /// is `<= max_col`.
    pub fn window(&self, max_row: usize, max_col: usize) -> BlockMatrix {
        let mut out = self.clone();
        for r in 0..self.row_sizes.len() {
            for c in 0..self.col_sizes.len() {
                if r > max_row || c > max_col {
                    out.clear(r, c);
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .map(|b| {
                let n = b.frobenius_norm();
                n * n
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows(), self.cols());
        let mut r0 = 0;
        for (r, &rs) in self.row_sizes.iter().enumerate() {
            let mut c0 = 0;
            for (c, &cs) in self.col_sizes.iter().enumerate() {
                if let Some(b) = self.get(r, c) {
                    out.set_block(r0, c0, b);
                }
                c0 += cs;
            }
            r0 += rs;
        }
        out
    }

    /// Applies the operator to a block vector given as one column per block.
    pub fn apply(&self, x: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        assert_eq!(x.len(), self.col_sizes.len());
        let width = x.first().map_or(0, |v| v.cols());
        let mut out: Vec<ComplexMatrix> = self
            .row_sizes
            .iter()
            .map(|&s| ComplexMatrix::zeros(s, width))
            .collect();
        for (r, o) in out.iter_mut().enumerate() {
            for (c, xc) in x.iter().enumerate() {
                if let Some(b) = self.get(r, c) {
                    *o += &b.matmul(xc);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize, cols: usize, seed: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            C64::new(
                (seed + i as f64 * 1.3 + j as f64).sin(),
                (seed * j as f64 - i as f64).cos(),
            )
        })
    }

    #[test]
    fn block_product_matches_dense_product() {
        let sizes = [1, 3, 2];
        let a = BlockMatrix::from_dense(&sample(6, 6, 0.2), &sizes, &sizes);
        let mut b = BlockMatrix::from_dense(&sample(6, 6, 1.7), &sizes, &sizes);
        b.clear(1, 2);
        let want = a.to_dense().matmul(&b.to_dense());
        assert!(a.matmul(&b).to_dense().distance(&want) < 1e-12);
        assert!(a.adjoint().to_dense().distance(&a.to_dense().adjoint()) == 0.0);
        assert!((a.frobenius_norm() - a.to_dense().frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn apply_matches_dense() {
        let sizes = [2, 1, 3];
        let a = BlockMatrix::from_dense(&sample(6, 6, 0.5), &sizes, &sizes);
        let x = sample(6, 2, 2.5);
        let parts = [
            x.submatrix(0, 0, 2, 2),
            x.submatrix(2, 0, 1, 2),
            x.submatrix(3, 0, 3, 2),
        ];
        let y = a.apply(&parts);
        let dense = a.to_dense().matmul(&x);
        assert!(ComplexMatrix::vstack(2, &y).distance(&dense) < 1e-12);
    }
}
