//! Orthogonal complements of ranges of structurally sparse matrices.
//!
//! The rows and columns of a matrix split into connected components of its
//! nonzero pattern; the range is the orthogonal sum of the ranges of the
//! component blocks. Each block is factorized on its own, which keeps the
//! cost proportional to the largest block rather than to the whole matrix.

use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use num_traits::Zero;

use super::decomp::svd;
use super::matrix::{ComplexMatrix, Tolerance, C64};

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so component order is stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Row/column blocks of the nonzero pattern, ordered by their first row.
pub struct Components {
    pub blocks: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Components {
    pub fn of(x: &ComplexMatrix) -> Self {
        let (m, n) = x.shape();
        let mut uf = UnionFind::new(m + n);
        for i in 0..m {
            for (j, z) in x.row(i).iter().enumerate() {
                if !z.is_zero() {
                    uf.union(i, m + j);
                }
            }
        }
        let mut slot = vec![usize::MAX; m + n];
        let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for node in 0..m + n {
            let root = uf.find(node);
            if slot[root] == usize::MAX {
                slot[root] = blocks.len();
                blocks.push((Vec::new(), Vec::new()));
            }
            let b = &mut blocks[slot[root]];
            if node < m {
                b.0.push(node);
            } else {
                b.1.push(node - m);
            }
        }
        Components { blocks }
    }
}

/// Orthonormal basis of the orthogonal complement of the column space of
/// `x`, together with the rank of `x`.
///
/// Rank decisions use the global rule: a singular value of any block counts
/// as zero when it is below `tol.eps` times the largest singular value of
/// the whole matrix.
pub fn structured_complement(x: &ComplexMatrix, tol: Tolerance) -> (ComplexMatrix, usize) {
    let m = x.rows();
    let comps = Components::of(x);
    let mut factored = Vec::with_capacity(comps.blocks.len());
    let mut top = 0.0f64;
    for (rows, cols) in &comps.blocks {
        if rows.is_empty() {
            continue;
        }
        if cols.is_empty() {
            factored.push((rows, None));
            continue;
        }
        let block = x.select_rows(rows).select_columns(cols);
        let d = svd(&block.adjoint());
        top = top.max(d.max_sigma());
        factored.push((rows, Some(d)));
    }
    let cut = tol.cutoff(top);
    let mut basis: Vec<Vec<(usize, num_complex::Complex<f64>)>> = Vec::new();
    let mut rank = 0;
    for (rows, d) in factored {
        match d {
            None => {
                for &r in rows {
                    basis.push(vec![(r, num_complex::Complex::new(1.0, 0.0))]);
                }
            }
            Some(d) => {
                for (k, &s) in d.sigma.iter().enumerate() {
                    if s > cut && s > 0.0 {
                        rank += 1;
                        continue;
                    }
                    basis.push(rows.iter().enumerate().map(|(i, &r)| (r, d.v[(i, k)])).collect());
                }
            }
        }
    }
    let mut out = ComplexMatrix::zeros(m, basis.len());
    for (j, col) in basis.iter().enumerate() {
        for &(r, z) in col {
            out[(r, j)] = z;
        }
    }
    (out, rank)
}

/// Orthonormal basis of the orthogonal complement of the range of an
/// isometry `x`, by pivoted Gram–Schmidt on the columns of `I − x x^*`.
///
/// Rows of `x` that vanish contribute coordinate vectors directly. On the
/// others the projector is never formed: its diagonal is `1 − ‖row‖²` and
/// each chosen column costs one product with `x`. Returns `None` when the
/// pivots do not show a clean rank `rows − cols`, i.e. `x` is not an
/// isometry to `tol`.
pub fn isometry_complement(x: &ComplexMatrix, tol: Tolerance) -> Option<ComplexMatrix> {
    let (m, p) = x.shape();
    if p > m {
        return None;
    }
    let (live, dead): (Vec<usize>, Vec<usize>) = (0..m).partition(|&i| x.row(i).iter().any(|z| !z.is_zero()));
    let xl = x.select_rows(&live);
    let ml = live.len();
    let r = ml.checked_sub(p)?;
    let mut residual: Vec<f64> = (0..ml)
        .map(|i| 1.0 - xl.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>())
        .collect();
    let mut q = ComplexMatrix::zeros(ml, r);
    let floor = (tol.eps * m as f64).sqrt();
    for s in 0..r {
        let (j, &best) = residual.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        if best < floor {
            return None;
        }
        // Column j of I − x x^*.
        let xj: Vec<C64> = xl.row(j).iter().map(|z| z.conj()).collect();
        let mut v: Vec<C64> = (0..ml)
            .map(|i| -xl.row(i).iter().zip(&xj).map(|(a, b)| a * b).sum::<C64>())
            .collect();
        v[j] += C64::new(1.0, 0.0);
        // Two passes against the chosen columns keep orthogonality tight.
        for _ in 0..2 {
            for t in 0..s {
                let c: C64 = (0..ml).map(|i| q[(i, t)].conj() * v[i]).sum();
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi -= q[(i, t)] * c;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < floor {
            return None;
        }
        for (i, vi) in v.iter().enumerate() {
            q[(i, s)] = vi / norm;
            residual[i] -= q[(i, s)].norm_sqr();
        }
    }
    let left = residual.iter().fold(0.0f64, |a, &b| a.max(b));
    if left >= floor {
        return None;
    }
    let mut out = ComplexMatrix::zeros(m, dead.len() + r);
    for (c, &i) in dead.iter().enumerate() {
        out[(i, c)] = C64::new(1.0, 0.0);
    }
    for (k, &i) in live.iter().enumerate() {
        for s in 0..r {
            out[(i, dead.len() + s)] = q[(k, s)];
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kernel_and_range, C64};

    #[test]
    fn complement_of_a_block_diagonal_isometry() {
        // Columns: e0, (e1+e2)/√2, e4. Rows 3 and 5 are untouched.
        let s = 0.5f64.sqrt();
        let mut x = ComplexMatrix::zeros(6, 3);
        x[(0, 0)] = C64::new(1.0, 0.0);
        x[(1, 1)] = C64::new(s, 0.0);
        x[(2, 1)] = C64::new(0.0, s);
        x[(4, 2)] = C64::new(1.0, 0.0);
        let (q, rank) = structured_complement(&x, Tolerance::default());
        assert_eq!(rank, 3);
        assert_eq!(q.cols(), 3);
        assert!(q.isometry_defect() < 1e-14);
        assert!(q.adjoint_mul(&x).frobenius_norm() < 1e-14);
    }

    #[test]
    fn isometry_complement_completes_a_unitary() {
        // Three columns of the unitary Fourier matrix on C^5.
        let x = ComplexMatrix::from_fn(5, 3, |i, j| {
            C64::from_polar(0.2f64.sqrt(), 2.0 * core::f64::consts::PI * (i * j) as f64 / 5.0)
        });
        let q = isometry_complement(&x, Tolerance::default()).unwrap();
        assert_eq!(q.shape(), (5, 2));
        let full = ComplexMatrix::hstack(5, &[x.clone(), q]);
        assert!(full.unitarity_defect() < 1e-13);
        // A non-isometry is refused.
        assert!(isometry_complement(&x.scale_real(0.5), Tolerance::default()).is_none());
    }

    #[test]
    fn agrees_with_dense_cokernel_dimension() {
        let x = ComplexMatrix::from_fn(7, 4, |i, j| {
            if (i + 2 * j) % 3 == 0 {
                C64::new(1.0 + i as f64, j as f64 - 1.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let (q, rank) = structured_complement(&x, Tolerance::default());
        let (cokernel, _) = kernel_and_range(&x.adjoint(), Tolerance::default()).unwrap();
        assert_eq!(q.cols(), cokernel.cols());
        assert_eq!(rank + q.cols(), 7);
        assert!(q.adjoint_mul(&x).frobenius_norm() < 1e-12);
        assert!(q.isometry_defect() < 1e-12);
    }
}
