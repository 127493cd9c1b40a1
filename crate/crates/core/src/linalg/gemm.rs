//! Matrix product kernels.
//!
//! The dilation operators are mostly partial permutations with a few dense
//! blocks, so the product picks between a blocked dense kernel and two
//! zero-skipping kernels based on a rough operation count.

use alloc::vec::Vec;

use num_traits::Zero;

use super::matrix::{ComplexMatrix, C64};

// Relative per-multiply-add costs of the kernels below, measured against the
// blocked dense kernel on a single core.
const LEFT_SPARSE_WEIGHT: f64 = 1.5;
const ROW_LIST_WEIGHT: f64 = 3.0;

pub(super) fn product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, k) = a.shape();
    let n = b.cols();
    if m == 0 || n == 0 || k == 0 {
        return ComplexMatrix::zeros(m, n);
    }
    let nnz_a = a.nnz() as f64;
    let nnz_b = b.nnz() as f64;
    if nnz_a == 0.0 || nnz_b == 0.0 {
        return ComplexMatrix::zeros(m, n);
    }
    let dense = (m * k * n) as f64;
    let left = LEFT_SPARSE_WEIGHT * nnz_a * n as f64;
    let rows = ROW_LIST_WEIGHT * nnz_a * (nnz_b / k as f64) + (k * n) as f64;
    if rows < left && rows < dense {
        row_list(a, b)
    } else if left < dense {
        left_sparse(a, b)
    } else {
        dense_gemm(a, b)
    }
}

fn left_sparse(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, k) = a.shape();
    let n = b.cols();
    let mut c = ComplexMatrix::zeros(m, n);
    for i in 0..m {
        let arow = a.row(i);
        let crow = c.row_mut(i);
        for (kk, &x) in arow.iter().enumerate().take(k) {
            if x.is_zero() {
                continue;
            }
            for (cj, bj) in crow.iter_mut().zip(b.row(kk)) {
                *cj += x * bj;
            }
        }
    }
    c
}

fn row_list(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, k) = a.shape();
    let n = b.cols();
    let mut starts = Vec::with_capacity(k + 1);
    let mut entries: Vec<(usize, C64)> = Vec::new();
    for kk in 0..k {
        starts.push(entries.len());
        for (j, &y) in b.row(kk).iter().enumerate() {
            if !y.is_zero() {
                entries.push((j, y));
            }
        }
    }
    starts.push(entries.len());
    let mut c = ComplexMatrix::zeros(m, n);
    for i in 0..m {
        let arow = a.row(i);
        let crow = c.row_mut(i);
        for (kk, &x) in arow.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(j, y) in &entries[starts[kk]..starts[kk + 1]] {
                crow[j] += x * y;
            }
        }
    }
    c
}

fn dense_gemm(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, k) = a.shape();
    let n = b.cols();
    let mut c = ComplexMatrix::zeros(m, n);
    // SAFETY: `Complex<f64>` is `#[repr(C)]` with fields (re, im), so it has
    // the layout of `[f64; 2]`. The strides describe the row-major buffers
    // exactly, and the buffers have the advertised sizes.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.data().as_ptr() as *const [f64; 2],
            k as isize,
            1,
            b.data().as_ptr() as *const [f64; 2],
            n as isize,
            1,
            [0.0, 0.0],
            c.data_mut().as_mut_ptr() as *mut [f64; 2],
            n as isize,
            1,
        );
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
        })
    }

    fn patterned(rows: usize, cols: usize, keep: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            if (i * 7 + j * 3) % keep == 0 {
                C64::new((i as f64).sin() + 0.3, (j as f64).cos())
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn all_kernels_agree_with_the_naive_product() {
        for &(ka, kb) in &[(1, 1), (5, 1), (1, 6), (9, 11)] {
            let a = patterned(13, 17, ka);
            let b = patterned(17, 8, kb);
            let want = naive(&a, &b);
            assert!(dense_gemm(&a, &b).distance(&want) < 1e-12);
            assert!(left_sparse(&a, &b).distance(&want) < 1e-12);
            assert!(row_list(&a, &b).distance(&want) < 1e-12);
            assert!(product(&a, &b).distance(&want) < 1e-12);
        }
    }
}
