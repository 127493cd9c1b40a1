//! Jacobi eigen- and singular value decompositions and what is built on them.
//!
//! Both decompositions are cyclic Jacobi sweeps with a fixed pivot order, so
//! results are bit-for-bit reproducible for identical input.

use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use num_traits::Zero;

use super::matrix::{ComplexMatrix, Tolerance, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
// Pairs whose normalized coupling is below this are treated as orthogonal.
const JACOBI_EPS: f64 = 1e-15;

/// Thin record of `A V = U diag(sigma)`.
///
/// `sigma` is sorted in descending order and has one entry per column of `A`.
/// `v` is the full unitary on the domain; `u` has the columns of `A V`
/// normalized where the singular value is nonzero and zero elsewhere.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn max_sigma(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol.eps` times the largest one.
    pub fn rank(&self, tol: Tolerance) -> usize {
        let cut = tol.cutoff(self.max_sigma());
        self.sigma.iter().filter(|&&s| s > cut && s > 0.0).count()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &ComplexMatrix) -> Svd {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = alloc::vec![C64::zero(); n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let mut norms: Vec<f64> = cols.iter().map(|c| sq_norm(c)).collect();
    // Columns this small relative to the whole matrix are numerically zero;
    // rotating them only churns rounding noise into `v`.
    let negligible = norms.iter().sum::<f64>() * JACOBI_EPS * JACOBI_EPS;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= JACOBI_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                rotate_pair(&mut left[p], &mut right[0], c, s, phase);
                let (left, right) = vcols.split_at_mut(q);
                rotate_pair(&mut left[p], &mut right[0], c, s, phase);
                norms[p] = sq_norm(&cols[p]);
                norms[q] = sq_norm(&cols[q]);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sig: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    order.sort_by(|&i, &j| sig[j].partial_cmp(&sig[i]).unwrap_or(core::cmp::Ordering::Equal));

    let mut u = ComplexMatrix::zeros(m, n);
    let mut v = ComplexMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = sig[j];
        sigma.push(s);
        if s > 0.0 {
            for i in 0..m {
                u[(i, k)] = cols[j][i] / s;
            }
        }
        for i in 0..n {
            v[(i, k)] = vcols[j][i];
        }
    }
    Svd { u, sigma, v }
}

fn sq_norm(c: &[C64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

// Rotates (x, y) <- (c x - s conj(phase) y, s phase x + c y), which zeroes
// the inner product of the two columns when the parameters come from their
// Gram entries.
fn rotate_pair(x: &mut [C64], y: &mut [C64], c: f64, s: f64, phase: C64) {
    let pc = phase.conj();
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let a = *xi;
        let b = *yi;
        *xi = a * c - pc * b * s;
        *yi = phase * a * s + b * c;
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and a
/// unitary whose columns are the matching eigenvectors.
///
/// Only the Hermitian part of the input is used.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::invalid("eigendecomposition needs a square matrix"));
    }
    if !a.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let n = a.rows();
    let mut h = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let fro = h.frobenius_norm();
    if fro > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
                .map(|(p, q)| h[(p, q)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= JACOBI_EPS * fro {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = h[(p, q)];
                    let g = apq.norm();
                    if g <= 1e-300 || g <= 0.1 * JACOBI_EPS * fro {
                        continue;
                    }
                    let phase = apq / g;
                    let theta = (h[(q, q)].re - h[(p, p)].re) / (2.0 * g);
                    let t = if theta == 0.0 {
                        1.0
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let e = phase.conj();
                    // h <- J^* h J with J = [[c, s], [-s e, c e]] on (p, q).
                    for k in 0..n {
                        let x = h[(k, p)];
                        let y = h[(k, q)];
                        h[(k, p)] = x * c - e * y * s;
                        h[(k, q)] = x * s + e * y * c;
                    }
                    for k in 0..n {
                        let x = h[(p, k)];
                        let y = h[(q, k)];
                        h[(p, k)] = x * c - phase * y * s;
                        h[(q, k)] = x * s + phase * y * c;
                    }
                    h[(p, q)] = C64::zero();
                    h[(q, p)] = C64::zero();
                    h[(p, p)] = C64::new(h[(p, p)].re, 0.0);
                    h[(q, q)] = C64::new(h[(q, q)].re, 0.0);
                    for k in 0..n {
                        let x = v[(k, p)];
                        let y = v[(k, q)];
                        v[(k, p)] = x * c - e * y * s;
                        v[(k, q)] = x * s + e * y * c;
                    }
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        vals[i]
            .partial_cmp(&vals[j])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    Ok((sorted_vals, v.select_columns(&order)))
}

/// Orthonormal bases of the null space and of the column space of `a`.
pub fn kernel_and_range(a: &ComplexMatrix, tol: Tolerance) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let d = svd(a);
    let r = d.rank(tol);
    let n = a.cols();
    let kernel = d.v.submatrix(0, r, n, n - r);
    let range = d.u.submatrix(0, 0, a.rows(), r);
    Ok((kernel, range))
}

pub fn rank(a: &ComplexMatrix, tol: Tolerance) -> usize {
    svd(a).rank(tol)
}

/// Moore–Penrose pseudo-inverse with the global rank rule.
pub fn pinv(a: &ComplexMatrix, tol: Tolerance) -> ComplexMatrix {
    let d = svd(a);
    let r = d.rank(tol);
    let mut out = ComplexMatrix::zeros(a.cols(), a.rows());
    for k in 0..r {
        let s = 1.0 / d.sigma[k];
        for i in 0..a.cols() {
            let vik = d.v[(i, k)] * s;
            if vik.is_zero() {
                continue;
            }
            for j in 0..a.rows() {
                out[(i, j)] += vik * d.u[(j, k)].conj();
            }
        }
    }
    out
}

/// Positive square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-eps·s, eps·s]` are set to zero, where `s` is the larger
/// of 1 and the spectral radius: roundoff there would otherwise be amplified
/// to its square root, while the square changes by at most `eps·s`.
pub fn psd_sqrt(p: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let (vals, v) = hermitian_eigen(p)?;
    let scale = vals.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let threshold = tol.cutoff(scale);
    if let Some(&lowest) = vals.first() {
        if lowest < -threshold {
            return Err(Error::NotPositive {
                eigenvalue: lowest,
                threshold,
            });
        }
    }
    let roots: Vec<C64> = vals
        .iter()
        .map(|&x| C64::new(if x <= threshold { 0.0 } else { x.sqrt() }, 0.0))
        .collect();
    let vd = v.matmul(&ComplexMatrix::diag(&roots));
    Ok(vd.matmul(&v.adjoint()).hermitian_part())
}

/// Extends a partial isometry `t0: C^p -> C^q` to an isometry or coisometry.
///
/// The orthonormal kernel basis of `t0` is paired, column by column, with the
/// orthonormal basis of the orthogonal complement of its range; surplus
/// vectors on either side are left unpaired.
pub fn extend_partial_isometry(t0: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    if !t0.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let proj = t0.adjoint_mul(t0);
    let defect = proj.matmul(&proj).distance(&proj);
    if defect > tol.cutoff(1.0 + proj.frobenius_norm()) {
        return Err(Error::NotPartialIsometry { defect });
    }
    let (kernel, _) = kernel_and_range(t0, tol)?;
    let (cokernel, _) = kernel_and_range(&t0.adjoint(), tol)?;
    let pairs = kernel.cols().min(cokernel.cols());
    let mut t = t0.clone();
    for k in 0..pairs {
        for i in 0..t.rows() {
            let c = cokernel[(i, k)];
            if c.is_zero() {
                continue;
            }
            for j in 0..t.cols() {
                t[(i, j)] += c * kernel[(j, k)].conj();
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(rows: usize, cols: usize, v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real(rows, cols, v).unwrap()
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |v| {
            ComplexMatrix::new(rows, cols, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
        })
    }

    fn arb_square() -> impl Strategy<Value = ComplexMatrix> {
        (1usize..=8).prop_flat_map(|n| arb_matrix(n, n))
    }

    #[test]
    fn kernel_and_range_of_a_diagonal_projection() {
        let (k, r) = kernel_and_range(&real(2, 2, &[1.0, 0.0, 0.0, 0.0]), Tolerance::default()).unwrap();
        assert_eq!(k.shape(), (2, 1));
        assert_eq!(r.shape(), (2, 1));
        assert!((k[(1, 0)].norm() - 1.0).abs() < 1e-15 && k[(0, 0)].norm() < 1e-15);
        assert!((r[(0, 0)].norm() - 1.0).abs() < 1e-15 && r[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn kernel_and_range_of_zero() {
        let (k, r) = kernel_and_range(&ComplexMatrix::zeros(2, 2), Tolerance::default()).unwrap();
        assert_eq!(k.cols(), 2);
        assert_eq!(r.cols(), 0);
    }

    #[test]
    fn rank_one_wide_matrix_has_two_dimensional_kernel() {
        let x = [c(0.3, -0.2), c(1.1, 0.4)];
        let y = [c(-0.7, 0.5), c(0.2, 0.9), c(0.6, -0.1)];
        let a = ComplexMatrix::from_fn(2, 3, |i, j| x[i] * y[j].conj());
        // Independent oracle: zero eigenvalues of A^*A. Squaring halves the
        // usable digits, so the cutoff is on the squared scale.
        let (vals, _) = hermitian_eigen(&a.adjoint_mul(&a)).unwrap();
        let top = vals.last().unwrap();
        let oracle = vals.iter().filter(|&&v| v.abs() <= 1e-12 * top).count();
        let (k, _) = kernel_and_range(&a, Tolerance::default()).unwrap();
        assert_eq!(oracle, 2);
        assert_eq!(k.cols(), oracle);
        assert!(a.matmul(&k).frobenius_norm() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_input() {
        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(
            kernel_and_range(&a, Tolerance::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn psd_sqrt_examples() {
        let tol = Tolerance::default();
        let i2 = ComplexMatrix::identity(2);
        assert!(psd_sqrt(&i2, tol).unwrap().distance(&i2) < 1e-14);
        let r = psd_sqrt(&real(2, 2, &[4.0, 0.0, 0.0, 9.0]), tol).unwrap();
        assert!(r.distance(&real(2, 2, &[2.0, 0.0, 0.0, 3.0])) < 1e-14);
        let p = real(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let r = psd_sqrt(&p, tol).unwrap();
        assert!(r.matmul(&r).distance(&p) < 1e-13);
        // The eigenvalues are 1 and 3, so the root has eigenvalues 1 and √3.
        let (vals, _) = hermitian_eigen(&r).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-13 && (vals[1] - 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn psd_sqrt_rejects_negative_and_clamps_rounding() {
        let tol = Tolerance::default();
        let neg = real(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        assert!(matches!(psd_sqrt(&neg, tol), Err(Error::NotPositive { .. })));
        let tiny = real(2, 2, &[1.0, 0.0, 0.0, -1e-12]);
        let r = psd_sqrt(&tiny, tol).unwrap();
        assert!(r[(1, 1)].norm() < 1e-15);
        let roundoff = real(2, 2, &[1.0, 0.0, 0.0, 1e-16]);
        assert!(psd_sqrt(&roundoff, tol).unwrap()[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn extend_unitary_is_identity_operation() {
        let s = 0.5f64.sqrt();
        let u = ComplexMatrix::new(2, 2, vec![c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)]).unwrap();
        let t = extend_partial_isometry(&u, Tolerance::default()).unwrap();
        assert!(t.distance(&u) < 1e-15);
    }

    #[test]
    fn extend_zero_gives_the_identity_pairing() {
        let t = extend_partial_isometry(&ComplexMatrix::zeros(2, 2), Tolerance::default()).unwrap();
        assert_eq!(t, ComplexMatrix::identity(2));
    }

    #[test]
    fn extend_into_larger_space_is_an_isometry() {
        let mut t0 = ComplexMatrix::zeros(3, 2);
        t0[(0, 0)] = c(1.0, 0.0);
        let t = extend_partial_isometry(&t0, Tolerance::default()).unwrap();
        assert!(t.isometry_defect() < 1e-14);
        assert!((t[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn extend_rejects_non_partial_isometry() {
        let a = real(2, 2, &[0.5, 0.0, 0.0, 1.0]);
        assert!(matches!(
            extend_partial_isometry(&a, Tolerance::default()),
            Err(Error::NotPartialIsometry { .. })
        ));
    }

    #[test]
    fn pinv_inverts_on_the_range() {
        let a = real(3, 2, &[1.0, 2.0, 0.0, 1.0, 1.0, 0.0]);
        let p = pinv(&a, Tolerance::default());
        assert!(p.matmul(&a).distance(&ComplexMatrix::identity(2)) < 1e-13);
    }

    proptest! {
        #[test]
        fn svd_reconstructs(a in (1usize..=7, 1usize..=7).prop_flat_map(|(r, c)| arb_matrix(r, c))) {
            let d = svd(&a);
            prop_assert!(d.v.unitarity_defect() < 1e-12);
            let sig: Vec<C64> = d.sigma.iter().map(|&s| C64::new(s, 0.0)).collect();
            let back = d.u.matmul(&ComplexMatrix::diag(&sig)).matmul(&d.v.adjoint());
            prop_assert!(back.distance(&a) < 1e-12 * (1.0 + a.frobenius_norm()));
            prop_assert!(d.sigma.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn eigen_diagonalizes(a in arb_square()) {
            let h = a.hermitian_part();
            let (vals, v) = hermitian_eigen(&h).unwrap();
            prop_assert!(v.unitarity_defect() < 1e-12);
            let d: Vec<C64> = vals.iter().map(|&x| C64::new(x, 0.0)).collect();
            let back = v.matmul(&ComplexMatrix::diag(&d)).matmul(&v.adjoint());
            prop_assert!(back.distance(&h) < 1e-12 * (1.0 + h.frobenius_norm()));
        }

        #[test]
        fn psd_sqrt_squares_back(a in arb_square()) {
            let p = a.adjoint_mul(&a);
            let r = psd_sqrt(&p, Tolerance::default()).unwrap();
            prop_assert!(r.distance(&r.adjoint()) < 1e-12);
            let (vals, _) = hermitian_eigen(&r).unwrap();
            prop_assert!(vals[0] > -1e-12);
            prop_assert!(r.matmul(&r).distance(&p) <= 1e-10 * (1.0 + p.frobenius_norm()));
        }

        #[test]
        fn kernel_and_range_are_orthonormal_and_exact(
            a in (1usize..=6, 1usize..=6, 1usize..=6)
                .prop_flat_map(|(r, k, c)| (arb_matrix(r, k), arb_matrix(k, c)))
                .prop_map(|(x, y)| x.matmul(&y))
        ) {
            let (k, r) = kernel_and_range(&a, Tolerance::default()).unwrap();
            prop_assert!(a.matmul(&k).frobenius_norm() <= 1e-10 * (1.0 + a.frobenius_norm()));
            prop_assert!(k.isometry_defect() < 1e-12);
            prop_assert!(r.isometry_defect() < 1e-12);
            let row_rank = rank(&a.adjoint(), Tolerance::default());
            prop_assert_eq!(k.cols() + row_rank, a.cols());
        }

        #[test]
        fn extension_agrees_with_partial_isometry(
            (u, keep) in (1usize..=8).prop_flat_map(|n| (arb_matrix(n, n), proptest::collection::vec(any::<bool>(), n)))
        ) {
            // Build a partial isometry as a unitary times a coordinate projection.
            let d = svd(&u);
            let q = d.u.matmul(&d.v.adjoint());
            let proj: Vec<C64> = keep.iter().map(|&k| C64::new(if k { 1.0 } else { 0.0 }, 0.0)).collect();
            let p = ComplexMatrix::diag(&proj);
            let t0 = q.matmul(&p);
            let t = extend_partial_isometry(&t0, Tolerance::default()).unwrap();
            prop_assert!(t.isometry_defect() < 1e-10 || t.matmul(&t.adjoint()).distance(&ComplexMatrix::identity(t.rows())) < 1e-10);
            prop_assert!(t.matmul(&p).distance(&t0) < 1e-10);
        }
    }
}
