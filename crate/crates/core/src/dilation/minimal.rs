use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use super::assemble::DilationResult;
use crate::linalg::{ComplexMatrix, C64};

/// The span of `H` and its images under words in `V`, `U`, with the
/// operators compressed to it.
#[derive(Debug, Clone)]
pub struct MinimalDilation {
    /// Orthonormal columns in the truncated space; the first `d` are `H`.
    pub basis: ComplexMatrix,
    pub v: Vec<ComplexMatrix>,
    pub u: Vec<ComplexMatrix>,
    /// Number of leading basis columns reached by words shorter than the
    /// longest word used; the span is invariant on those.
    pub inner_dim: usize,
    /// `max ‖(I − Q Q^*) X Q_inner‖_F` over all operators `X`.
    pub invariance_residual: f64,
}

impl MinimalDilation {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

fn split(space_sizes: &[usize], x: &ComplexMatrix) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(space_sizes.len());
    let mut r0 = 0;
    for &s in space_sizes {
        out.push(x.submatrix(r0, 0, s, x.cols()));
        r0 += s;
    }
    out
}

fn join(parts: &[ComplexMatrix]) -> ComplexMatrix {
    let cols = parts.first().map_or(0, ComplexMatrix::cols);
    ComplexMatrix::vstack(cols, parts)
}

/// Krylov span of `H` under words of length `≤ valid_depth`.
pub fn minimal_restriction(result: &DilationResult) -> MinimalDilation {
    let sizes = result.space.level_sizes();
    let k_dim = result.space.dim();
    let ops: Vec<_> = result.v.iter().chain(&result.u).collect();
    let mut q_cols: Vec<Vec<C64>> = Vec::new();
    let mut frontier = result.embedding();
    for c in 0..frontier.cols() {
        q_cols.push(frontier.column(c));
    }
    let mut inner_dim = q_cols.len();
    for _ in 0..result.valid_depth {
        if frontier.cols() == 0 {
            break;
        }
        inner_dim = q_cols.len();
        let blocks = split(sizes, &frontier);
        let mut found: Vec<Vec<C64>> = Vec::new();
        for op in &ops {
            let image = join(&op.apply(&blocks));
            for c in 0..image.cols() {
                let mut v = image.column(c);
                let before = norm(&v);
                if before == 0.0 {
                    continue;
                }
                for _ in 0..2 {
                    for q in q_cols.iter().chain(&found) {
                        let p: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                        for (vi, qi) in v.iter_mut().zip(q) {
                            *vi -= qi * p;
                        }
                    }
                }
                let after = norm(&v);
                if after > 1e-8 * before.max(1.0) {
                    v.iter_mut().for_each(|z| *z /= after);
                    found.push(v);
                }
            }
        }
        frontier = ComplexMatrix::from_fn(k_dim, found.len(), |i, j| found[j][i]);
        q_cols.extend(found);
    }
    if frontier.cols() == 0 {
        inner_dim = q_cols.len();
    }
    let basis = ComplexMatrix::from_fn(k_dim, q_cols.len(), |i, j| q_cols[j][i]);
    let q_blocks = split(sizes, &basis);
    let mut residual = 0.0f64;
    let mut compress = |op: &crate::linalg::BlockMatrix| {
        let image = join(&op.apply(&q_blocks));
        let small = basis.adjoint_mul(&image);
        let inner_image = image.submatrix(0, 0, k_dim, inner_dim);
        let leak = &inner_image - &basis.matmul(&small.submatrix(0, 0, small.rows(), inner_dim));
        residual = residual.max(leak.frobenius_norm());
        small
    };
    let v: Vec<ComplexMatrix> = result.v.iter().map(&mut compress).collect();
    let u: Vec<ComplexMatrix> = result.u.iter().map(&mut compress).collect();
    MinimalDilation {
        basis,
        v,
        u,
        inner_dim,
        invariance_residual: residual,
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::{assemble_dilation, DilationConfig};
    use crate::linalg::Tolerance;
    use crate::product::{CovariantRep, ScalarProductSystem, Side};
    use alloc::vec;

    fn scalar_pair(t: f64, s: f64, depth: usize) -> (CovariantRep, DilationResult) {
        let sys = ScalarProductSystem::new(1, 1, ComplexMatrix::identity(1), Tolerance::default()).unwrap();
        let rep = CovariantRep::new(
            1,
            vec![ComplexMatrix::scalar(C64::new(t, 0.0))],
            vec![ComplexMatrix::scalar(C64::new(s, 0.0))],
        )
        .unwrap();
        let res = assemble_dilation(&sys, &rep, depth, DilationConfig::default()).unwrap();
        (rep, res)
    }

    #[test]
    fn unitary_scalars_need_nothing_beyond_h() {
        let (_, res) = scalar_pair(1.0, 1.0, 3);
        let min = minimal_restriction(&res);
        assert_eq!(min.dim(), 1);
        assert!(min.invariance_residual < 1e-12);
    }

    #[test]
    fn one_isometric_side_contains_h_and_is_invariant() {
        let (_, res) = scalar_pair(0.0, 1.0, 4);
        let min = minimal_restriction(&res);
        assert!(min.dim() > 1 && min.dim() < res.space.dim());
        assert!(min.basis.submatrix(0, 0, 1, 1)[(0, 0)].norm() > 0.999);
        assert!(min.invariance_residual < 1e-10);
    }

    #[test]
    fn pauli_minimal_space_keeps_corners() {
        let (sys, rep) = crate::dilation::primitive::tests::pauli();
        let res = assemble_dilation(&sys, &rep, 3, DilationConfig::default()).unwrap();
        let min = minimal_restriction(&res);
        assert!(min.invariance_residual < 1e-10);
        assert!(min.basis.isometry_defect() < 1e-10);
        for (i, t) in rep.ops(Side::T).iter().enumerate() {
            assert!(min.v[i].submatrix(0, 0, 2, 2).distance(t) < 1e-12);
        }
        for (j, s) in rep.ops(Side::S).iter().enumerate() {
            assert!(min.u[j].submatrix(0, 0, 2, 2).distance(s) < 1e-12);
        }
    }
}
