//! Level-by-level unitaries reconciling `V2 (I ⊗ U2)` with
//! `U2 (I ⊗ V2)(t ⊗ I)`.
//!
//! Both compositions map `E ⊗ F ⊗ K(k)` isometrically into level `k + 1`
//! (plus level 0 when `k = 0`, where their compressions agree by the
//! commutation relation). The new block `W(k+1)` sends one image onto the
//! other and pairs the orthogonal complements.

use alloc::format;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use super::primitive::PrimitiveIsometries;
use super::space::GradedFockSpace;
use crate::error::{Error, Result};
use crate::linalg::{
    isometry_complement, pinv, structured_complement, BlockMatrix, ComplexMatrix, Tolerance,
};
use crate::product::ScalarProductSystem;

#[derive(Debug, Clone)]
pub struct Corrector {
    /// `W(0) = I, W(1), …, W(L)`.
    pub blocks: Vec<ComplexMatrix>,
    /// Residual of the defining identity on `E ⊗ F ⊗ K(k)`, `k < L`.
    pub identity_residuals: Vec<f64>,
    /// `‖W(k)^* W(k) − I‖_F` per level.
    pub unitarity_residuals: Vec<f64>,
}

impl Corrector {
    pub fn identity(space: &GradedFockSpace) -> Self {
        let blocks: Vec<ComplexMatrix> = space
            .level_sizes()
            .iter()
            .map(|&s| ComplexMatrix::identity(s))
            .collect();
        Corrector {
            unitarity_residuals: alloc::vec![0.0; blocks.len()],
            identity_residuals: Vec::new(),
            blocks,
        }
    }

    pub fn as_block(&self) -> BlockMatrix {
        let sizes: Vec<usize> = self.blocks.iter().map(|b| b.rows()).collect();
        let mut w = BlockMatrix::zeros(&sizes, &sizes);
        for (l, b) in self.blocks.iter().enumerate() {
            w.set(l, l, b.clone());
        }
        w
    }
}

/// Block `(r, c)` of a product of level-blocked operators.
pub(crate) fn product_block(a: &BlockMatrix, b: &BlockMatrix, r: usize, c: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.row_sizes()[r], b.col_sizes()[c]);
    for k in 0..a.col_sizes().len() {
        if let (Some(x), Some(y)) = (a.get(r, k), b.get(k, c)) {
            out += &x.matmul(y);
        }
    }
    out
}

/// `Σ_{k,l} u_{(i,j),(k,l)} · parts[l][k]` for every `(i, j)`, in lexicographic order.
fn twist(sys: &ScalarProductSystem, parts: &[Vec<ComplexMatrix>]) -> Vec<ComplexMatrix> {
    let (n, m) = (sys.n(), sys.m());
    let shape = parts[0][0].shape();
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            let mut acc = ComplexMatrix::zeros(shape.0, shape.1);
            for (l, row) in parts.iter().enumerate() {
                for (k, p) in row.iter().enumerate() {
                    let c = sys.flip().coeff(i, j, k, l);
                    if c.norm() != 0.0 {
                        acc += &p.scale(c);
                    }
                }
            }
            out.push(acc);
        }
    }
    out
}

/// The `(r, c)` blocks of `V2_i U2_j` and of `Σ u U2_l V2_k`, per `(i, j)`.
fn both_sides(
    sys: &ScalarProductSystem,
    prim: &PrimitiveIsometries,
    r: usize,
    c: usize,
) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    let mut left = Vec::with_capacity(sys.n() * sys.m());
    for v in &prim.v {
        for u in &prim.u {
            left.push(product_block(v, u, r, c));
        }
    }
    let parts: Vec<Vec<ComplexMatrix>> = prim
        .u
        .iter()
        .map(|u| prim.v.iter().map(|v| product_block(u, v, r, c)).collect())
        .collect();
    (left, twist(sys, &parts))
}

pub fn build_corrector(
    sys: &ScalarProductSystem,
    space: &GradedFockSpace,
    prim: &PrimitiveIsometries,
    tol: Tolerance,
    accept: f64,
) -> Result<Corrector> {
    let top = space.depth();
    let sizes = space.level_sizes();
    let mut blocks = alloc::vec![ComplexMatrix::identity(sizes[0])];
    let mut identity_residuals = Vec::with_capacity(top);

    for k in 0..top {
        let (x, y) = both_sides(sys, prim, k + 1, k);
        let (x_same, y_same) = both_sides(sys, prim, k, k);
        let same_level = x_same
            .iter()
            .zip(&y_same)
            .map(|(a, b)| a.distance(b))
            .fold(0.0f64, f64::max);
        if same_level > accept {
            return Err(Error::failed(format!("level-{k} flip relation"), same_level));
        }
        let wk = &blocks[k];
        let x1_parts: Vec<ComplexMatrix> = x.iter().map(|xi| xi.matmul(&wk.adjoint())).collect();
        let x1 = ComplexMatrix::hstack(sizes[k + 1], &x1_parts);
        let x2 = ComplexMatrix::hstack(sizes[k + 1], &y);

        let (matched, q1, q2) = if k == 0 {
            // Only the level-1 parts are matched; they have equal Gram
            // matrices because the level-0 parts agree.
            let gram = x1.adjoint_mul(&x1).distance(&x2.adjoint_mul(&x2));
            if gram > accept {
                return Err(Error::failed("level-1 image isometry", gram));
            }
            let (q1, _) = structured_complement(&x1, tol);
            let (q2, _) = structured_complement(&x2, tol);
            (x2.matmul(&pinv(&x1, tol)), q1, q2)
        } else {
            let q1 = isometry_complement(&x1, tol).ok_or_else(|| {
                Error::failed(format!("level-{} image isometry", k + 1), x1.isometry_defect())
            })?;
            let q2 = isometry_complement(&x2, tol).ok_or_else(|| {
                Error::failed(format!("level-{} image isometry", k + 1), x2.isometry_defect())
            })?;
            (x2.matmul(&x1.adjoint()), q1, q2)
        };
        if q1.cols() != q2.cols() {
            return Err(Error::failed(
                format!(
                    "level-{} complement dimensions {} vs {}",
                    k + 1,
                    q1.cols(),
                    q2.cols()
                ),
                (q1.cols() as f64 - q2.cols() as f64).abs(),
            ));
        }
        let next = &matched + &q2.matmul(&q1.adjoint());
        let residual = next.matmul(&x1).distance(&x2).hypot(same_level);
        if residual > accept {
            return Err(Error::failed(
                format!("corrector identity at level {k}"),
                residual,
            ));
        }
        identity_residuals.push(residual);
        blocks.push(next);
    }

    let unitarity_residuals = blocks.iter().map(ComplexMatrix::unitarity_defect).collect();
    Ok(Corrector {
        blocks,
        identity_residuals,
        unitarity_residuals,
    })
}
