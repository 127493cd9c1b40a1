//! Concrete models of the two-step tensor spaces built from a pair of maps.
//!
//! The space spanned by `a ⊗ b ⊗ h` with inner product
//! `⟨h₁, Θ(b₁^* Φ(a₁^* a₂) b₂) h₂⟩` is realized through the Gram matrix of the
//! generators `E_pq ⊗ E_rs ⊗ e_t`.

use alloc::vec::Vec;

use super::kraus::KrausFamily;
use crate::error::{Error, Result};
use crate::linalg::{rank, svd, ComplexMatrix, Tolerance, C64};

/// Largest matrix dimension for which generator Gram matrices are built.
pub const GRAM_DIM_CAP: usize = 3;

/// Which map sits in the inner slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Inner map Φ, outer map Θ.
    PhiTheta,
    /// Inner map Θ, outer map Φ.
    ThetaPhi,
}

/// Gram matrix over generators `(p, q, r, s, t)` in lexicographic order.
#[derive(Debug, Clone)]
pub struct GramSpace {
    pub d: usize,
    pub gram: ComplexMatrix,
    pub rank: usize,
}

impl GramSpace {
    pub fn generator(&self, p: usize, q: usize, r: usize, s: usize, t: usize) -> usize {
        let d = self.d;
        (((p * d + q) * d + r) * d + s) * d + t
    }
}

pub(crate) fn check_cap(d: usize, cap: usize) -> Result<()> {
    if d > cap {
        return Err(Error::TooLarge {
            what: "matrix dimension",
            size: d,
            cap,
        });
    }
    Ok(())
}

/// Images of all matrix units, indexed by `q * d + q'`.
fn unit_images(f: &KrausFamily) -> Result<Vec<ComplexMatrix>> {
    let d = f.d();
    (0..d * d)
        .map(|k| f.apply(&ComplexMatrix::unit(d, k / d, k % d)))
        .collect()
}

pub fn gram_tensor_space(
    theta: &KrausFamily,
    phi: &KrausFamily,
    order: Order,
    tol: Tolerance,
) -> Result<GramSpace> {
    theta.same_dim(phi)?;
    let d = theta.d();
    check_cap(d, GRAM_DIM_CAP)?;
    let (inner, outer) = match order {
        Order::PhiTheta => (phi, theta),
        Order::ThetaPhi => (theta, phi),
    };
    let a = unit_images(inner)?;
    let b = unit_images(outer)?;
    let size = d.pow(5);
    let mut gram = ComplexMatrix::zeros(size, size);
    let mut space = GramSpace {
        d,
        gram: ComplexMatrix::zeros(0, 0),
        rank: 0,
    };
    for p in 0..d {
        for q in 0..d {
            for q2 in 0..d {
                let aq = &a[q * d + q2];
                for r in 0..d {
                    for r2 in 0..d {
                        let x = aq[(r, r2)];
                        if x.norm() == 0.0 {
                            continue;
                        }
                        for s in 0..d {
                            for s2 in 0..d {
                                let bs = &b[s * d + s2];
                                for t in 0..d {
                                    for t2 in 0..d {
                                        let row = space.generator(p, q, r, s, t);
                                        let col = space.generator(p, q2, r2, s2, t2);
                                        gram[(row, col)] = x * bs[(t, t2)];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    space.rank = rank(&gram, tol);
    space.gram = gram;
    Ok(space)
}

/// Coefficients of the vectors `E_pq ⊗ I ⊗ e_t`, one column per `(p, q, t)`.
fn unit_tensor_identity(d: usize) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(d.pow(5), d.pow(3));
    for p in 0..d {
        for q in 0..d {
            for t in 0..d {
                let col = (p * d + q) * d + t;
                for r in 0..d {
                    let row = (((p * d + q) * d + r) * d + r) * d + t;
                    c[(row, col)] = C64::new(1.0, 0.0);
                }
            }
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectTest {
    pub verdict: bool,
    pub isometry_residual: f64,
    /// Dimensions of the complements of the cyclic submodules in the two
    /// tensor spaces.
    pub complement_dims: (usize, usize),
}

/// Compares the two tensor spaces directly: the map fixing `a ⊗ I ⊗ h` must
/// preserve inner products, and the orthogonal complements of the
/// submodules it generates must have equal dimension.
pub fn strong_commute_direct(theta: &KrausFamily, phi: &KrausFamily, tol: Tolerance) -> Result<DirectTest> {
    let g1 = gram_tensor_space(theta, phi, Order::PhiTheta, tol)?;
    let g2 = gram_tensor_space(theta, phi, Order::ThetaPhi, tol)?;
    let c = unit_tensor_identity(theta.d());
    let cg1 = c.adjoint_mul(&g1.gram.matmul(&c));
    let cg2 = c.adjoint_mul(&g2.gram.matmul(&c));
    let isometry_residual = cg1.distance(&cg2);
    let sub1 = svd(&cg1).rank(tol);
    let sub2 = svd(&cg2).rank(tol);
    let complement_dims = (g1.rank - sub1, g2.rank - sub2);
    Ok(DirectTest {
        verdict: complement_dims.0 == complement_dims.1,
        isometry_residual,
        complement_dims,
    })
}
