//! The flip unitary relating two commuting Kraus families.
//!
//! Both products `T_i S_j` and `S_l T_k` are Kraus families of the same map
//! `Θ∘Φ = Φ∘Θ`. Expressing each in one orthonormal basis of the span of that
//! map's Kraus operators gives two coisometries; composing one with the
//! adjoint of the other and completing the result to a unitary yields the
//! coefficients of `T_i S_j = Σ u_{(i,j),(k,l)} S_l T_k`.

use alloc::format;
use alloc::vec::Vec;

use super::kraus::{commute_residual, KrausFamily};
use crate::error::{Error, Result};
use crate::linalg::{extend_partial_isometry, pinv, svd, ComplexMatrix, Tolerance, C64};

/// Which product family to factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `T_i S_j`, columns in `(i, j)` order.
    ThetaPhi,
    /// `S_l T_k`, columns in `(l, k)` order.
    PhiTheta,
}

/// Coefficients of a product family in the orthonormal basis of the
/// composite map, together with the kernel dimension of the factor.
#[derive(Debug, Clone)]
pub struct Coisometry {
    pub coefficients: ComplexMatrix,
    pub kernel_dim: usize,
}

/// Unitary `u` with rows indexed by `(i, j)` and columns by `(k, l)`, both
/// lexicographic.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipUnitary {
    pub n: usize,
    pub m: usize,
    pub u: ComplexMatrix,
}

pub const FLIP_ORDERING: &str = "lex-row-(i,j)-col-(k,l)";

impl FlipUnitary {
    pub fn new(n: usize, m: usize, u: ComplexMatrix) -> Result<Self> {
        if n == 0 || m == 0 || u.shape() != (n * m, n * m) {
            return Err(Error::invalid(format!(
                "flip matrix for n = {n}, m = {m} must be {0}x{0}",
                n * m
            )));
        }
        Ok(FlipUnitary { n, m, u })
    }

    /// Coefficient `u_{(i,j),(k,l)}`.
    pub fn coeff(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.u[(i * self.m + j, k * self.m + l)]
    }

    /// Matrix of `t: E⊗F → F⊗E`, `t[(l,k),(i,j)] = u_{(i,j),(k,l)}`.
    pub fn t_matrix(&self) -> ComplexMatrix {
        let (n, m) = (self.n, self.m);
        let mut t = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..m {
                for k in 0..n {
                    for l in 0..m {
                        t[(l * n + k, i * m + j)] = self.coeff(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    /// Inverse of [`FlipUnitary::t_matrix`].
    pub fn from_t_matrix(n: usize, m: usize, t: &ComplexMatrix) -> Result<Self> {
        let mut u = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..m {
                for k in 0..n {
                    for l in 0..m {
                        u[(i * m + j, k * m + l)] = t[(l * n + k, i * m + j)];
                    }
                }
            }
        }
        Self::new(n, m, u)
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.u.unitarity_defect()
    }

    /// `max_{i,j} ‖T_i S_j − Σ u_{(i,j),(k,l)} S_l T_k‖_F` for operators `T`, `S`.
    pub fn relation_residual(&self, t: &[ComplexMatrix], s: &[ComplexMatrix]) -> f64 {
        assert_eq!((t.len(), s.len()), (self.n, self.m), "family sizes");
        let mut worst = 0.0f64;
        let st: Vec<Vec<ComplexMatrix>> = s
            .iter()
            .map(|sl| t.iter().map(|tk| sl.matmul(tk)).collect())
            .collect();
        for (i, ti) in t.iter().enumerate() {
            for (j, sj) in s.iter().enumerate() {
                let mut r = ti.matmul(sj);
                for k in 0..self.n {
                    for l in 0..self.m {
                        let c = self.coeff(i, j, k, l);
                        if c.norm() == 0.0 {
                            continue;
                        }
                        r -= &st[l][k].scale(c);
                    }
                }
                worst = worst.max(r.frobenius_norm());
            }
        }
        worst
    }
}

fn commute_guard(theta: &KrausFamily, phi: &KrausFamily, tol: Tolerance) -> Result<()> {
    let residual = commute_residual(theta, phi)?;
    if residual > tol.eps {
        return Err(Error::NotCommuting { residual });
    }
    Ok(())
}

fn factor_in_basis(products: &KrausFamily, basis_pinv: &ComplexMatrix, tol: Tolerance) -> Result<Coisometry> {
    let c = basis_pinv.matmul(&products.vectorized());
    let r = c.rows();
    let residual = c.matmul(&c.adjoint()).distance(&ComplexMatrix::identity(r));
    if residual > tol.cutoff((r.max(1)) as f64) {
        return Err(Error::CoisometryCheckFailed { residual });
    }
    let rank = svd(&c.adjoint()).rank(tol);
    Ok(Coisometry {
        kernel_dim: c.cols() - rank,
        coefficients: c,
    })
}

/// Both coisometries, factored in the same basis of the composite map.
fn both_factors(theta: &KrausFamily, phi: &KrausFamily, tol: Tolerance) -> Result<(Coisometry, Coisometry)> {
    commute_guard(theta, phi, tol)?;
    let tp = theta.compose(phi)?;
    let pt = phi.compose(theta)?;
    let basis = tp.reduce(tol).vectorized();
    let basis_pinv = pinv(&basis, tol);
    Ok((
        factor_in_basis(&tp, &basis_pinv, tol)?,
        factor_in_basis(&pt, &basis_pinv, tol)?,
    ))
}

pub fn coisometry_factor(
    theta: &KrausFamily,
    phi: &KrausFamily,
    direction: Direction,
    tol: Tolerance,
) -> Result<Coisometry> {
    let (m, n) = both_factors(theta, phi, tol)?;
    Ok(match direction {
        Direction::ThetaPhi => m,
        Direction::PhiTheta => n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelTest {
    pub dim_ker_m: usize,
    pub dim_ker_n: usize,
    pub verdict: bool,
}

pub fn strong_commute_kernel_test(
    theta: &KrausFamily,
    phi: &KrausFamily,
    tol: Tolerance,
) -> Result<KernelTest> {
    let (m, n) = both_factors(theta, phi, tol)?;
    Ok(KernelTest {
        dim_ker_m: m.kernel_dim,
        dim_ker_n: n.kernel_dim,
        verdict: m.kernel_dim == n.kernel_dim,
    })
}

/// The partial isometry `n^* m: E⊗F → F⊗E` before completion.
pub fn flip_partial_isometry(
    theta: &KrausFamily,
    phi: &KrausFamily,
    tol: Tolerance,
) -> Result<(ComplexMatrix, KernelTest)> {
    let (m, n) = both_factors(theta, phi, tol)?;
    let test = KernelTest {
        dim_ker_m: m.kernel_dim,
        dim_ker_n: n.kernel_dim,
        verdict: m.kernel_dim == n.kernel_dim,
    };
    Ok((n.coefficients.adjoint_mul(&m.coefficients), test))
}

pub fn build_flip_unitary(theta: &KrausFamily, phi: &KrausFamily, tol: Tolerance) -> Result<FlipUnitary> {
    if theta.is_empty() || phi.is_empty() {
        return Err(Error::invalid("flip unitary needs nonzero maps"));
    }
    let (t0, test) = flip_partial_isometry(theta, phi, tol)?;
    if !test.verdict {
        return Err(Error::NotStronglyCommuting {
            ker_m: test.dim_ker_m,
            ker_n: test.dim_ker_n,
        });
    }
    let t = extend_partial_isometry(&t0, tol)?;
    let flip = FlipUnitary::from_t_matrix(theta.len(), phi.len(), &t)?;
    let defect = flip.unitarity_defect();
    if defect > tol.eps {
        return Err(Error::InvalidFlip { residual: defect });
    }
    let residual = flip.relation_residual(theta.ops(), phi.ops());
    if residual > tol.eps {
        return Err(Error::failed("flip relation", residual));
    }
    Ok(flip)
}

/// Families padded with zero operators together with a flip unitary for them.
#[derive(Debug, Clone)]
pub struct PaddedSystem {
    pub theta: KrausFamily,
    pub phi: KrausFamily,
    pub flip: FlipUnitary,
}

/// Pads both families to size `n + m` and assembles a flip unitary that
/// agrees with `t0` on the complement of its kernel.
///
/// The padded left space is `E0 ⊕ F1` and the padded right space is
/// `E1 ⊕ F0`, where `E1`, `F1` are copies of `E0 = C^n`, `F0 = C^m`
/// identified with the originals through the identity matrix. The new
/// operators are zero, so the maps are unchanged.
pub fn pad_families(
    theta: &KrausFamily,
    phi: &KrausFamily,
    t0: &ComplexMatrix,
    tol: Tolerance,
) -> Result<PaddedSystem> {
    let (n, m) = (theta.len(), phi.len());
    if t0.shape() != (n * m, n * m) {
        return Err(Error::invalid("partial isometry has the wrong shape"));
    }
    let t = extend_partial_isometry(t0, tol)?;
    let ts = t.adjoint();
    let ker_proj = &ComplexMatrix::identity(n * m) - &ts.matmul(&t);
    let coker_proj = &ComplexMatrix::identity(n * m) - &t.matmul(&ts);

    let p = n + m;
    // Row index of F⊗E, column index of E⊗F (padded).
    let fe = |q: usize, e: usize| q * p + e;
    let ef = |e: usize, f: usize| e * p + f;
    let mut s = ComplexMatrix::zeros(p * p, p * p);
    for i in 0..n {
        for j in 0..m {
            let col = ef(i, n + j);
            for k in 0..n {
                for l in 0..m {
                    // E0⊗F0 → F0⊗E0 through t.
                    s[(fe(n + l, k), col)] = t[(l * n + k, i * m + j)];
                }
            }
            for i2 in 0..n {
                for j2 in 0..m {
                    // E0⊗F0 → E1⊗F1 through the copy map on ker t.
                    s[(fe(i2, n + j2), col)] = ker_proj[(i2 * m + j2, i * m + j)];
                }
            }
        }
    }
    for l in 0..m {
        for k in 0..n {
            let col = ef(n + l, k);
            for l2 in 0..m {
                for k2 in 0..n {
                    // F1⊗E1 → F0⊗E0 onto the cokernel of t.
                    s[(fe(n + l2, k2), col)] = coker_proj[(l2 * n + k2, l * n + k)];
                }
            }
            for i2 in 0..n {
                for j2 in 0..m {
                    // F1⊗E1 → E1⊗F1 through t^*.
                    s[(fe(i2, n + j2), col)] = ts[(i2 * m + j2, l * n + k)];
                }
            }
        }
    }
    for i in 0..n {
        for k in 0..n {
            s[(fe(i, k), ef(i, k))] = C64::new(1.0, 0.0);
        }
    }
    for l in 0..m {
        for j in 0..m {
            s[(fe(n + l, n + j), ef(n + l, n + j))] = C64::new(1.0, 0.0);
        }
    }
    let defect = s.unitarity_defect();
    if defect > tol.eps {
        return Err(Error::InvalidFlip { residual: defect });
    }
    let flip = FlipUnitary::from_t_matrix(p, p, &s)?;
    Ok(PaddedSystem {
        theta: theta.padded(0, m),
        phi: phi.padded(n, 0),
        flip,
    })
}
