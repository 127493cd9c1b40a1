use alloc::vec::Vec;

use crate::cp::FlipUnitary;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance};

/// `E = C^n`, `F = C^m` and a flip unitary `t: E⊗F → F⊗E`.
///
/// Tensor powers are ordered lexicographically with the leftmost factor most
/// significant.
#[derive(Debug, Clone)]
pub struct ScalarProductSystem {
    flip: FlipUnitary,
    t: ComplexMatrix,
}

impl ScalarProductSystem {
    pub fn new(n: usize, m: usize, u: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        Self::from_flip(FlipUnitary::new(n, m, u)?, tol)
    }

    pub fn from_flip(flip: FlipUnitary, tol: Tolerance) -> Result<Self> {
        if !flip.u.is_finite() {
            return Err(Error::invalid("flip matrix has non-finite entries"));
        }
        let residual = flip.unitarity_defect();
        if residual > tol.eps {
            return Err(Error::InvalidFlip { residual });
        }
        let t = flip.t_matrix();
        Ok(ScalarProductSystem { flip, t })
    }

    pub fn n(&self) -> usize {
        self.flip.n
    }

    pub fn m(&self) -> usize {
        self.flip.m
    }

    pub fn flip(&self) -> &FlipUnitary {
        &self.flip
    }

    /// Matrix of `t = t_{1,1}`.
    pub fn t(&self) -> &ComplexMatrix {
        &self.t
    }

    /// `t_{1,b}: E⊗F^b → F^b⊗E`, moving the `E` factor right one slot at a
    /// time.
    fn flip_one(&self, b: usize) -> ComplexMatrix {
        let (n, m) = (self.n(), self.m());
        let mut out = ComplexMatrix::identity(n * m.pow(b as u32));
        for s in 0..b {
            let left = ComplexMatrix::identity(m.pow(s as u32));
            let right = ComplexMatrix::identity(m.pow((b - 1 - s) as u32));
            let step = left.kron(&self.t).kron(&right);
            out = step.matmul(&out);
        }
        out
    }

    /// `t_{a,b}: E^a⊗F^b → F^b⊗E^a`, moving the rightmost `E` factor past
    /// `F^b` first. `t_{a,0}` and `t_{0,b}` are identities.
    pub fn flip_mn(&self, a: usize, b: usize) -> ComplexMatrix {
        let (n, m) = (self.n(), self.m());
        let size = n.pow(a as u32) * m.pow(b as u32);
        if a == 0 || b == 0 {
            return ComplexMatrix::identity(size);
        }
        let one = self.flip_one(b);
        let mut out = ComplexMatrix::identity(size);
        for k in (0..a).rev() {
            let left = ComplexMatrix::identity(n.pow(k as u32));
            let right = ComplexMatrix::identity(n.pow((a - 1 - k) as u32));
            let step = left.kron(&one).kron(&right);
            out = step.matmul(&out);
        }
        out
    }

    /// All `t_{a,1}` for `a ≤ max_a`.
    pub fn flips_past_one_f(&self, max_a: usize) -> Vec<ComplexMatrix> {
        (0..=max_a).map(|a| self.flip_mn(a, 1)).collect()
    }

    /// All `t_{1,b}` for `b ≤ max_b`.
    pub fn flips_one_e_past(&self, max_b: usize) -> Vec<ComplexMatrix> {
        (0..=max_b).map(|b| self.flip_mn(1, b)).collect()
    }
}
