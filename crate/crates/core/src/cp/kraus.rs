use alloc::format;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, svd, ComplexMatrix, Tolerance, C64};

/// A completely positive map `a ↦ Σ T_i a T_i^*` on `d × d` matrices.
///
/// An empty operator list is the zero map; it only arises from
/// [`KrausFamily::zero`] and from reducing a family that vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    d: usize,
    ops: Vec<ComplexMatrix>,
}

impl KrausFamily {
    /// Validates shapes and contractivity `Σ T_i T_i^* ≤ I`.
    pub fn new(d: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        if ops.is_empty() {
            return Err(Error::invalid("a Kraus family needs at least one operator"));
        }
        for (i, t) in ops.iter().enumerate() {
            if t.shape() != (d, d) {
                return Err(Error::invalid(format!(
                    "Kraus operator {i} is {}x{}, expected {d}x{d}",
                    t.rows(),
                    t.cols()
                )));
            }
            if !t.is_finite() {
                return Err(Error::invalid(format!(
                    "Kraus operator {i} has non-finite entries"
                )));
            }
        }
        let family = KrausFamily { d, ops };
        family.check_contractive(Tolerance::default())?;
        Ok(family)
    }

    pub fn zero(d: usize) -> Self {
        KrausFamily { d, ops: Vec::new() }
    }

    pub(crate) fn from_parts(d: usize, ops: Vec<ComplexMatrix>) -> Self {
        KrausFamily { d, ops }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `Σ T_i T_i^*`.
    pub fn outer_sum(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.d, self.d);
        for t in &self.ops {
            s += &t.matmul(&t.adjoint());
        }
        s
    }

    pub fn check_contractive(&self, tol: Tolerance) -> Result<()> {
        let (vals, _) = hermitian_eigen(&self.outer_sum())?;
        let top = vals.last().copied().unwrap_or(0.0);
        if top > 1.0 + tol.eps {
            return Err(Error::NotContractive {
                eigenvalue: 1.0 - top,
            });
        }
        Ok(())
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.shape() != (self.d, self.d) {
            return Err(Error::invalid(format!(
                "argument is {}x{}, map acts on {}x{} matrices",
                a.rows(),
                a.cols(),
                self.d,
                self.d
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for t in &self.ops {
            out += &t.matmul(a).matmul(&t.adjoint());
        }
        Ok(out)
    }

    /// The family `{T_i S_j}` of `self ∘ other`, in lexicographic `(i, j)`
    /// order.
    pub fn compose(&self, other: &KrausFamily) -> Result<KrausFamily> {
        self.same_dim(other)?;
        let mut ops = Vec::with_capacity(self.len() * other.len());
        for t in &self.ops {
            for s in &other.ops {
                ops.push(t.matmul(s));
            }
        }
        Ok(KrausFamily { d: self.d, ops })
    }

    pub(crate) fn same_dim(&self, other: &KrausFamily) -> Result<()> {
        if self.d != other.d {
            return Err(Error::invalid(format!(
                "maps act on different algebras: d = {} and d = {}",
                self.d, other.d
            )));
        }
        Ok(())
    }

    /// `d² × N` matrix whose columns are the row-major vectorized operators.
    pub fn vectorized(&self) -> ComplexMatrix {
        let dd = self.d * self.d;
        let mut out = ComplexMatrix::zeros(dd, self.ops.len());
        for (k, t) in self.ops.iter().enumerate() {
            for (i, z) in t.data().iter().enumerate() {
                out[(i, k)] = *z;
            }
        }
        out
    }

    /// A linearly independent family defining the same map.
    ///
    /// An already independent family is returned unchanged; otherwise the
    /// operators are rebuilt from the singular vectors of the vectorized
    /// family, largest singular value first.
    pub fn reduce(&self, tol: Tolerance) -> KrausFamily {
        if self.ops.is_empty() {
            return self.clone();
        }
        let v = self.vectorized();
        let f = svd(&v);
        let r = f.rank(tol);
        if r == self.ops.len() {
            return self.clone();
        }
        let ops = (0..r)
            .map(|k| {
                let col: Vec<C64> = (0..v.rows()).map(|i| f.u[(i, k)] * f.sigma[k]).collect();
                ComplexMatrix::unvec(&col, self.d, self.d)
            })
            .collect();
        KrausFamily { d: self.d, ops }
    }

    pub fn choi(&self) -> ChoiMatrix {
        ChoiMatrix::of(self)
    }

    /// Family with `before` zero operators in front and `after` behind.
    pub fn padded(&self, before: usize, after: usize) -> KrausFamily {
        let z = ComplexMatrix::zeros(self.d, self.d);
        let mut ops = Vec::with_capacity(before + self.len() + after);
        ops.extend(core::iter::repeat(z.clone()).take(before));
        ops.extend(self.ops.iter().cloned());
        ops.extend(core::iter::repeat(z).take(after));
        KrausFamily { d: self.d, ops }
    }
}

/// `Σ_{p,q} E_pq ⊗ Θ(E_pq)`, indexed by `((p, r), (q, s))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub d: usize,
    pub mat: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn of(f: &KrausFamily) -> Self {
        let d = f.d();
        let dd = d * d;
        let mut mat = ComplexMatrix::zeros(dd, dd);
        for t in f.ops() {
            // Column vector v with v[(p, r)] = T[r, p].
            let v: Vec<C64> = (0..dd).map(|pr| t[(pr % d, pr / d)]).collect();
            for (a, va) in v.iter().enumerate() {
                if va.is_zero() {
                    continue;
                }
                for (b, vb) in v.iter().enumerate() {
                    mat[(a, b)] += va * vb.conj();
                }
            }
        }
        ChoiMatrix { d, mat }
    }

    /// Kraus family recovered from the spectral decomposition.
    pub fn kraus(&self, tol: Tolerance) -> Result<KrausFamily> {
        let d = self.d;
        let (vals, vecs) = hermitian_eigen(&self.mat)?;
        let top = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let cut = tol.cutoff(top);
        let mut ops = Vec::new();
        for k in (0..vals.len()).rev() {
            if vals[k] <= cut {
                continue;
            }
            let s = vals[k].sqrt();
            ops.push(ComplexMatrix::from_fn(d, d, |r, p| vecs[(p * d + r, k)] * s));
        }
        Ok(KrausFamily::from_parts(d, ops))
    }
}

/// `‖Choi(Θ∘Φ) − Choi(Φ∘Θ)‖_F`.
pub fn commute_residual(theta: &KrausFamily, phi: &KrausFamily) -> Result<f64> {
    let tp = theta.compose(phi)?.choi();
    let pt = phi.compose(theta)?.choi();
    Ok(tp.mat.distance(&pt.mat))
}
