//! The space of intertwiners `X: C^d → M_d ⊗_Θ C^d` with `X a = (a ⊗ I) X`.
//!
//! The tensor space is modelled by the Gram matrix of the generators
//! `E_pq ⊗ e_t`; an eigendecomposition gives orthonormal coordinates in which
//! the left action of `M_d` and the intertwining equations become ordinary
//! linear algebra.

use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use super::gram::{check_cap, GRAM_DIM_CAP};
use super::kraus::KrausFamily;
use crate::error::Result;
use crate::linalg::{hermitian_eigen, kernel_and_range, ComplexMatrix, Tolerance, C64};

#[derive(Debug, Clone)]
pub struct Intertwiners {
    /// Orthonormal basis for the inner product `tr(X₁^* X₂)/d`.
    pub basis: Vec<ComplexMatrix>,
    /// `W^* X` for each basis element, where `W h = I ⊗ h`.
    pub t_rep: Vec<ComplexMatrix>,
}

impl Intertwiners {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `Σ_b T_b a T_b^*`.
    pub fn reconstruct(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(a.rows(), a.cols());
        for t in &self.t_rep {
            out += &t.matmul(a).matmul(&t.adjoint());
        }
        out
    }
}

pub fn intertwiner_space(theta: &KrausFamily, tol: Tolerance) -> Result<Intertwiners> {
    let d = theta.d();
    check_cap(d, GRAM_DIM_CAP)?;
    let g_size = d * d * d;
    let gen = |p: usize, q: usize, t: usize| (p * d + q) * d + t;

    let images: Vec<ComplexMatrix> = (0..d * d)
        .map(|k| theta.apply(&ComplexMatrix::unit(d, k / d, k % d)))
        .collect::<Result<_>>()?;
    let mut gram = ComplexMatrix::zeros(g_size, g_size);
    for p in 0..d {
        for q in 0..d {
            for q2 in 0..d {
                let img = &images[q * d + q2];
                for t in 0..d {
                    for t2 in 0..d {
                        gram[(gen(p, q, t), gen(p, q2, t2))] = img[(t, t2)];
                    }
                }
            }
        }
    }

    let (vals, vecs) = hermitian_eigen(&gram)?;
    let top = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cut = tol.cutoff(top);
    let kept: Vec<usize> = (0..vals.len()).rev().filter(|&k| vals[k] > cut).collect();
    let r = kept.len();
    // Coordinates: J = Λ^{1/2} V^*, right inverse J⁺ = V Λ^{-1/2}.
    let mut j = ComplexMatrix::zeros(r, g_size);
    let mut j_plus = ComplexMatrix::zeros(g_size, r);
    for (row, &k) in kept.iter().enumerate() {
        let s = vals[k].sqrt();
        for g in 0..g_size {
            j[(row, g)] = vecs[(g, k)].conj() * s;
            j_plus[(g, row)] = vecs[(g, k)] / s;
        }
    }

    // Stack X E_uv − L(E_uv) X = 0 for all matrix units, with row-major
    // vectorization vec(A X B) = (A ⊗ B^T) vec(X).
    let unknowns = r * d;
    let mut system = ComplexMatrix::zeros(d * d * unknowns, unknowns);
    let id_r = ComplexMatrix::identity(r);
    let id_d = ComplexMatrix::identity(d);
    for u in 0..d {
        for v in 0..d {
            let e = ComplexMatrix::unit(d, u, v);
            let mut left = ComplexMatrix::zeros(g_size, g_size);
            for q in 0..d {
                for t in 0..d {
                    // E_uv E_pq = δ_vp E_uq.
                    left[(gen(u, q, t), gen(v, q, t))] = C64::new(1.0, 0.0);
                }
            }
            let l_hat = j.matmul(&left).matmul(&j_plus);
            let block = &id_r.kron(&e.transpose()) - &l_hat.kron(&id_d);
            system.set_block((u * d + v) * unknowns, 0, &block);
        }
    }
    let (kernel, _) = kernel_and_range(&system, tol)?;

    let mut w_gen = ComplexMatrix::zeros(g_size, d);
    for t in 0..d {
        for s in 0..d {
            w_gen[(gen(s, s, t), t)] = C64::new(1.0, 0.0);
        }
    }
    let w_hat = j.matmul(&w_gen);
    let scale = (d as f64).sqrt();
    let mut basis = Vec::with_capacity(kernel.cols());
    let mut t_rep = Vec::with_capacity(kernel.cols());
    for c in 0..kernel.cols() {
        let x = ComplexMatrix::unvec(&kernel.column(c), r, d).scale_real(scale);
        t_rep.push(w_hat.adjoint_mul(&x));
        basis.push(x);
    }
    Ok(Intertwiners { basis, t_rep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::channels;
    use crate::linalg::rank;
    use alloc::vec;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn reconstructs(f: &KrausFamily, sp: &Intertwiners) {
        let d = f.d();
        for p in 0..d {
            for q in 0..d {
                let a = ComplexMatrix::unit(d, p, q);
                assert!(sp.reconstruct(&a).distance(&f.apply(&a).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn identity_channel_has_one_intertwiner() {
        let id = channels::identity(2);
        let sp = intertwiner_space(&id, tol()).unwrap();
        assert_eq!(sp.dim(), rank(&id.choi().mat, tol()));
        assert_eq!(sp.dim(), 1);
        // T_rep = {I} up to a phase.
        let t = &sp.t_rep[0];
        let phase = t[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(t.distance(&ComplexMatrix::identity(2).scale(phase)) < 1e-12);
        reconstructs(&id, &sp);
    }

    #[test]
    fn bit_flip_has_two_intertwiners() {
        let f = channels::bit_flip(0.5).unwrap();
        let sp = intertwiner_space(&f, tol()).unwrap();
        assert_eq!(sp.dim(), 2);
        reconstructs(&f, &sp);
        // Orthonormal for tr(X^* Y)/d.
        for a in 0..2 {
            for b in 0..2 {
                let ip = sp.basis[a].adjoint_mul(&sp.basis[b]).trace() / 2.0;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - C64::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_map_has_no_intertwiners() {
        let zero = KrausFamily::new(2, vec![ComplexMatrix::zeros(2, 2)]).unwrap();
        assert_eq!(intertwiner_space(&zero, tol()).unwrap().dim(), 0);
    }

    #[test]
    fn qutrit_channel_index_matches_choi_rank() {
        let f = channels::mixture(
            &[0.5, 0.3, 0.2],
            &[ComplexMatrix::identity(3), channels::shift(3), channels::clock(3)],
        )
        .unwrap();
        let sp = intertwiner_space(&f, tol()).unwrap();
        assert_eq!(sp.dim(), 3);
        reconstructs(&f, &sp);
    }
}
