use alloc::format;
use alloc::vec::Vec;

use super::system::ScalarProductSystem;
use crate::cp::KrausFamily;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The family indexed by `E`.
    T,
    /// The family indexed by `F`.
    S,
}

/// Operators `T_1..T_n`, `S_1..S_m` on `C^h`, each family a row contraction.
#[derive(Debug, Clone)]
pub struct CovariantRep {
    h: usize,
    t: Vec<ComplexMatrix>,
    s: Vec<ComplexMatrix>,
}

impl CovariantRep {
    pub fn new(h: usize, t: Vec<ComplexMatrix>, s: Vec<ComplexMatrix>) -> Result<Self> {
        if h == 0 {
            return Err(Error::invalid("representation space must be nonzero"));
        }
        if t.is_empty() || s.is_empty() {
            return Err(Error::invalid("both operator families must be nonempty"));
        }
        for (name, family) in [("T", &t), ("S", &s)] {
            for (i, op) in family.iter().enumerate() {
                if op.shape() != (h, h) {
                    return Err(Error::invalid(format!(
                        "{name}_{i} is {}x{}, expected {h}x{h}",
                        op.rows(),
                        op.cols()
                    )));
                }
                if !op.is_finite() {
                    return Err(Error::invalid(format!("{name}_{i} has non-finite entries")));
                }
            }
        }
        let rep = CovariantRep { h, t, s };
        rep.family(Side::T).check_contractive(Tolerance::default())?;
        rep.family(Side::S).check_contractive(Tolerance::default())?;
        Ok(rep)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn ops(&self, side: Side) -> &[ComplexMatrix] {
        match side {
            Side::T => &self.t,
            Side::S => &self.s,
        }
    }

    fn family(&self, side: Side) -> KrausFamily {
        KrausFamily::from_parts(self.h, self.ops(side).to_vec())
    }

    /// Row operator `C^{N^k} ⊗ C^h → C^h` sending `e_w ⊗ x` to the word
    /// product `X_{w_1} ⋯ X_{w_k} x`. `k = 0` gives the identity.
    pub fn row_matrix(&self, side: Side, k: usize) -> ComplexMatrix {
        let ops = self.ops(side);
        let mut words = alloc::vec![ComplexMatrix::identity(self.h)];
        for _ in 0..k {
            let mut next = Vec::with_capacity(words.len() * ops.len());
            for w in &words {
                for op in ops {
                    next.push(w.matmul(op));
                }
            }
            words = next;
        }
        ComplexMatrix::hstack(self.h, &words)
    }

    /// `‖T̃_a (I ⊗ S̃_b) − S̃_b (I ⊗ T̃_a)(t_{a,b} ⊗ I)‖_F`.
    pub fn commutation_residual(&self, sys: &ScalarProductSystem, a: usize, b: usize) -> Result<f64> {
        self.check_sizes(sys)?;
        let (na, mb) = (sys.n().pow(a as u32), sys.m().pow(b as u32));
        let ta = self.row_matrix(Side::T, a);
        let sb = self.row_matrix(Side::S, b);
        let lhs = ta.matmul(&ComplexMatrix::identity(na).kron(&sb));
        let flip = sys.flip_mn(a, b).kron(&ComplexMatrix::identity(self.h));
        let rhs = sb.matmul(&ComplexMatrix::identity(mb).kron(&ta)).matmul(&flip);
        Ok(lhs.distance(&rhs))
    }

    pub fn check_sizes(&self, sys: &ScalarProductSystem) -> Result<()> {
        if self.t.len() != sys.n() || self.s.len() != sys.m() {
            return Err(Error::invalid(format!(
                "representation has {} T and {} S operators, system expects {} and {}",
                self.t.len(),
                self.s.len(),
                sys.n(),
                sys.m()
            )));
        }
        Ok(())
    }

    /// The pair `(a ↦ Σ T_i a T_i^*, a ↦ Σ S_j a S_j^*)`.
    pub fn induced_cp_pair(&self) -> (KrausFamily, KrausFamily) {
        (self.family(Side::T), self.family(Side::S))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::channels;
    use crate::linalg::C64;
    use alloc::vec;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn half_pauli() -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
        let h = 0.5f64.sqrt();
        (
            vec![
                ComplexMatrix::identity(2).scale_real(h),
                channels::pauli_x().scale_real(h),
            ],
            vec![
                ComplexMatrix::identity(2).scale_real(h),
                channels::pauli_z().scale_real(h),
            ],
        )
    }

    fn sign_system() -> ScalarProductSystem {
        let one = C64::new(1.0, 0.0);
        ScalarProductSystem::new(2, 2, ComplexMatrix::diag(&[one, one, one, -one]), tol()).unwrap()
    }

    #[test]
    fn rejects_non_contractive_rows() {
        let r = CovariantRep::new(
            1,
            vec![ComplexMatrix::identity(1), ComplexMatrix::identity(1)],
            vec![ComplexMatrix::identity(1)],
        );
        assert!(matches!(r, Err(Error::NotContractive { .. })));
    }

    #[test]
    fn rejects_wrong_shapes() {
        let r = CovariantRep::new(
            2,
            vec![ComplexMatrix::identity(3)],
            vec![ComplexMatrix::identity(2)],
        );
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn row_matrix_lists_word_products() {
        let (t, s) = half_pauli();
        let rep = CovariantRep::new(2, t.clone(), s).unwrap();
        let r2 = rep.row_matrix(Side::T, 2);
        assert_eq!(r2.shape(), (2, 8));
        for w in 0..4 {
            let want = t[w / 2].matmul(&t[w % 2]);
            assert!(r2.submatrix(0, 2 * w, 2, 2).distance(&want) < 1e-15);
        }
        assert_eq!(rep.row_matrix(Side::S, 0), ComplexMatrix::identity(2));
    }

    #[test]
    fn pauli_rep_is_covariant_at_all_degrees() {
        let (t, s) = half_pauli();
        let rep = CovariantRep::new(2, t, s).unwrap();
        let sys = sign_system();
        for a in 0..=3 {
            for b in 0..=3 {
                assert!(
                    rep.commutation_residual(&sys, a, b).unwrap() < 1e-12,
                    "a={a} b={b}"
                );
            }
        }
    }

    #[test]
    fn wrong_flip_is_detected() {
        let (t, s) = half_pauli();
        let rep = CovariantRep::new(2, t, s).unwrap();
        let swap = ScalarProductSystem::new(2, 2, ComplexMatrix::identity(4), tol()).unwrap();
        assert!(rep.commutation_residual(&swap, 1, 1).unwrap() > 0.1);
    }

    #[test]
    fn induced_pair_matches_operators() {
        let (t, s) = half_pauli();
        let rep = CovariantRep::new(2, t.clone(), s.clone()).unwrap();
        let (theta, phi) = rep.induced_cp_pair();
        assert_eq!(theta.ops(), &t[..]);
        assert_eq!(phi.ops(), &s[..]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        // Scalars commute, so a phase flip λ leaves a defect |x|^a |y|^b |1 − λ^{ab}|.
        #[test]
        fn scalar_defect_scales_with_the_flip_power(
            x in -0.7f64..0.7, y in -0.7f64..0.7, phase in 0.0f64..6.3, a in 0usize..=3, b in 0usize..=3,
        ) {
            let lambda = C64::from_polar(1.0, phase);
            let sys = ScalarProductSystem::new(1, 1, ComplexMatrix::scalar(lambda), tol()).unwrap();
            let t = ComplexMatrix::scalar(C64::new(x, 0.0));
            let s = ComplexMatrix::scalar(C64::new(y, 0.0));
            let rep = CovariantRep::new(1, vec![t], vec![s]).unwrap();
            let r = rep.commutation_residual(&sys, a, b).unwrap();
            let want = (x.abs().powi(a as i32) * y.abs().powi(b as i32)) * (C64::new(1.0, 0.0) - lambda.powu((a * b) as u32)).norm();
            prop_assert!((r - want).abs() < 1e-12);
        }
    }
}
