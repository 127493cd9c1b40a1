//! Standard channels and unitaries used as test fixtures.

use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use super::kraus::KrausFamily;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}

pub fn hadamard() -> ComplexMatrix {
    let s = 0.5f64.sqrt();
    ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).expect("2x2")
}

/// Diagonal `diag(1, ω, ω², …)` with `ω = e^{2πi/d}`.
pub fn clock(d: usize) -> ComplexMatrix {
    let w = core::f64::consts::TAU / d as f64;
    ComplexMatrix::diag(
        &(0..d)
            .map(|k| C64::from_polar(1.0, w * k as f64))
            .collect::<Vec<_>>(),
    )
}

/// Cyclic shift `e_k ↦ e_{k+1 mod d}`.
pub fn shift(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == (j + 1) % d {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

pub fn identity(d: usize) -> KrausFamily {
    KrausFamily::from_parts(d, vec![ComplexMatrix::identity(d)])
}

/// `a ↦ U a U^*` for a contraction `U`.
pub fn conjugation(u: &ComplexMatrix) -> Result<KrausFamily> {
    KrausFamily::new(u.rows(), vec![u.clone()])
}

/// `a ↦ Σ w_k P_k a P_k^*` with nonnegative weights summing to at most one.
pub fn mixture(weights: &[f64], unitaries: &[ComplexMatrix]) -> Result<KrausFamily> {
    if weights.len() != unitaries.len() || weights.is_empty() {
        return Err(Error::invalid(
            "weights and unitaries must be nonempty and of equal length",
        ));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::invalid("mixture weights must be nonnegative"));
    }
    let d = unitaries[0].rows();
    let ops = weights
        .iter()
        .zip(unitaries)
        .map(|(&w, u)| u.scale_real(w.sqrt()))
        .collect();
    KrausFamily::new(d, ops)
}

/// `a ↦ (1−p) a + p X a X`.
pub fn bit_flip(p: f64) -> Result<KrausFamily> {
    check_probability(p)?;
    mixture(&[1.0 - p, p], &[ComplexMatrix::identity(2), pauli_x()])
}

/// `a ↦ (1−p) a + p Z a Z`.
pub fn phase_flip(p: f64) -> Result<KrausFamily> {
    check_probability(p)?;
    mixture(&[1.0 - p, p], &[ComplexMatrix::identity(2), pauli_z()])
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid("probability must lie in [0, 1]"))
    }
}
