//! Finite-dimensional dilation theory for commuting completely positive maps.
//!
//! Starting from two commuting CP maps on `M_d(C)` given by Kraus families,
//! this crate builds the flip unitary relating the two families, the scalar
//! product system over `N^2` it defines, a commuting pair of isometric row
//! tuples dilating the original families on a truncated doubly graded Fock
//! space, and the commuting `*`-endomorphisms those isometries induce.
//!
//! Everything is dense complex linear algebra over `f64`. The crate is
//! `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod cp;
pub mod dilation;
pub mod endo;
mod error;
pub mod linalg;
pub mod product;
pub mod report;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance, C64};
