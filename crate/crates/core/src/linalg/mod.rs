//! Dense complex matrices and the factorizations the constructions rely on.

mod block;
mod decomp;
mod gemm;
mod matrix;
mod split;

pub use block::BlockMatrix;
pub use decomp::{
    extend_partial_isometry, hermitian_eigen, kernel_and_range, pinv, psd_sqrt, rank, svd, Svd,
};
pub use matrix::{ComplexMatrix, Tolerance, C64};
pub use split::{isometry_complement, structured_complement, Components};
