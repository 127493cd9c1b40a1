//! Isometric dilation of a covariant representation on a truncated graded
//! Fock-type space.

mod assemble;
mod corrector;
mod minimal;
pub(crate) mod primitive;
mod space;

pub use assemble::{
    assemble_dilation, corner_table, verify_dilation, DilationConfig, DilationResult, Letter, Word,
    WordEntry, DEFAULT_ACCEPT,
};
pub use corrector::{build_corrector, Corrector};
pub use minimal::{minimal_restriction, MinimalDilation};
pub use primitive::{build_primitive_isometries, defect, PrimitiveIsometries};
pub use space::{Grade, GradedFockSpace, Label, DIM_CAP};
