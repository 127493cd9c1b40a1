//! Completely positive maps on `M_d(C)` given by Kraus families, and the
//! structures relating two commuting maps.

pub mod channels;
mod flip;
mod gram;
mod intertwiner;
mod kraus;

pub use flip::{
    build_flip_unitary, coisometry_factor, flip_partial_isometry, pad_families, strong_commute_kernel_test,
    Coisometry, Direction, FlipUnitary, KernelTest, PaddedSystem, FLIP_ORDERING,
};
pub use gram::{gram_tensor_space, strong_commute_direct, DirectTest, GramSpace, Order, GRAM_DIM_CAP};
pub use intertwiner::{intertwiner_space, Intertwiners};
pub use kraus::{commute_residual, ChoiMatrix, KrausFamily};
