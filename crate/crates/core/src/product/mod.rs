//! Product systems over `C^n` and `C^m` twisted by a flip unitary, and their
//! covariant representations.

mod rep;
mod system;

pub use rep::{CovariantRep, Side};
pub use system::ScalarProductSystem;
