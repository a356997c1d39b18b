pub mod bits;
pub mod detectors;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod rat;
pub mod rng;
pub mod semigroup;
pub mod sets;

pub use error::{Error, Result};
pub use rat::Rat;
pub use semigroup::{GridSpec, SemigroupDescriptor, WindowGrid};
