//! Symmetric-state entanglement, compression, and bound computations.

pub mod bounds;
pub mod combinatorics;
pub mod compression;
pub mod entanglement;
pub mod error;
pub mod format;
pub mod linalg;
pub mod noise;
pub mod optimizer;
mod par;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
pub use par::derive_seed;
