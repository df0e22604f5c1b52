//! Limit sets of nets of subsets, with exact finite and rational backends.

pub mod bitset;
pub mod directed_sets;
pub mod error;
pub mod finite_topology;
pub mod pseudometric_core;
pub mod semiflow_cells;
pub mod setvalued_maps;
pub mod subset_nets;
pub mod theoremlab;

pub use bitset::BitSet;
pub use error::{Error, Result};
