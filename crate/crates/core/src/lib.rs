//! Geometry and quantization of twisted P¹-chains: SL(2,ℂ) factorizations,
//! action-angle coordinates, the twisted-cube moment polytope, characters and
//! partition functions, and a regularized phase-space path integral.

pub mod chain;
pub mod cli;
pub mod coords;
pub mod error;
pub mod fmt;
pub mod partition;
pub mod pathint;
pub mod polytope;
pub mod quad;
pub mod su2;

pub use chain::{parse_chain_spec, validate, ChainSpec, Diagnostics};
pub use error::{Error, Result};
