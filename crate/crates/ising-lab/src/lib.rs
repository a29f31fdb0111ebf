//! Ising partition functions with complex edge interactions.
//!
//! The crate bundles five engines around one model: exact partition-function
//! evaluation on multigraphs, self-avoiding-walk-tree zero-free certification,
//! a truncated-log-Taylor approximation scheme on the certified disk,
//! parameter-plane region geometry, and a gadget compiler that implements
//! arbitrary complex edge interactions through bounded-degree graphs.

pub mod error;
pub mod exact;
pub mod fptas;
pub mod gadget;
pub mod graph;
pub mod numerics;
pub mod region;
pub mod saw;

pub use error::{Error, Result};
pub use numerics::{Cplx, GaussRat, InfCplx, PrecisionContext};
