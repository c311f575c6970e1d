//! Simulation and verification toolkit for loose Hamilton cycles in random
//! k-uniform hypergraphs.
//!
//! The crate is organised around the objects used in the threshold argument:
//!
//! - [`hypergraph`]: `H(n,p;k)` and the bipartite-pattern hypergraph `Γ(S,T,p)`.
//! - [`configuration`]: the point/cell configuration model, spoiled-edge
//!   statistics and the rejection sampler for `Λ_d`.
//! - [`coupling`]: probability splitting and the copy hierarchy.
//! - [`matching`]: perfect-matching search in pattern hypergraphs.
//! - [`hamilton`]: exact loose-Hamilton-cycle detection and counting.
//! - [`analysis`]: closed forms of the second-moment computation and the
//!   critical-point analysis of the exponent `g(x, y)`.
//! - [`experiments`]: reproducible batch experiments that write CSV.

pub mod analysis;
pub mod configuration;
pub mod coupling;
pub mod error;
pub mod experiments;
pub mod hamilton;
pub mod hypergraph;
pub mod matching;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
