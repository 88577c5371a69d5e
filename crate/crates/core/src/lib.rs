//! Simplicial truss decomposition.
//!
//! A simplicial complex is loaded from its list of maximal simplices, split
//! into connected components, and processed level by level: simplices of
//! size `q` are materialized from the surviving simplices of size `q - 1`,
//! their joists are discovered through an inverted index over codes (with an
//! optional out-of-core candidate store), and trussness values are obtained
//! by bucket-queue peeling.
//!
//! The [`oracle`] module holds brute-force reference implementations that
//! share nothing with the optimized path beyond [`Simplex`].

pub mod analysis;
pub mod complex;
pub mod engine;
mod error;
pub mod generators;
pub mod joists;
pub mod oracle;
mod simplex;

pub use complex::SimplicialComplex;
pub use engine::{decompose, top_n, DecomposeOptions, Decomposition, TopN, TrussnessMap};
pub use error::{Error, Result};
pub use joists::{JoistMap, MemoryBudget};
pub use simplex::{Simplex, VertexId};
