//! Dynamic search structures for sets drawn from a tree-like partially
//! ordered universe.
//!
//! The universe is a rooted tree: `x ⪯ y` iff `x` is an ancestor of `y`.
//! A member set `S` (always containing the universe root `ν`) induces a
//! Hasse diagram `H_S`; the [`LineLeafTree`] indexes `H_S` and supports
//! insert, delete, membership and predecessor queries while staying
//! structurally equivalent to a from-scratch static rebuild.
//!
//! The crate also ships the oracles used to validate the structure: a
//! brute-force dynamic edge query, a bitmask DP for optimal static
//! search-tree height, canonical signatures for rebuild-equivalence
//! checking, generators for random and adversarial universes, a
//! filesystem ingester, and the experiment harness behind the `llt`
//! command line tool.

pub mod error;
pub mod exp;
pub mod gen;
pub mod hasse;
pub mod ingest;
pub mod opt;
pub mod query;
pub mod rng;
pub mod signature;
pub mod trace;
pub mod tree;
pub mod universe;

pub use error::Error;
pub use tree::{LineLeafTree, Metrics, SearchOutcome};
pub use hasse::HasseDiagram;
pub use query::{edge_query_brute, edge_query_fast, EdgeQueryAnswer};
pub use universe::{ElementId, UniverseTree};

pub type Result<T> = std::result::Result<T, Error>;
