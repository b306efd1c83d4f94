//! Constructive k-linkage for highly connected tournaments.
//!
//! Given a tournament whose vertices all have in- and out-degree at least
//! `452k`, [`linker::link`] routes `k` vertex-disjoint directed paths between
//! prescribed terminal pairs. The supporting pieces are usable on their own:
//!
//! * [`tournament`]: representation, generators, the `TOURN 1` format;
//! * [`flows`]: set-to-set Menger routing and exact strong connectivity;
//! * [`domination`]: partial greedy in/out-dominating sequences;
//! * [`linkage_pairs`]: vertex sets between which every bijection is routable;
//! * [`oracle`]: exhaustive checkers for small instances.

pub mod domination;
pub mod flows;
pub mod linkage_pairs;
pub mod linker;
pub mod oracle;
pub mod tournament;
pub mod vertex_set;

pub use flows::{disjoint_paths, strong_connectivity, DisjointPathSet};
pub use tournament::{Path, Tournament};
pub use vertex_set::VertexSet;
