//! Normalized graph Laplacians as density matrices: partial-transpose graphs,
//! PPT tests, entangling labelings and the S / SE / E classification of
//! graphs over all vertex labelings.
//!
//! Module map:
//! * [`graph`]: dense small graphs, builders, graph6 I/O
//! * [`labeling`]: tensor shapes, labelings, orbit-reduced enumeration
//! * [`pt_graph`]: partial-transpose graphs and the degree condition
//! * [`density`]: Laplacian density matrices and the two-tier PPT test
//! * [`pigeonhole`]: top-`m` box selection
//! * [`entangler`]: entangling labelings for noncomplete graphs
//! * [`classifier`]: per-labeling verdicts, graph classes, scans
//! * [`cli`]: the `lapsep` command

pub mod classifier;
pub mod cli;
pub mod density;
pub mod entangler;
pub mod error;
pub mod graph;
pub mod labeling;
pub mod pigeonhole;
pub mod pt_graph;

pub use error::{Error, Result};
pub use graph::Graph;
pub use labeling::{TensorShape, VertexLabeling};
pub use pt_graph::BipartiteSplit;
