//! Leakage-controlled train/test splitting for molecular datasets.
//!
//! The crate covers two splitting regimes plus the tooling around them:
//!
//! * **Dissimilarity-constrained partitions**: build a Tanimoto neighborhood
//!   graph over the dataset, coarsen it by sphere-exclusion clustering, and
//!   solve a balanced vertex minimum k-cut so that no test molecule is
//!   similar to any training molecule ([`hi_split`]).
//! * **Similar-molecule cluster extraction**: pull out tight activity
//!   clusters for ranking-style evaluation, keeping one anchor molecule per
//!   cluster in the training pool ([`lo_split`]).
//!
//! Supporting modules provide dataset ingestion and fingerprinting
//! ([`molio`]), the similarity graph ([`simgraph`]), graph coarsening
//! ([`coarsen`]), the exact/heuristic cut solvers ([`kcut`]), split and
//! prediction metrics ([`metrics`]), and the `molsplit` command-line
//! interface ([`cli`]).

pub mod cli;
pub mod coarsen;
pub mod hi_split;
pub mod kcut;
pub mod lo_split;
pub mod manifest;
pub mod metrics;
pub mod molio;
pub mod simgraph;

pub use manifest::{SplitManifest, MANIFEST_FORMAT_VERSION, TOOL_VERSION};
pub use molio::{Dataset, Fingerprint};
pub use simgraph::{tanimoto, SimGraph};
