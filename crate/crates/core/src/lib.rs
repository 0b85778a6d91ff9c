//! Multiscale clustering toolkit: temperature-indexed random-walk
//! clustering of distance clouds, coupled row/column clustering of data
//! matrices, margin-preserving matrix mimicking, and pairwise alignment
//! scoring.
//!
//! The crate is organized around a few data carriers — [`DataMatrix`],
//! [`DistanceMatrix`], [`Partition`], [`ClusterTree`] — and four
//! algorithm families:
//!
//! * [`dcg`]: regulated random walks over a similarity kernel produce
//!   cluster-sharing frequencies at each scale; eigenvalue counts and
//!   plateau selection turn the scale sweep into an ultrametric tree.
//! * [`dm`]: rows and columns of a data matrix are clustered
//!   alternately, each axis re-described through the other's clusters,
//!   until the block decomposition stabilizes; block homogeneity is
//!   scored by a total-variation energy.
//! * [`mimic`]: random binary/categorical matrices preserving row and
//!   column margins, globally or within blocks, for null ensembles.
//! * [`seqscore`]: gap-aware pairwise scores over pre-aligned sequence
//!   sets, standardized into similarity matrices.
//!
//! Classical agglomerative clustering lives in [`hc`] and backs both
//! the sharing-matrix composition step and the coupled axis trees.

pub mod data;
pub mod dcg;
pub mod dm;
mod distance;
pub mod eigen;
mod error;
pub mod hc;
mod matrix;
pub mod mimic;
mod partition;
pub mod seqscore;
mod tree;

pub use distance::{is_ultrametric, DistanceMatrix};
pub use error::{Error, Result};
pub use matrix::{
    discretize_equal_frequency, pairwise_euclidean, rank_normalize, Axis, Cell, DataMatrix,
    MatrixKind, DEFAULT_CODES,
};
pub use partition::{adjusted_rand_index, Partition};
pub use tree::{cut_partition, ClusterTree, Level};
