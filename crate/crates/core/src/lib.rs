//! Hypothesis tests for distributions of rooted trees.
//!
//! Trees live in a truncated full tree over a finite alphabet (see
//! [`space::TreeSpace`]); a node labeled `a_1 … a_j` is the child of
//! `a_2 … a_j`. Two samples are compared through
//! `W = sup_t |dbar(t, a) - dbar(t, b)|`, where `dbar` is the mean weighted
//! symmetric-difference distance from `t` to a sample. The supremum over the
//! exponentially large tree space is computed exactly by a min-cut
//! ([`mincut`]), and its null distribution by permutation or Monte-Carlo
//! resampling ([`inference`]).
//!
//! Context trees are estimated from symbol sequences with the probabilistic
//! suffix tree criterion ([`pst`]); [`genmodels`] provides variable-length
//! Markov chains, Galton–Watson type tree laws and their marginals, and
//! [`oracle`] holds brute-force enumerations used to validate the solver.

pub mod cli;
pub mod error;
pub mod genmodels;
pub mod inference;
pub mod io;
pub mod mincut;
pub mod oracle;
pub mod pst;
pub mod rng;
pub mod space;
pub mod tree;

pub use error::{Error, Result};
pub use mincut::{scaled_statistic, sup_statistic, SupStatistic};
pub use space::{NodeId, TreeSpace, WeightFunction, ROOT};
pub use tree::{distance, is_tree, mean_distance, mean_occupancy, Configuration, OccupancyVector, Tree, TreeSample};
