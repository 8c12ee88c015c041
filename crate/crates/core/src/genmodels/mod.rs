//! Generative models for sequences and trees.

pub mod gw;
pub mod markov;
pub mod vlmc;

pub use gw::{sample_gw_tree, ChildLabeling, GwModel, GwSpec};
pub use markov::{
    classical_gw_marginals, expected_distance, expected_distance_bias_variance, markov_conditional,
    non_identifiability_pair, pseudo_gw_marginals, reconstruct_distribution, FiniteLaw, TreeShift,
};
pub use vlmc::{simulate_vlmc, VlmcSpec};
