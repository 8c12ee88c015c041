//! Exact computation of the sup statistic through min-cut.

pub mod flow;
mod hamiltonian;
mod working;

pub use flow::{MaxFlowAlgorithm, ResidualGraph};
pub(crate) use hamiltonian::sup_statistic_local;
pub use hamiltonian::{
    beta_for, build_network, linear_field, linear_field_on, max_flow_min_cut, minimize_over_trees,
    minimize_over_trees_with, penalty, scaled_statistic, sup_statistic, sup_statistic_with, working_space_for,
    CutResult, FlowNetwork, LinearField, Pruning, Sign, SolverOptions, SupStatistic,
};
pub use working::WorkingSpace;
