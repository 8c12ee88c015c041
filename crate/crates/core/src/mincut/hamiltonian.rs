//! Exact sup statistic through penalized-Hamiltonian minimization.
//!
//! Maximizing `|dbar(t, a) - dbar(t, b)|` over trees reduces to minimizing the
//! linear form `L(t) = sum_v coef(v) t(v)` and its negation over trees, where
//! `coef(v) = phi(v) (bbar(v) - abar(v))`. Relaxing to arbitrary
//! configurations and adding `beta * P(y)`, with `P` the orphan count and
//! `beta > sum phi`, keeps the minimizers suffix-closed. The relaxed problem is
//! a regular binary energy, solved exactly by an s-t min cut: the source feeds
//! positive coefficients, negative coefficients drain to the sink, and each
//! parent→child edge carries `beta`.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mincut::flow::{MaxFlowAlgorithm, ResidualGraph};
use crate::mincut::working::WorkingSpace;
use crate::space::{NodeId, TreeSpace, WeightFunction};
use crate::tree::{same_space, Configuration, OccupancyVector, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// How much of the space a statistic is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pruning {
    /// Suffix closure of the nodes with nonzero occupancy in either input.
    /// Nodes outside carry zero coefficient along with all their descendants,
    /// so the optimum is unchanged.
    #[default]
    Support,
    /// Every node of the space.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverOptions {
    pub algorithm: MaxFlowAlgorithm,
    pub pruning: Pruning,
}

/// `L(y) = sum_v coef(v) y(v)` on a working space.
#[derive(Debug, Clone)]
pub struct LinearField {
    working: WorkingSpace,
    coef: Vec<f64>,
}

impl LinearField {
    pub fn new(working: WorkingSpace, coef: Vec<f64>) -> Result<Self> {
        if coef.len() != working.len() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients for {} working nodes",
                coef.len(),
                working.len()
            )));
        }
        Ok(Self { working, coef })
    }

    pub fn working(&self) -> &WorkingSpace {
        &self.working
    }

    pub fn space(&self) -> &Arc<TreeSpace> {
        self.working.space()
    }

    /// Coefficients in local (working-space) order.
    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    /// Coefficient of a global node; zero outside the working space.
    pub fn coef(&self, v: NodeId) -> f64 {
        self.working.local(v).map_or(0.0, |i| self.coef[i])
    }

    pub fn negated(&self) -> Self {
        Self { working: self.working.clone(), coef: self.coef.iter().map(|c| -c).collect() }
    }

    pub fn value(&self, y: &Configuration) -> f64 {
        self.working.nodes().iter().zip(&self.coef).filter(|(v, _)| y.contains(**v)).map(|(_, c)| c).sum()
    }

    /// `L(y) + beta * P(y)` with the orphan count taken over working-space
    /// edges. On an unpruned field this is the full-space Hamiltonian.
    pub fn hamiltonian(&self, beta: f64, y: &Configuration) -> f64 {
        let nodes = self.working.nodes();
        let orphans = self.working.edges().filter(|&(p, c)| y.contains(nodes[c]) && !y.contains(nodes[p])).count();
        self.value(y) + beta * orphans as f64
    }
}

fn check_pair(occ_a: &OccupancyVector, occ_b: &OccupancyVector) -> Result<()> {
    if same_space(occ_a.space(), occ_b.space()) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

pub fn working_space_for(occ_a: &OccupancyVector, occ_b: &OccupancyVector, pruning: Pruning) -> Result<WorkingSpace> {
    check_pair(occ_a, occ_b)?;
    let space = occ_a.space().clone();
    Ok(match pruning {
        Pruning::Full => WorkingSpace::full(space),
        Pruning::Support => WorkingSpace::closure_of(space, occ_a.support().chain(occ_b.support())),
    })
}

/// `coef(v) = sign * phi(v) * (occ_b(v) - occ_a(v))` on the support closure.
pub fn linear_field(
    occ_a: &OccupancyVector,
    occ_b: &OccupancyVector,
    w: &WeightFunction,
    sign: Sign,
) -> Result<LinearField> {
    let working = working_space_for(occ_a, occ_b, Pruning::Support)?;
    linear_field_on(working, occ_a, occ_b, w, sign)
}

pub fn linear_field_on(
    working: WorkingSpace,
    occ_a: &OccupancyVector,
    occ_b: &OccupancyVector,
    w: &WeightFunction,
    sign: Sign,
) -> Result<LinearField> {
    check_pair(occ_a, occ_b)?;
    if !same_space(working.space(), occ_a.space()) {
        return Err(Error::SpaceMismatch);
    }
    let s = sign.factor();
    let space = working.space().clone();
    let coef = working.nodes().iter().map(|&v| s * w.phi(&space, v) * (occ_b.get(v) - occ_a.get(v))).collect();
    LinearField::new(working, coef)
}

/// Number of present nodes whose parent is absent.
pub fn penalty(y: &Configuration) -> usize {
    let space = y.space();
    y.nodes().filter(|&v| space.parent_of(v).is_some_and(|p| !y.contains(p))).count()
}

/// `sum_{v in working} phi(v) + 1`.
pub fn beta_for(w: &WeightFunction, working: &WorkingSpace) -> f64 {
    working.weight_total(w) + 1.0
}

/// The source/sink capacity graph of a Hamiltonian `L + beta P`. Working nodes
/// keep their local indices; the source is `len()` and the sink `len() + 1`.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    working: WorkingSpace,
    beta: f64,
    source_cap: Vec<f64>,
    sink_cap: Vec<f64>,
    graph: ResidualGraph,
}

impl FlowNetwork {
    pub fn working(&self) -> &WorkingSpace {
        &self.working
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn source(&self) -> usize {
        self.working.len()
    }

    pub fn sink(&self) -> usize {
        self.working.len() + 1
    }

    /// `c(s, v)` for a global node.
    pub fn source_capacity(&self, v: NodeId) -> f64 {
        self.working.local(v).map_or(0.0, |i| self.source_cap[i])
    }

    /// `c(v, b)` for a global node.
    pub fn sink_capacity(&self, v: NodeId) -> f64 {
        self.working.local(v).map_or(0.0, |i| self.sink_cap[i])
    }

    /// Number of parent→child edges carrying `beta`.
    pub fn beta_edge_count(&self) -> usize {
        self.working.edges().count()
    }

    /// Positive-capacity edges as `(u, v, capacity)` with global node ids,
    /// source `-1` and sink `-2`.
    pub fn edge_list(&self) -> Vec<(i64, i64, f64)> {
        let nodes = self.working.nodes();
        let (s, b) = (self.source(), self.sink());
        let name = |i: usize| -> i64 {
            if i == s {
                -1
            } else if i == b {
                -2
            } else {
                nodes[i] as i64
            }
        };
        self.graph.edges().filter(|e| e.2 > 0.0).map(|(u, v, c)| (name(u), name(v), c)).collect()
    }

    /// One `u v capacity` line per positive edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (u, v, c) in self.edge_list() {
            let _ = writeln!(out, "{u} {v} {c}");
        }
        out
    }
}

pub fn build_network(f: &LinearField, beta: f64) -> Result<FlowNetwork> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive and finite, got {beta}")));
    }
    let k = f.working.len();
    let (s, b) = (k, k + 1);
    let mut graph = ResidualGraph::new(k + 2);
    let mut source_cap = vec![0.0; k];
    let mut sink_cap = vec![0.0; k];
    for (i, &c) in f.coef.iter().enumerate() {
        if c > 0.0 {
            source_cap[i] = c;
            graph.add_edge(s, i, c);
        } else if c < 0.0 {
            sink_cap[i] = -c;
            graph.add_edge(i, b, -c);
        }
    }
    for (p, c) in f.working.edges() {
        graph.add_edge(p, c, beta);
    }
    Ok(FlowNetwork { working: f.working.clone(), beta, source_cap, sink_cap, graph })
}

#[derive(Debug, Clone)]
pub struct CutResult {
    pub minimizer: Configuration,
    pub hamiltonian_value: f64,
    pub flow_value: f64,
    pub is_tree: bool,
}

/// Solves the network and reads the minimizing configuration off the final
/// residual graph. The augmenting-path backend returns the working nodes not
/// reachable from the source; the push-relabel backend returns the nodes that
/// can still reach the sink. Both are minimum cuts.
pub fn max_flow_min_cut(net: &FlowNetwork, algorithm: MaxFlowAlgorithm) -> CutResult {
    let mut graph = net.graph.clone();
    let (s, b) = (net.source(), net.sink());
    let flow_value = graph.max_flow(s, b, algorithm);
    let k = net.working.len();
    let inside: Vec<bool> = match algorithm {
        MaxFlowAlgorithm::AugmentingPath => graph.reachable_from(s)[..k].iter().map(|r| !r).collect(),
        MaxFlowAlgorithm::PushRelabel => graph.reaching(b)[..k].to_vec(),
    };
    let nodes = net.working.nodes();
    let minimizer =
        Configuration::from_nodes(net.working.space().clone(), (0..k).filter(|&i| inside[i]).map(|i| nodes[i]))
            .expect("working nodes are in range");
    let mut value = 0.0;
    for i in 0..k {
        if inside[i] {
            value += net.source_cap[i] - net.sink_cap[i];
        }
    }
    let orphans = net.working.edges().filter(|&(p, c)| inside[c] && !inside[p]).count();
    CutResult { is_tree: orphans == 0, hamiltonian_value: value + net.beta * orphans as f64, minimizer, flow_value }
}

/// `min_t L(t)` over trees, with its minimizer.
pub fn minimize_over_trees(f: &LinearField, w: &WeightFunction) -> Result<(Tree, f64)> {
    minimize_over_trees_with(f, w, MaxFlowAlgorithm::default())
}

pub fn minimize_over_trees_with(
    f: &LinearField,
    w: &WeightFunction,
    algorithm: MaxFlowAlgorithm,
) -> Result<(Tree, f64)> {
    let beta = beta_for(w, &f.working);
    let net = build_network(f, beta)?;
    let cut = max_flow_min_cut(&net, algorithm);
    if !cut.is_tree {
        return Err(Error::Solver(format!(
            "min-cut minimizer with beta={beta} is not suffix-closed: {:?}",
            cut.minimizer.labels()
        )));
    }
    let value = cut.hamiltonian_value;
    let tree = cut.minimizer.into_tree()?;
    Ok((tree, value))
}

/// Result of the sup statistic.
#[derive(Debug, Clone)]
pub struct SupStatistic {
    /// `sup_t |dbar(t, a) - dbar(t, b)|`.
    pub statistic: f64,
    /// A tree attaining the supremum.
    pub tree: Tree,
    /// `+1` when attained by minimizing `L`, `-1` when by maximizing it.
    pub side: i8,
    /// `sum_v phi(v) (abar(v) - bbar(v))`.
    pub constant: f64,
    pub min_l: f64,
    pub max_l: f64,
}

pub fn sup_statistic(occ_a: &OccupancyVector, occ_b: &OccupancyVector, w: &WeightFunction) -> Result<SupStatistic> {
    sup_statistic_with(occ_a, occ_b, w, SolverOptions::default())
}

pub fn sup_statistic_with(
    occ_a: &OccupancyVector,
    occ_b: &OccupancyVector,
    w: &WeightFunction,
    opts: SolverOptions,
) -> Result<SupStatistic> {
    let working = working_space_for(occ_a, occ_b, opts.pruning)?;
    let field = linear_field_on(working, occ_a, occ_b, w, Sign::Plus)?;
    let constant = -field.coef.iter().sum::<f64>();
    let (t_min, min_l) = minimize_over_trees_with(&field, w, opts.algorithm)?;
    let (t_max, neg_max) = minimize_over_trees_with(&field.negated(), w, opts.algorithm)?;
    let max_l = -neg_max;
    let lo = (constant + 2.0 * min_l).abs();
    let hi = (constant + 2.0 * max_l).abs();
    let (statistic, tree, side) = if lo >= hi { (lo, t_min, 1) } else { (hi, t_max, -1) };
    Ok(SupStatistic { statistic, tree, side, constant, min_l, max_l })
}

/// `sqrt(n m / (n + m)) * W`.
pub fn scaled_statistic(w: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (n * m / (n + m)).sqrt() * w
}

/// Sup statistic on a fixed working space from local occupancy slices. This is
/// the inner loop of the resampling procedures.
pub(crate) fn sup_statistic_local(
    working: &WorkingSpace,
    weights: &[f64],
    occ_a: &[f64],
    occ_b: &[f64],
    algorithm: MaxFlowAlgorithm,
) -> Result<f64> {
    let beta = weights.iter().sum::<f64>() + 1.0;
    let coef: Vec<f64> = weights.iter().zip(occ_a.iter().zip(occ_b)).map(|(p, (a, b))| p * (b - a)).collect();
    let constant = -coef.iter().sum::<f64>();
    let mut field = LinearField { working: working.clone(), coef };
    let min_l = solve_local(&field, beta, algorithm)?;
    field.coef.iter_mut().for_each(|c| *c = -*c);
    let max_l = -solve_local(&field, beta, algorithm)?;
    Ok((constant + 2.0 * min_l).abs().max((constant + 2.0 * max_l).abs()))
}

fn solve_local(f: &LinearField, beta: f64, algorithm: MaxFlowAlgorithm) -> Result<f64> {
    let net = build_network(f, beta)?;
    let cut = max_flow_min_cut(&net, algorithm);
    if !cut.is_tree {
        return Err(Error::Solver("min-cut minimizer is not suffix-closed".into()));
    }
    Ok(cut.hamiltonian_value)
}
