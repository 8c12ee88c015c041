//! Brute-force references for small spaces. Every function here refuses to
//! run past its [`EnumerationGuard`].

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mincut::{
    beta_for, build_network, max_flow_min_cut, sup_statistic, FlowNetwork, LinearField, MaxFlowAlgorithm, WorkingSpace,
};
use crate::rng;
use crate::space::{NodeId, TreeSpace, WeightFunction, ROOT};
use crate::tree::{same_space, Configuration, OccupancyVector, Tree, TreeSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationGuard {
    /// Largest node count for sweeps over all `2^|V|` configurations.
    pub max_config_nodes: usize,
    /// Largest number of trees an enumeration may produce.
    pub max_trees: usize,
}

impl Default for EnumerationGuard {
    fn default() -> Self {
        Self { max_config_nodes: 20, max_trees: 1000 }
    }
}

/// Number of trees (including the empty one) in a space.
pub fn count_trees(space: &TreeSpace) -> u128 {
    // nonempty trees rooted at a depth-d node: g(d) = (1 + g(d+1))^m
    let m = space.alphabet_size() as u32;
    let mut g: u128 = 1;
    for _ in 0..space.max_depth() {
        g = (1u128.saturating_add(g)).saturating_pow(m);
    }
    g.saturating_add(1)
}

/// All suffix-closed subsets of the space, the empty tree first.
pub fn enumerate_trees(space: &Arc<TreeSpace>, guard: &EnumerationGuard) -> Result<Vec<Tree>> {
    let count = count_trees(space);
    if count > guard.max_trees as u128 {
        return Err(Error::GuardExceeded { size: count.min(usize::MAX as u128) as usize, limit: guard.max_trees });
    }
    let mut out = vec![Tree::empty(space.clone())];
    for nodes in subtrees(space, ROOT) {
        out.push(Tree::from_nodes(space.clone(), nodes)?);
    }
    Ok(out)
}

/// Nonempty trees rooted at `v`, as node lists: `v` plus any product of
/// (absent | nonempty subtree) over its children.
fn subtrees(space: &TreeSpace, v: NodeId) -> Vec<Vec<NodeId>> {
    let mut acc: Vec<Vec<NodeId>> = vec![vec![v]];
    for c in space.children(v) {
        let options = subtrees(space, c);
        let mut next = Vec::with_capacity(acc.len() * (options.len() + 1));
        for base in &acc {
            next.push(base.clone());
            for opt in &options {
                let mut joined = base.clone();
                joined.extend_from_slice(opt);
                next.push(joined);
            }
        }
        acc = next;
    }
    acc
}

/// `sup_t |dbar(t, a) - dbar(t, b)|` by enumerating every tree, with the
/// difference written as `2 sum_v phi(v) (bbar(v) - abar(v)) t(v) + C`.
pub fn brute_force_sup(
    occ_a: &OccupancyVector,
    occ_b: &OccupancyVector,
    w: &WeightFunction,
    guard: &EnumerationGuard,
) -> Result<(f64, Tree)> {
    if !same_space(occ_a.space(), occ_b.space()) {
        return Err(Error::SpaceMismatch);
    }
    let space = occ_a.space();
    let phi = w.weights(space);
    let constant: f64 = (0..space.node_count()).map(|v| phi[v] * (occ_a.get(v) - occ_b.get(v))).sum();
    let mut best: Option<(f64, Tree)> = None;
    for t in enumerate_trees(space, guard)? {
        let linear: f64 = t.nodes().map(|v| phi[v] * (occ_b.get(v) - occ_a.get(v))).sum();
        let value = (2.0 * linear + constant).abs();
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, t));
        }
    }
    Ok(best.expect("at least the empty tree"))
}

/// Exact minimum of `L(y) + beta P(y)` over every configuration of the
/// field's working space (orphans counted on working-space edges).
pub fn brute_force_min_config(f: &LinearField, beta: f64, guard: &EnumerationGuard) -> Result<(Configuration, f64)> {
    let working = f.working();
    let k = working.len();
    if k > guard.max_config_nodes {
        return Err(Error::GuardExceeded { size: k, limit: guard.max_config_nodes });
    }
    let coef = f.coefficients();
    let parents: Vec<Option<usize>> = (0..k).map(|i| working.local_parent(i)).collect();
    let mut best = (0u64, f64::INFINITY);
    for mask in 0..(1u64 << k) {
        let mut value = 0.0;
        for i in 0..k {
            if mask >> i & 1 == 1 {
                value += coef[i];
                if let Some(p) = parents[i] {
                    if mask >> p & 1 == 0 {
                        value += beta;
                    }
                }
            }
        }
        if value < best.1 {
            best = (mask, value);
        }
    }
    let nodes = working.nodes();
    let y =
        Configuration::from_nodes(working.space().clone(), (0..k).filter(|i| best.0 >> i & 1 == 1).map(|i| nodes[i]))?;
    Ok((y, best.1))
}

/// Minimum of `L` over trees of the working space by enumeration.
pub fn brute_force_min_tree(f: &LinearField, guard: &EnumerationGuard) -> Result<(Tree, f64)> {
    let space = f.space();
    let mut best: Option<(Tree, f64)> = None;
    for t in enumerate_trees(space, guard)? {
        if t.nodes().any(|v| f.working().local(v).is_none()) {
            continue;
        }
        let value: f64 = t.nodes().map(|v| f.coef(v)).sum();
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((t, value));
        }
    }
    Ok(best.expect("at least the empty tree"))
}

/// Minimum of `L` over trees by dynamic programming on the working space:
/// `best(v) = coef(v) + sum_children min(0, best(child))`.
pub fn tree_dp_min(f: &LinearField) -> f64 {
    let working = f.working();
    let mut best = f.coefficients().to_vec();
    // children have larger local indices than their parents
    for i in (1..working.len()).rev() {
        let p = working.local_parent(i).expect("non-root");
        let add = best[i].min(0.0);
        best[p] += add;
    }
    best.first().map_or(0.0, |b| b.min(0.0))
}

/// Capacity of the cut induced by `y`: the sum of positive capacities on
/// edges leaving `(V \ y) ∪ {s}` and entering `y ∪ {b}`.
pub fn cut_capacity(net: &FlowNetwork, y: &Configuration) -> f64 {
    let source_side = |u: i64| u == -1 || (u >= 0 && !y.contains(u as NodeId));
    let sink_side = |v: i64| v == -2 || (v >= 0 && y.contains(v as NodeId));
    net.edge_list().into_iter().filter(|&(u, v, _)| source_side(u) && sink_side(v)).map(|(_, _, c)| c).sum()
}

/// Outcome of [`equivalence_suite`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub instances: usize,
    pub depth: usize,
    pub seed: u64,
    /// Largest `|W_mincut - W_enumerated|`.
    pub max_sup_error: f64,
    /// Largest deviation of `c(y1) - c(y2)` from `H(y1) - H(y2)`.
    pub max_cut_identity_error: f64,
    /// Min-cut minimizers (with `beta = sum phi + 1`) that were not trees.
    pub non_tree_minimizers: usize,
    /// Largest `|L(min-cut tree) - min over enumerated trees|`.
    pub max_tree_min_error: f64,
    pub passed: bool,
}

/// Random binary instances checked against enumeration: the sup statistic,
/// the cut-capacity identity and suffix closure of the min-cut minimizer.
pub fn equivalence_suite(instances: usize, depth: usize, seed: u64, guard: &EnumerationGuard) -> Result<SuiteReport> {
    let space = Arc::new(TreeSpace::binary(depth));
    let trees = enumerate_trees(&space, guard)?;
    if space.node_count() > guard.max_config_nodes {
        return Err(Error::GuardExceeded { size: space.node_count(), limit: guard.max_config_nodes });
    }
    let mut report = SuiteReport {
        instances,
        depth,
        seed,
        max_sup_error: 0.0,
        max_cut_identity_error: 0.0,
        non_tree_minimizers: 0,
        max_tree_min_error: 0.0,
        passed: false,
    };
    for i in 0..instances {
        let mut r = rng::stream(seed, i as u64);
        let theta = if r.gen_bool(0.5) { 0.35 } else { 0.5 };
        let w = WeightFunction::new(theta)?;
        let draw = |r: &mut rng::StreamRng| {
            let k = r.gen_range(1..=10);
            let picked = (0..k).map(|_| trees[r.gen_range(0..trees.len())].clone()).collect();
            TreeSample::new(space.clone(), picked)
        };
        let occ_a = draw(&mut r)?.mean_occupancy()?;
        let occ_b = draw(&mut r)?.mean_occupancy()?;
        let fast = sup_statistic(&occ_a, &occ_b, &w)?.statistic;
        let (slow, _) = brute_force_sup(&occ_a, &occ_b, &w, guard)?;
        report.max_sup_error = report.max_sup_error.max((fast - slow).abs());

        // random field on the full space
        let coef: Vec<f64> = (0..space.node_count()).map(|_| r.gen_range(-1.0..1.0)).collect();
        let field = LinearField::new(WorkingSpace::full(space.clone()), coef)?;
        let beta = beta_for(&w, field.working());
        let cut = max_flow_min_cut(&build_network(&field, beta)?, MaxFlowAlgorithm::default());
        if !cut.is_tree {
            report.non_tree_minimizers += 1;
        }
        let (_, best) = brute_force_min_tree(&field, guard)?;
        report.max_tree_min_error = report.max_tree_min_error.max((field.value(&cut.minimizer) - best).abs());

        let net = build_network(&field, r.gen_range(0.01..3.0))?;
        let random_config = |r: &mut rng::StreamRng| {
            Configuration::from_nodes(space.clone(), (0..space.node_count()).filter(|_| r.gen_bool(0.5)))
        };
        for _ in 0..10 {
            let y1 = random_config(&mut r)?;
            let y2 = random_config(&mut r)?;
            let dc = cut_capacity(&net, &y1) - cut_capacity(&net, &y2);
            let dh = field.hamiltonian(net.beta(), &y1) - field.hamiltonian(net.beta(), &y2);
            report.max_cut_identity_error = report.max_cut_identity_error.max((dc - dh).abs());
        }
    }
    report.passed = report.max_sup_error <= 1e-9
        && report.max_cut_identity_error <= 1e-9
        && report.non_tree_minimizers == 0
        && report.max_tree_min_error <= 1e-9;
    Ok(report)
}
