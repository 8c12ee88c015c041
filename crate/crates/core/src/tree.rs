//! Configurations, suffix-closed trees, samples of trees and their mean
//! occupancy, plus the weighted symmetric-difference distance between trees.

use std::sync::Arc;

use bitvec::prelude::*;

use crate::error::{Error, Result};
use crate::space::{NodeId, TreeSpace, WeightFunction, ROOT};

pub(crate) fn same_space(a: &Arc<TreeSpace>, b: &Arc<TreeSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// An arbitrary subset of the nodes of a space.
#[derive(Clone, Debug)]
pub struct Configuration {
    space: Arc<TreeSpace>,
    members: BitVec,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.members == other.members
    }
}

impl Eq for Configuration {}

impl Configuration {
    pub fn empty(space: Arc<TreeSpace>) -> Self {
        let members = bitvec![0; space.node_count()];
        Self { space, members }
    }

    pub fn from_nodes(space: Arc<TreeSpace>, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut y = Self::empty(space);
        for v in nodes {
            if v >= y.members.len() {
                return Err(Error::NodeOutOfRange(v));
            }
            y.members.set(v, true);
        }
        Ok(y)
    }

    pub fn from_labels<S: AsRef<str>>(space: Arc<TreeSpace>, labels: &[S]) -> Result<Self> {
        let nodes = labels.iter().map(|l| space.parse_label(l.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::from_nodes(space, nodes)
    }

    pub fn space(&self) -> &Arc<TreeSpace> {
        &self.space
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.get(v).map(|b| *b).unwrap_or(false)
    }

    pub fn set(&mut self, v: NodeId, present: bool) {
        self.members.set(v, present);
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.iter_ones()
    }

    pub fn labels(&self) -> Vec<String> {
        self.nodes().map(|v| self.space.label(v)).collect()
    }

    pub fn members(&self) -> &BitSlice {
        &self.members
    }

    /// First node whose parent is absent, if any.
    pub fn first_orphan(&self) -> Option<NodeId> {
        self.nodes().find(|&v| self.space.parent_of(v).is_some_and(|p| !self.members[p]))
    }

    pub fn is_tree(&self) -> bool {
        self.first_orphan().is_none()
    }

    pub fn into_tree(self) -> Result<Tree> {
        match self.first_orphan() {
            Some(v) => Err(Error::NotSuffixClosed(self.space.label(v))),
            None => Ok(Tree(self)),
        }
    }
}

/// True iff every present non-root node has its parent present.
pub fn is_tree(y: &Configuration) -> bool {
    y.is_tree()
}

/// A suffix-closed configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree(Configuration);

impl Tree {
    pub fn empty(space: Arc<TreeSpace>) -> Self {
        Tree(Configuration::empty(space))
    }

    /// The tree `{λ}`.
    pub fn root_only(space: Arc<TreeSpace>) -> Self {
        let mut y = Configuration::empty(space);
        y.set(ROOT, true);
        Tree(y)
    }

    pub fn full(space: Arc<TreeSpace>) -> Self {
        let n = space.node_count();
        Tree(Configuration { space, members: bitvec![1; n] })
    }

    pub fn from_nodes(space: Arc<TreeSpace>, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        Configuration::from_nodes(space, nodes)?.into_tree()
    }

    pub fn from_labels<S: AsRef<str>>(space: Arc<TreeSpace>, labels: &[S]) -> Result<Self> {
        Configuration::from_labels(space, labels)?.into_tree()
    }

    /// Smallest tree containing the given nodes (adds all suffixes).
    pub fn closure(space: Arc<TreeSpace>, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut y = Configuration::empty(space);
        for v in nodes {
            if v >= y.members.len() {
                return Err(Error::NodeOutOfRange(v));
            }
            let mut cur = Some(v);
            while let Some(u) = cur {
                if y.members[u] {
                    break;
                }
                y.members.set(u, true);
                cur = y.space.parent_of(u);
            }
        }
        Ok(Tree(y))
    }

    pub fn as_configuration(&self) -> &Configuration {
        &self.0
    }

    pub fn into_configuration(self) -> Configuration {
        self.0
    }

    pub fn space(&self) -> &Arc<TreeSpace> {
        &self.0.space
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.nodes()
    }

    pub fn labels(&self) -> Vec<String> {
        self.0.labels()
    }

    pub fn members(&self) -> &BitSlice {
        &self.0.members
    }

    pub fn depth(&self) -> Option<usize> {
        self.0.members.last_one().map(|v| self.space().depth(v))
    }
}

/// `sum_v phi(v) (t(v) - u(v))^2`, i.e. the weight of the symmetric difference.
pub fn distance(t: &Tree, u: &Tree, w: &WeightFunction) -> Result<f64> {
    if !same_space(t.space(), u.space()) {
        return Err(Error::SpaceMismatch);
    }
    let space = t.space();
    let diff = t.members().to_bitvec() ^ u.members();
    Ok(diff.iter_ones().map(|v| w.phi(space, v)).sum())
}

/// An ordered sample of trees sharing one space.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeSample {
    space: Arc<TreeSpace>,
    trees: Vec<Tree>,
}

impl TreeSample {
    pub fn new(space: Arc<TreeSpace>, trees: Vec<Tree>) -> Result<Self> {
        if trees.iter().any(|t| !same_space(&space, t.space())) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { space, trees })
    }

    pub fn space(&self) -> &Arc<TreeSpace> {
        &self.space
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn push(&mut self, t: Tree) -> Result<()> {
        if !same_space(&self.space, t.space()) {
            return Err(Error::SpaceMismatch);
        }
        self.trees.push(t);
        Ok(())
    }

    pub fn mean_occupancy(&self) -> Result<OccupancyVector> {
        mean_occupancy(self)
    }
}

impl std::ops::Index<usize> for TreeSample {
    type Output = Tree;

    fn index(&self, i: usize) -> &Tree {
        &self.trees[i]
    }
}

/// Per-node presence frequencies or probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyVector {
    space: Arc<TreeSpace>,
    values: Vec<f64>,
}

impl OccupancyVector {
    pub fn new(space: Arc<TreeSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.node_count() {
            return Err(Error::InvalidParameter(format!(
                "occupancy has {} entries, space has {} nodes",
                values.len(),
                space.node_count()
            )));
        }
        if let Some(x) = values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("occupancy value {x} outside [0,1]")));
        }
        Ok(Self { space, values })
    }

    pub fn zeros(space: Arc<TreeSpace>) -> Self {
        let values = vec![0.0; space.node_count()];
        Self { space, values }
    }

    /// Point mass on a single tree.
    pub fn membership(t: &Tree) -> Self {
        let values = t.members().iter().map(|b| if *b { 1.0 } else { 0.0 }).collect();
        Self { space: t.space().clone(), values }
    }

    pub fn space(&self) -> &Arc<TreeSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.values[v]
    }

    /// `values(child) <= values(parent) + tol` on every edge.
    pub fn is_monotone(&self, tol: f64) -> bool {
        (1..self.values.len()).all(|v| {
            let p = self.space.parent_of(v).expect("non-root");
            self.values[v] <= self.values[p] + tol
        })
    }

    /// Nodes with nonzero value, sorted.
    pub fn support(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.values.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(v, _)| v)
    }
}

/// `tbar(v) = (1/n) sum_i t_i(v)`.
pub fn mean_occupancy(s: &TreeSample) -> Result<OccupancyVector> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut counts = vec![0u32; s.space.node_count()];
    for t in &s.trees {
        for v in t.nodes() {
            counts[v] += 1;
        }
    }
    let n = s.len() as f64;
    let values = counts.into_iter().map(|c| c as f64 / n).collect();
    Ok(OccupancyVector { space: s.space.clone(), values })
}

/// `(1/n) sum_i d(t_i, t)`, evaluated directly.
pub fn mean_distance(t: &Tree, s: &TreeSample, w: &WeightFunction) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut total = 0.0;
    for ti in s.trees() {
        total += distance(ti, t, w)?;
    }
    Ok(total / s.len() as f64)
}

/// `sum_v phi(v) (tbar(v) - 2 tbar(v) t(v) + t(v))`: the same quantity as
/// [`mean_distance`] written through the occupancy vector. Also equals the
/// expected distance from `t` to a random tree with marginals `occ`.
pub fn mean_distance_from_occupancy(t: &Tree, occ: &OccupancyVector, w: &WeightFunction) -> Result<f64> {
    if !same_space(t.space(), occ.space()) {
        return Err(Error::SpaceMismatch);
    }
    let space = t.space();
    let mut total = 0.0;
    for (v, &mu) in occ.values.iter().enumerate() {
        let x = if t.contains(v) { 1.0 } else { 0.0 };
        total += w.phi(space, v) * (mu - 2.0 * mu * x + x);
    }
    Ok(total)
}
