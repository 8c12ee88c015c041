use std::sync::Arc;

use crate::space::{NodeId, TreeSpace, WeightFunction};

/// A suffix-closed subset of a [`TreeSpace`] on which a statistic is
/// evaluated. Local indices follow the global node order, so every parent
/// precedes its children.
#[derive(Debug, Clone)]
pub struct WorkingSpace {
    space: Arc<TreeSpace>,
    nodes: Vec<NodeId>,
    parent: Vec<Option<u32>>,
}

impl WorkingSpace {
    /// The whole space, unpruned.
    pub fn full(space: Arc<TreeSpace>) -> Self {
        let nodes: Vec<NodeId> = (0..space.node_count()).collect();
        let parent = nodes.iter().map(|&v| space.parent_of(v).map(|p| p as u32)).collect();
        Self { space, nodes, parent }
    }

    /// Suffix closure of the given nodes.
    pub fn closure_of(space: Arc<TreeSpace>, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut mark = vec![false; space.node_count()];
        for v in nodes {
            let mut cur = Some(v);
            while let Some(u) = cur {
                if mark[u] {
                    break;
                }
                mark[u] = true;
                cur = space.parent_of(u);
            }
        }
        Self::from_mask(space, &mark)
    }

    /// Builds from a suffix-closed mask over the global nodes.
    pub(crate) fn from_mask(space: Arc<TreeSpace>, mask: &[bool]) -> Self {
        let mut local = vec![u32::MAX; space.node_count()];
        let mut nodes = Vec::new();
        let mut parent = Vec::new();
        for (v, _) in mask.iter().enumerate().filter(|(_, m)| **m) {
            local[v] = nodes.len() as u32;
            nodes.push(v);
            parent.push(space.parent_of(v).map(|p| {
                debug_assert!(local[p] != u32::MAX, "mask is not suffix-closed");
                local[p]
            }));
        }
        Self { space, nodes, parent }
    }

    pub fn space(&self) -> &Arc<TreeSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Global node ids, ascending.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Local index of a global node, if it is in the working space.
    pub fn local(&self, v: NodeId) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }

    pub fn local_parent(&self, i: usize) -> Option<usize> {
        self.parent[i].map(|p| p as usize)
    }

    /// `(parent, child)` local index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().enumerate().filter_map(|(c, p)| p.map(|p| (p as usize, c)))
    }

    pub fn weights(&self, w: &WeightFunction) -> Vec<f64> {
        self.nodes.iter().map(|&v| w.phi(&self.space, v)).collect()
    }

    /// Sum of `phi` over the working nodes.
    pub fn weight_total(&self, w: &WeightFunction) -> f64 {
        self.weights(w).iter().sum()
    }
}
