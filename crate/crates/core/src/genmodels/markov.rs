//! Node marginals, expected distances and the reconstruction of a tree law
//! from its marginals under Markov-type hypotheses.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use bitvec::vec::BitVec;

use crate::error::{Error, Result};
use crate::space::{NodeId, TreeSpace, WeightFunction, ROOT};
use crate::tree::{distance, same_space, OccupancyVector, Tree};

/// Pseudo Galton–Watson marginals `mu(v) = p^(gen(v) + 1)`.
pub fn pseudo_gw_marginals(p: f64, space: &Arc<TreeSpace>) -> Result<OccupancyVector> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0,1), got {p}")));
    }
    let values = (0..space.node_count()).map(|v| p.powi(space.depth(v) as i32 + 1)).collect();
    OccupancyVector::new(space.clone(), values)
}

/// Classical Galton–Watson marginals for offspring law `(p_0, …, p_m)` with
/// eldest-first child coding: `mu(λ) = 1`, `mu(1v) = (p_1 + … + p_m) mu(v)`,
/// `mu((a+1)v) = (p_{a+1} + … + p_m) / (p_a + … + p_m) · mu(av)`.
pub fn classical_gw_marginals(probs: &[f64], space: &Arc<TreeSpace>) -> Result<OccupancyVector> {
    if probs.len() != space.alphabet_size() + 1 {
        return Err(Error::InvalidParameter(format!(
            "{} offspring probabilities for branching bound {}",
            probs.len(),
            space.alphabet_size()
        )));
    }
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("offspring law is not a probability distribution".into()));
    }
    if !(probs[0] > 0.0) {
        return Err(Error::InvalidParameter("p_0 must be positive".into()));
    }
    OccupancyVector::new(space.clone(), classical_gw_marginals_unchecked(probs, space))
}

pub(crate) fn classical_gw_marginals_unchecked(probs: &[f64], space: &TreeSpace) -> Vec<f64> {
    // tail[k] = p_k + … + p_m
    let mut tail = vec![0.0; probs.len() + 1];
    for k in (0..probs.len()).rev() {
        tail[k] = tail[k + 1] + probs[k];
    }
    let mut mu = vec![0.0; space.node_count()];
    mu[ROOT] = 1.0;
    for v in 1..space.node_count() {
        let first = space.symbols(v)[0];
        let rest = space.parent_of(v).expect("non-root");
        mu[v] = if first == 0 {
            tail[1] * mu[rest]
        } else {
            let elder = space.child(rest, first - 1).expect("same depth");
            if tail[first] > 0.0 {
                (tail[first + 1] / tail[first]).min(1.0) * mu[elder]
            } else {
                0.0
            }
        };
    }
    mu
}

/// `pi d(t) = sum_v phi(v) mu(v) (1 - 2 t(v)) + sum_v phi(v) t(v)`.
pub fn expected_distance(t: &Tree, mu: &OccupancyVector, w: &WeightFunction) -> Result<f64> {
    if !same_space(t.space(), mu.space()) {
        return Err(Error::SpaceMismatch);
    }
    let space = t.space();
    let mut total = 0.0;
    for (v, &m) in mu.values().iter().enumerate() {
        let x = if t.contains(v) { 1.0 } else { 0.0 };
        total += w.phi(space, v) * (m * (1.0 - 2.0 * x) + x);
    }
    Ok(total)
}

/// The same quantity split into a bias and a variance part:
/// `sum_v phi(v) (mu(v) - t(v))^2 + sum_v phi(v) mu(v) (1 - mu(v))`.
pub fn expected_distance_bias_variance(t: &Tree, mu: &OccupancyVector, w: &WeightFunction) -> Result<f64> {
    if !same_space(t.space(), mu.space()) {
        return Err(Error::SpaceMismatch);
    }
    let space = t.space();
    let mut total = 0.0;
    for (v, &m) in mu.values().iter().enumerate() {
        let x = if t.contains(v) { 1.0 } else { 0.0 };
        total += w.phi(space, v) * ((m - x).powi(2) + m * (1.0 - m));
    }
    Ok(total)
}

/// A map sending every non-root node to its father or a brother, such that
/// iterating it reaches the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeShift {
    /// `f(av) = v`.
    Father,
    /// `f(1v) = v`, `f((a+1)v) = av`: the eldest son points to the father and
    /// every other son to its next elder brother.
    EldestBrother,
}

impl TreeShift {
    pub fn apply(self, space: &TreeSpace, v: NodeId) -> Option<NodeId> {
        let parent = space.parent_of(v)?;
        match self {
            TreeShift::Father => Some(parent),
            TreeShift::EldestBrother => {
                let first = space.symbols(v)[0];
                if first == 0 {
                    Some(parent)
                } else {
                    space.child(parent, first - 1)
                }
            }
        }
    }

    /// `f^{-1}(v)` within the space.
    pub fn preimage(self, space: &TreeSpace, v: NodeId) -> Vec<NodeId> {
        match self {
            TreeShift::Father => space.children(v).collect(),
            TreeShift::EldestBrother => {
                let mut out: Vec<NodeId> = space.child(v, 0).into_iter().collect();
                if let Some(parent) = space.parent_of(v) {
                    let first = space.symbols(v)[0];
                    if first + 1 < space.alphabet_size() {
                        out.extend(space.child(parent, first + 1));
                    }
                }
                out
            }
        }
    }
}

/// `P(T(w) = 1 | T(f(w)) = 1) = mu(w) / mu(f(w))`.
pub fn markov_conditional(mu: &OccupancyVector, f: TreeShift, w: NodeId) -> Result<f64> {
    let space = mu.space();
    let v = f.apply(space, w).ok_or(Error::RootHasNoParent)?;
    let (num, den) = (mu.get(w), mu.get(v));
    if num == 0.0 {
        return Ok(0.0);
    }
    if den <= 0.0 {
        return Err(Error::DegenerateRatio(space.label(w)));
    }
    let r = num / den;
    if r > 1.0 + 1e-12 {
        return Err(Error::DegenerateRatio(space.label(w)));
    }
    Ok(r.min(1.0))
}

/// Largest number of trees [`reconstruct_distribution`] will generate.
pub const RECONSTRUCTION_LIMIT: usize = 1_000_000;

/// Tree probabilities determined by the marginals of a law satisfying the
/// Markov hypotheses for the shift `f`.
///
/// Starts from `pi(∅) = 1 - mu(λ)` and
/// `pi({λ}) = mu(λ) prod_{h in f^{-1}(λ)} (1 - r(h))`, with
/// `r(h) = mu(h) / mu(f(h))`, then grows trees one node at a time:
///
/// `pi(t ∪ {h}) = pi(t) · r(h) / (1 - r(h)) · prod_{h' in f^{-1}(h)} (1 - r(h'))`.
///
/// The last product accounts for the nodes that become eligible once `h` is
/// present and must be absent in `t ∪ {h}`; it is empty when `h` has no
/// preimage inside the truncated space.
///
/// Returns every tree with at most `max_nodes` nodes, most probable first.
pub fn reconstruct_distribution(mu: &OccupancyVector, f: TreeShift, max_nodes: usize) -> Result<Vec<(Tree, f64)>> {
    let space = mu.space().clone();
    let n = space.node_count();
    let mu_root = mu.get(ROOT);
    let mut ratio = vec![0.0; n];
    for (w, slot) in ratio.iter_mut().enumerate().skip(1) {
        let parent_mu = mu.get(f.apply(&space, w).expect("non-root"));
        *slot = if parent_mu > 0.0 { markov_conditional(mu, f, w)? } else { 0.0 };
    }
    let absent_factor = |h: NodeId| -> f64 { f.preimage(&space, h).iter().map(|&c| 1.0 - ratio[c]).product() };

    let mut out: Vec<(Tree, f64)> = vec![(Tree::empty(space.clone()), 1.0 - mu_root)];
    if max_nodes == 0 || mu_root <= 0.0 {
        return Ok(out);
    }
    let root = Tree::root_only(space.clone());
    let mut seen: HashMap<BitVec, f64> = HashMap::new();
    let root_prob = mu_root * absent_factor(ROOT);
    seen.insert(root.members().to_bitvec(), root_prob);
    let mut queue = VecDeque::from([(root, root_prob)]);
    while let Some((t, p)) = queue.pop_front() {
        if t.len() < max_nodes {
            for h in 1..n {
                if t.contains(h) || ratio[h] == 0.0 {
                    continue;
                }
                let anchor = f.apply(&space, h).expect("non-root");
                if !t.contains(anchor) {
                    continue;
                }
                let parent = space.parent_of(h).expect("non-root");
                if !t.contains(parent) {
                    continue;
                }
                let mut grown = t.members().to_bitvec();
                grown.set(h, true);
                if seen.contains_key(&grown) {
                    continue;
                }
                if ratio[h] >= 1.0 {
                    return Err(Error::DegenerateRatio(space.label(h)));
                }
                let q = p * ratio[h] / (1.0 - ratio[h]) * absent_factor(h);
                if seen.len() >= RECONSTRUCTION_LIMIT {
                    return Err(Error::GuardExceeded { size: seen.len() + 1, limit: RECONSTRUCTION_LIMIT });
                }
                seen.insert(grown.clone(), q);
                let tree = Tree::from_nodes(space.clone(), grown.iter_ones())?;
                queue.push_back((tree, q));
            }
        }
        out.push((t, p));
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.members().cmp(b.0.members())));
    Ok(out)
}

/// A law on finitely many trees.
#[derive(Debug, Clone)]
pub struct FiniteLaw {
    space: Arc<TreeSpace>,
    atoms: Vec<(Tree, f64)>,
}

impl FiniteLaw {
    pub fn new(space: Arc<TreeSpace>, atoms: Vec<(Tree, f64)>) -> Result<Self> {
        if atoms.iter().any(|(t, _)| !same_space(&space, t.space())) {
            return Err(Error::SpaceMismatch);
        }
        if atoms.iter().any(|(_, p)| !(0.0..=1.0).contains(p))
            || (atoms.iter().map(|a| a.1).sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidParameter("tree probabilities must sum to one".into()));
        }
        Ok(Self { space, atoms })
    }

    pub fn space(&self) -> &Arc<TreeSpace> {
        &self.space
    }

    pub fn atoms(&self) -> &[(Tree, f64)] {
        &self.atoms
    }

    pub fn probability(&self, t: &Tree) -> f64 {
        self.atoms.iter().filter(|(u, _)| u == t).map(|(_, p)| p).sum()
    }

    /// `mu(v) = sum_t pi(t) t(v)`.
    pub fn marginals(&self) -> OccupancyVector {
        let mut values = vec![0.0; self.space.node_count()];
        for (t, p) in &self.atoms {
            for v in t.nodes() {
                values[v] += p;
            }
        }
        OccupancyVector::new(self.space.clone(), values).expect("marginals of a law lie in [0,1]")
    }

    /// `sum_u pi(u) d(u, t)`, by direct summation over the atoms.
    pub fn expected_distance(&self, t: &Tree, w: &WeightFunction) -> Result<f64> {
        let mut total = 0.0;
        for (u, p) in &self.atoms {
            total += p * distance(u, t, w)?;
        }
        Ok(total)
    }
}

/// Two different laws on the binary depth-1 space with identical marginals,
/// hence identical expected distances to every tree.
pub fn non_identifiability_pair() -> (FiniteLaw, FiniteLaw) {
    let space = Arc::new(TreeSpace::binary(1));
    let t = |labels: &[&str]| Tree::from_labels(space.clone(), labels).expect("valid tree");
    let pi = FiniteLaw::new(
        space.clone(),
        vec![
            (t(&[]), 0.5),
            (t(&[""]), 0.125),
            (t(&["", "1"]), 0.125),
            (t(&["", "2"]), 0.125),
            (t(&["", "1", "2"]), 0.125),
        ],
    )
    .expect("valid law");
    let pi_prime = FiniteLaw::new(space.clone(), vec![(t(&[]), 0.5), (t(&[""]), 0.25), (t(&["", "1", "2"]), 0.25)])
        .expect("valid law");
    (pi, pi_prime)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(l: usize) -> Arc<TreeSpace> {
        Arc::new(TreeSpace::binary(l))
    }

    #[test]
    fn pseudo_marginals() {
        let s = sp(2);
        let mu = pseudo_gw_marginals(0.5, &s).unwrap();
        assert_eq!(mu.get(ROOT), 0.5);
        assert_eq!(mu.get(s.parse_label("11").unwrap()), 0.125);
        assert!(pseudo_gw_marginals(1.0, &s).is_err());
        assert!(pseudo_gw_marginals(0.0, &s).is_err());
    }

    /// P(node present) by enumerating offspring counts along the path.
    fn classical_oracle(probs: &[f64], space: &TreeSpace, v: NodeId) -> f64 {
        // a node with first symbol index a exists iff its parent exists and the
        // parent has at least a+1 children
        let mut prob = 1.0;
        let mut cur = v;
        while let Some(parent) = space.parent_of(cur) {
            let a = space.symbols(cur)[0];
            prob *= probs[a + 1..].iter().sum::<f64>();
            cur = parent;
        }
        prob
    }

    #[test]
    fn classical_marginals() {
        let s = sp(3);
        let probs = [0.25, 0.5, 0.25];
        let mu = classical_gw_marginals(&probs, &s).unwrap();
        assert_eq!(mu.get(ROOT), 1.0);
        assert!((mu.get(1) - 0.75).abs() < 1e-15);
        assert!((mu.get(2) - 0.25).abs() < 1e-15);
        for v in 0..s.node_count() {
            assert!((mu.get(v) - classical_oracle(&probs, &s, v)).abs() < 1e-15);
        }
        let none = classical_gw_marginals(&[1.0, 0.0, 0.0], &s).unwrap();
        assert!((1..s.node_count()).all(|v| none.get(v) == 0.0));
        assert!(classical_gw_marginals(&[0.0, 0.5, 0.5], &s).is_err());
        assert!(classical_gw_marginals(&[0.5, 0.5], &s).is_err());
    }

    #[test]
    fn conditionals() {
        let s = sp(3);
        let mu = pseudo_gw_marginals(0.4, &s).unwrap();
        for w in 1..s.node_count() {
            assert!((markov_conditional(&mu, TreeShift::Father, w).unwrap() - 0.4).abs() < 1e-12);
        }
        let classical = classical_gw_marginals(&[0.25, 0.5, 0.25], &s).unwrap();
        let r = markov_conditional(&classical, TreeShift::EldestBrother, 2).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-15);
        let zero = OccupancyVector::new(s.clone(), (0..15).map(|v| if v == 0 { 0.5 } else { 0.0 }).collect()).unwrap();
        assert_eq!(markov_conditional(&zero, TreeShift::Father, 3).unwrap(), 0.0);
        let bad = OccupancyVector::new(s.clone(), (0..15).map(|v| if v == 1 { 0.6 } else { 0.3 }).collect()).unwrap();
        assert!(matches!(markov_conditional(&bad, TreeShift::Father, 1), Err(Error::DegenerateRatio(_))));
    }

    #[test]
    fn shifts_reach_root() {
        let s = Arc::new(TreeSpace::new(["a", "b", "c"], 3).unwrap());
        for f in [TreeShift::Father, TreeShift::EldestBrother] {
            for v in 1..s.node_count() {
                let mut cur = v;
                let mut steps = 0;
                while let Some(next) = f.apply(&s, cur) {
                    assert!(f.preimage(&s, next).contains(&cur));
                    cur = next;
                    steps += 1;
                }
                assert_eq!(cur, ROOT);
                assert!(steps <= 3 * 3);
            }
        }
    }

    #[test]
    fn reconstruction_small() {
        let s1 = sp(1);
        let mu = pseudo_gw_marginals(0.5, &s1).unwrap();
        let law = reconstruct_distribution(&mu, TreeShift::Father, 10).unwrap();
        let prob = |labels: &[&str]| {
            let t = Tree::from_labels(s1.clone(), labels).unwrap();
            law.iter().find(|(u, _)| *u == t).unwrap().1
        };
        assert_eq!(prob(&[]), 0.5);
        assert_eq!(prob(&[""]), 0.125);
        assert_eq!(prob(&["", "1"]), 0.125);
        assert!((law.iter().map(|a| a.1).sum::<f64>() - 1.0).abs() < 1e-12);

        // one level deeper the new empty slots under "1" enter the product
        let s2 = sp(2);
        let mu = pseudo_gw_marginals(0.5, &s2).unwrap();
        let law = reconstruct_distribution(&mu, TreeShift::Father, 10).unwrap();
        let t = Tree::from_labels(s2.clone(), &["", "1"]).unwrap();
        let p = law.iter().find(|(u, _)| *u == t).unwrap().1;
        assert!((p - 0.5f64.powi(5)).abs() < 1e-15);
        assert!((law.iter().map(|a| a.1).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_classical_eldest_brother() {
        let s = sp(2);
        let probs = [0.25, 0.5, 0.25];
        let mu = classical_gw_marginals(&probs, &s).unwrap();
        let law = reconstruct_distribution(&mu, TreeShift::EldestBrother, 7).unwrap();
        assert!((law.iter().map(|a| a.1).sum::<f64>() - 1.0).abs() < 1e-12);
        let p = |labels: &[&str]| {
            let t = Tree::from_labels(s.clone(), labels).unwrap();
            law.iter().find(|(u, _)| *u == t).map_or(0.0, |a| a.1)
        };
        assert_eq!(p(&[]), 0.0);
        assert!((p(&[""]) - 0.25).abs() < 1e-15);
        assert!((p(&["", "1"]) - 0.5 * 0.25).abs() < 1e-15);
        assert!((p(&["", "1", "2"]) - 0.25 * 0.25 * 0.25).abs() < 1e-15);
        assert_eq!(p(&["", "2"]), 0.0);
    }

    #[test]
    fn reconstruction_rejects_degenerate_ratio() {
        let s = sp(1);
        let mu = OccupancyVector::new(s.clone(), vec![0.5, 0.5, 0.2]).unwrap();
        assert!(matches!(reconstruct_distribution(&mu, TreeShift::Father, 3), Err(Error::DegenerateRatio(_))));
    }

    #[test]
    fn point_mass_expected_distance() {
        let s = sp(2);
        let w = WeightFunction::new(0.5).unwrap();
        let u = Tree::from_labels(s.clone(), &["", "2", "12"]).unwrap();
        let t = Tree::from_labels(s.clone(), &["", "1"]).unwrap();
        let mu = OccupancyVector::membership(&u);
        assert!((expected_distance(&t, &mu, &w).unwrap() - distance(&t, &u, &w).unwrap()).abs() < 1e-15);
        let empty = Tree::empty(s.clone());
        let nu = pseudo_gw_marginals(0.5, &s).unwrap();
        let direct: f64 = (0..7).map(|v| w.phi(&s, v) * nu.get(v)).sum();
        assert!((expected_distance(&empty, &nu, &w).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn counterexample_marginals() {
        let (pi, pi2) = non_identifiability_pair();
        let (a, b) = (pi.marginals(), pi2.marginals());
        assert_eq!(a.get(ROOT), 0.5);
        assert_eq!(b.get(ROOT), 0.5);
        assert_eq!(a.get(1), 0.25);
        assert_eq!(b.get(1), 0.25);
        assert_eq!(a, b);
        assert_ne!(
            pi.probability(&Tree::root_only(pi.space().clone())),
            pi2.probability(&Tree::root_only(pi.space().clone()))
        );
    }
}
