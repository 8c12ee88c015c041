//! Galton–Watson type random trees truncated at a maximal depth.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{TreeSpace, ROOT};
use crate::tree::{Configuration, OccupancyVector, Tree};

/// Offspring mechanism of a present node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum GwModel {
    /// Binomial(m, p) offspring.
    Binomial { p: f64 },
    /// Per node, Binomial(m, p1) with probability q, else Binomial(m, p2).
    Mixture { q: f64, p1: f64, p2: f64 },
    /// Each child slot present independently with probability p; the root is
    /// present with probability p as well.
    Pseudo { p: f64 },
}

/// How offspring counts are placed on the `m` child slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChildLabeling {
    /// `k` offspring occupy the first `k` symbols, so a node's `a`-th child
    /// exists only if its elder brothers do (classical Galton–Watson coding).
    #[default]
    EldestFirst,
    /// Each slot is drawn independently; offspring counts are still
    /// Binomial(m, p), but which slots are filled is random.
    IndependentSlots,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GwSpec {
    #[serde(flatten)]
    pub model: GwModel,
    /// Truncation depth; nodes at this depth get no children.
    #[serde(rename = "L")]
    pub max_depth: usize,
    /// Branching bound `m`.
    #[serde(default = "default_arity")]
    pub arity: usize,
    /// Probability that the root is present. Defaults to 1 for binomial and
    /// mixture laws and to `p` for the pseudo law.
    #[serde(default)]
    pub root_prob: Option<f64>,
    /// Defaults to eldest-first for binomial and mixture laws, independent
    /// slots for the pseudo law.
    #[serde(default)]
    pub labeling: Option<ChildLabeling>,
}

fn default_arity() -> usize {
    2
}

impl GwSpec {
    pub fn new(model: GwModel, max_depth: usize) -> Result<Self> {
        let spec = Self { model, max_depth, arity: 2, root_prob: None, labeling: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn binomial(p: f64, max_depth: usize) -> Result<Self> {
        Self::new(GwModel::Binomial { p }, max_depth)
    }

    pub fn mixture(q: f64, p1: f64, p2: f64, max_depth: usize) -> Result<Self> {
        Self::new(GwModel::Mixture { q, p1, p2 }, max_depth)
    }

    pub fn pseudo(p: f64, max_depth: usize) -> Result<Self> {
        Self::new(GwModel::Pseudo { p }, max_depth)
    }

    pub fn with_root_prob(mut self, root_prob: f64) -> Result<Self> {
        self.root_prob = Some(root_prob);
        self.validate()?;
        Ok(self)
    }

    pub fn with_labeling(mut self, labeling: ChildLabeling) -> Self {
        self.labeling = Some(labeling);
        self
    }

    pub fn with_arity(mut self, arity: usize) -> Result<Self> {
        self.arity = arity;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let probs: &[f64] = match &self.model {
            GwModel::Binomial { p } | GwModel::Pseudo { p } => &[*p],
            GwModel::Mixture { q, p1, p2 } => &[*q, *p1, *p2],
        };
        if let Some(bad) = probs.iter().chain(self.root_prob.iter()).find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("probability {bad} outside [0,1]")));
        }
        if self.arity < 2 {
            return Err(Error::InvalidParameter("branching bound must be at least 2".into()));
        }
        Ok(())
    }

    pub fn root_probability(&self) -> f64 {
        self.root_prob.unwrap_or(match self.model {
            GwModel::Pseudo { p } => p,
            _ => 1.0,
        })
    }

    pub fn child_labeling(&self) -> ChildLabeling {
        self.labeling.unwrap_or(match self.model {
            GwModel::Pseudo { .. } => ChildLabeling::IndependentSlots,
            _ => ChildLabeling::EldestFirst,
        })
    }

    /// The tree space these trees live in (binary alphabet for `m = 2`).
    pub fn space(&self) -> Result<TreeSpace> {
        if self.arity == 2 {
            return Ok(TreeSpace::binary(self.max_depth));
        }
        TreeSpace::new((1..=self.arity).map(|i| i.to_string()), self.max_depth)
    }

    /// Offspring count law `(p_0, …, p_m)`.
    pub fn offspring_law(&self) -> Vec<f64> {
        let m = self.arity;
        let binom = |p: f64| -> Vec<f64> {
            (0..=m).map(|k| binomial_coef(m, k) * p.powi(k as i32) * (1.0 - p).powi((m - k) as i32)).collect()
        };
        match self.model {
            GwModel::Binomial { p } | GwModel::Pseudo { p } => binom(p),
            GwModel::Mixture { q, p1, p2 } => {
                binom(p1).iter().zip(binom(p2)).map(|(a, b)| q * a + (1.0 - q) * b).collect()
            }
        }
    }

    /// Node presence probabilities.
    pub fn marginals(&self, space: &Arc<TreeSpace>) -> Result<OccupancyVector> {
        self.check_space(space)?;
        let root = self.root_probability();
        match self.child_labeling() {
            ChildLabeling::EldestFirst => {
                let mut mu = super::markov::classical_gw_marginals_unchecked(&self.offspring_law(), space);
                mu.iter_mut().for_each(|x| *x *= root);
                OccupancyVector::new(space.clone(), mu)
            }
            ChildLabeling::IndependentSlots => {
                let mean_slot = match self.model {
                    GwModel::Binomial { p } | GwModel::Pseudo { p } => p,
                    GwModel::Mixture { q, p1, p2 } => q * p1 + (1.0 - q) * p2,
                };
                let values = (0..space.node_count()).map(|v| root * mean_slot.powi(space.depth(v) as i32)).collect();
                OccupancyVector::new(space.clone(), values)
            }
        }
    }

    fn check_space(&self, space: &TreeSpace) -> Result<()> {
        if space.alphabet_size() != self.arity || space.max_depth() != self.max_depth {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// Draws one tree.
    pub fn sample(&self, space: &Arc<TreeSpace>, rng: &mut impl Rng) -> Result<Tree> {
        self.check_space(space)?;
        let mut y = Configuration::empty(space.clone());
        if !rng.gen_bool(self.root_probability()) {
            return Ok(Tree::empty(space.clone()));
        }
        let labeling = self.child_labeling();
        let mut stack = vec![ROOT];
        y.set(ROOT, true);
        while let Some(v) = stack.pop() {
            if space.depth(v) >= self.max_depth {
                continue;
            }
            let p = match self.model {
                GwModel::Binomial { p } | GwModel::Pseudo { p } => p,
                GwModel::Mixture { q, p1, p2 } => {
                    if rng.gen_bool(q) {
                        p1
                    } else {
                        p2
                    }
                }
            };
            let slots: Vec<bool> = (0..self.arity).map(|_| rng.gen_bool(p)).collect();
            let present: Vec<usize> = match labeling {
                ChildLabeling::IndependentSlots => (0..self.arity).filter(|&a| slots[a]).collect(),
                ChildLabeling::EldestFirst => (0..slots.iter().filter(|&&b| b).count()).collect(),
            };
            for a in present {
                let c = space.child(v, a).expect("depth checked");
                y.set(c, true);
                stack.push(c);
            }
        }
        y.into_tree()
    }
}

fn binomial_coef(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Draws one tree from a fresh generator; see [`GwSpec::sample`].
pub fn sample_gw_tree(spec: &GwSpec, space: &Arc<TreeSpace>, seed: u64) -> Result<Tree> {
    spec.sample(space, &mut crate::rng::master(seed))
}
