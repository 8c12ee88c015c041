//! The truncated full tree `V`: every sequence of length at most `L` over an
//! alphabet of `m` tokens.
//!
//! Nodes are numbered by depth, then lexicographically in token order, so the
//! root is index 0 and depth-`j` nodes occupy a contiguous block. A node
//! labeled `a_1 … a_j` hangs under `a_2 … a_j`: the parent drops the *first*
//! symbol, which is the context-tree convention where the last symbol is the
//! most recent one.

use std::fmt;

use crate::error::{Error, Result};

/// Largest node count handled with dense per-node storage.
pub const MAX_DENSE_NODES: usize = 1 << 22;

pub type NodeId = usize;

pub const ROOT: NodeId = 0;

#[derive(Clone, PartialEq, Eq)]
pub struct TreeSpace {
    tokens: Vec<String>,
    max_depth: usize,
    /// `offsets[j]` is the index of the first node of depth `j`; one extra entry
    /// holds `node_count`.
    offsets: Vec<usize>,
    /// `powers[j] = m^j`.
    powers: Vec<usize>,
    single_char: bool,
}

impl fmt::Debug for TreeSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeSpace")
            .field("tokens", &self.tokens)
            .field("max_depth", &self.max_depth)
            .field("node_count", &self.node_count())
            .finish()
    }
}

impl TreeSpace {
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>, max_depth: usize) -> Result<Self> {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let m = tokens.len();
        if m < 2 {
            return Err(Error::InvalidSpace(format!("alphabet size {m} < 2")));
        }
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() || t.contains(',') {
                return Err(Error::InvalidSpace(format!("bad token {t:?}")));
            }
            if tokens[..i].contains(t) {
                return Err(Error::InvalidSpace(format!("duplicate token {t:?}")));
            }
        }
        let mut powers = Vec::with_capacity(max_depth + 2);
        let mut offsets = Vec::with_capacity(max_depth + 2);
        let mut total = 0usize;
        let mut pow = 1usize;
        for _ in 0..=max_depth {
            offsets.push(total);
            powers.push(pow);
            total = total
                .checked_add(pow)
                .filter(|&t| t <= MAX_DENSE_NODES)
                .ok_or_else(|| Error::InvalidSpace(format!("more than {MAX_DENSE_NODES} nodes")))?;
            pow = pow.saturating_mul(m);
        }
        offsets.push(total);
        powers.push(pow);
        let single_char = tokens.iter().all(|t| t.chars().count() == 1);
        Ok(Self { tokens, max_depth, offsets, powers, single_char })
    }

    /// Binary alphabet `{"1", "2"}`, as used by the synthetic models.
    pub fn binary(max_depth: usize) -> Self {
        Self::new(["1", "2"], max_depth).expect("binary space of sane depth")
    }

    pub fn alphabet_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn node_count(&self) -> usize {
        self.offsets[self.max_depth + 1]
    }

    pub fn level(&self, depth: usize) -> std::ops::Range<NodeId> {
        self.offsets[depth]..self.offsets[depth + 1]
    }

    pub fn token_index(&self, token: &str) -> Option<usize> {
        self.tokens.iter().position(|t| t == token)
    }

    /// Depth (label length) of a node; the root has depth 0.
    pub fn depth(&self, v: NodeId) -> usize {
        debug_assert!(v < self.node_count());
        // offsets is sorted; partition_point finds the first offset > v
        self.offsets.partition_point(|&o| o <= v) - 1
    }

    /// Encodes a sequence of symbol indices (first symbol first).
    pub fn encode(&self, symbols: &[usize]) -> Result<NodeId> {
        let len = symbols.len();
        if len > self.max_depth {
            return Err(Error::LabelTooLong { len, max: self.max_depth });
        }
        let m = self.alphabet_size();
        let mut within = 0usize;
        for &s in symbols {
            if s >= m {
                return Err(Error::UnknownSymbol(s.to_string()));
            }
            within = within * m + s;
        }
        Ok(self.offsets[len] + within)
    }

    /// Symbol indices of a node's label, first symbol first.
    pub fn symbols(&self, v: NodeId) -> Vec<usize> {
        let depth = self.depth(v);
        let m = self.alphabet_size();
        let mut within = v - self.offsets[depth];
        let mut out = vec![0; depth];
        for slot in out.iter_mut().rev() {
            *slot = within % m;
            within /= m;
        }
        out
    }

    /// Parses a textual label: concatenated tokens when all tokens are single
    /// characters, comma-joined tokens otherwise. `""` is the root.
    pub fn parse_label(&self, label: &str) -> Result<NodeId> {
        let mut symbols = Vec::new();
        if label.is_empty() {
            return self.encode(&symbols);
        }
        if self.single_char {
            for ch in label.chars() {
                let mut buf = [0u8; 4];
                let tok: &str = ch.encode_utf8(&mut buf);
                symbols.push(self.token_index(tok).ok_or_else(|| Error::UnknownSymbol(tok.to_string()))?);
            }
        } else {
            for tok in label.split(',') {
                symbols.push(self.token_index(tok).ok_or_else(|| Error::UnknownSymbol(tok.to_string()))?);
            }
        }
        self.encode(&symbols)
    }

    pub fn label(&self, v: NodeId) -> String {
        let parts: Vec<&str> = self.symbols(v).into_iter().map(|s| self.tokens[s].as_str()).collect();
        if self.single_char {
            parts.concat()
        } else {
            parts.join(",")
        }
    }

    /// The node obtained by dropping the first symbol.
    pub fn parent(&self, v: NodeId) -> Result<NodeId> {
        if v >= self.node_count() {
            return Err(Error::NodeOutOfRange(v));
        }
        self.parent_of(v).ok_or(Error::RootHasNoParent)
    }

    /// Infallible variant of [`parent`](Self::parent) for in-range nodes.
    #[inline]
    pub fn parent_of(&self, v: NodeId) -> Option<NodeId> {
        if v == ROOT {
            return None;
        }
        let depth = self.depth(v);
        let within = v - self.offsets[depth];
        Some(self.offsets[depth - 1] + within % self.powers[depth - 1])
    }

    /// The child `a·v` (symbol `a` prepended), if it fits in the space.
    #[inline]
    pub fn child(&self, v: NodeId, a: usize) -> Option<NodeId> {
        let depth = self.depth(v);
        if depth >= self.max_depth {
            return None;
        }
        let within = v - self.offsets[depth];
        Some(self.offsets[depth + 1] + a * self.powers[depth] + within)
    }

    pub fn children(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.alphabet_size()).filter_map(move |a| self.child(v, a))
    }

    /// The same space truncated at a smaller depth.
    pub fn with_depth(&self, max_depth: usize) -> Result<Self> {
        Self::new(self.tokens.clone(), max_depth)
    }
}

/// Node weights `phi(v) = theta^gen(v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFunction {
    theta: f64,
}

impl WeightFunction {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!("theta must lie in (0,1), got {theta}")));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn at_depth(&self, depth: usize) -> f64 {
        self.theta.powi(depth as i32)
    }

    pub fn phi(&self, space: &TreeSpace, v: NodeId) -> f64 {
        self.at_depth(space.depth(v))
    }

    /// Per-node weights for the whole space.
    pub fn weights(&self, space: &TreeSpace) -> Vec<f64> {
        let mut out = Vec::with_capacity(space.node_count());
        for d in 0..=space.max_depth() {
            let w = self.at_depth(d);
            out.extend(space.level(d).map(|_| w));
        }
        out
    }

    /// `sum_{j=0}^{L} m^j theta^j`.
    pub fn total(&self, space: &TreeSpace) -> f64 {
        let x = space.alphabet_size() as f64 * self.theta;
        (0..=space.max_depth()).map(|j| x.powi(j as i32)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codec_examples() {
        let s = TreeSpace::binary(2);
        assert_eq!(s.parse_label("").unwrap(), 0);
        assert_eq!(s.parse_label("2").unwrap(), 2);
        assert_eq!(s.parse_label("12").unwrap(), 4);
        assert_eq!(s.node_count(), 7);
        let order: Vec<String> = (0..7).map(|v| s.label(v)).collect();
        assert_eq!(order, ["", "1", "2", "11", "12", "21", "22"]);
    }

    #[test]
    fn codec_errors() {
        let s = TreeSpace::binary(2);
        assert!(matches!(s.parse_label("3"), Err(Error::UnknownSymbol(_))));
        assert!(matches!(s.parse_label("111"), Err(Error::LabelTooLong { len: 3, max: 2 })));
    }

    #[test]
    fn parents() {
        let s = TreeSpace::binary(3);
        let p = |l: &str| s.label(s.parent(s.parse_label(l).unwrap()).unwrap());
        assert_eq!(p("11"), "1");
        assert_eq!(p("21"), "1");
        assert_eq!(p("2"), "");
        assert_eq!(p("211"), "11");
        assert!(matches!(s.parent(ROOT), Err(Error::RootHasNoParent)));
    }

    #[test]
    fn children_prepend() {
        let s = TreeSpace::binary(2);
        let one = s.parse_label("1").unwrap();
        let kids: Vec<String> = s.children(one).map(|c| s.label(c)).collect();
        assert_eq!(kids, ["11", "21"]);
        for c in s.children(one) {
            assert_eq!(s.parent_of(c), Some(one));
        }
        assert_eq!(s.children(s.parse_label("21").unwrap()).count(), 0);
    }

    #[test]
    fn multichar_tokens() {
        let s = TreeSpace::new(["ab", "c", "de"], 2).unwrap();
        let v = s.parse_label("de,ab").unwrap();
        assert_eq!(s.label(v), "de,ab");
        assert_eq!(s.label(s.parent_of(v).unwrap()), "ab");
        assert_eq!(s.node_count(), 13);
    }

    #[test]
    fn node_count_closed_form() {
        for m in 2..5usize {
            for l in 0..5u32 {
                let toks: Vec<String> = (0..m).map(|i| i.to_string()).collect();
                let s = TreeSpace::new(toks, l as usize).unwrap();
                assert_eq!(s.node_count(), (m.pow(l + 1) - 1) / (m - 1));
            }
        }
    }

    #[test]
    fn rejects_huge_space() {
        let toks: Vec<String> = (0..20).map(|i| format!("t{i}")).collect();
        assert!(TreeSpace::new(toks.clone(), 4).is_ok());
        assert!(TreeSpace::new(toks, 6).is_err());
    }

    #[test]
    fn weight_total_matches_sum() {
        let s = TreeSpace::new(["a", "b", "c"], 4).unwrap();
        for theta in [0.001, 0.35, 0.5, 0.9] {
            let w = WeightFunction::new(theta).unwrap();
            let direct: f64 = w.weights(&s).iter().sum();
            assert!((direct - w.total(&s)).abs() < 1e-12);
        }
        assert!(WeightFunction::new(1.0).is_err());
        assert!(WeightFunction::new(0.0).is_err());
    }

    #[test]
    fn depth_lookup() {
        let s = TreeSpace::binary(3);
        for v in 0..s.node_count() {
            assert_eq!(s.depth(v), s.label(v).len());
            assert_eq!(s.encode(&s.symbols(v)).unwrap(), v);
        }
    }
}
