//! Context-tree estimation from symbol sequences with the probabilistic
//! suffix tree inclusion rule.
//!
//! A node `a_1 … a_j` (j ≤ L) enters the estimate when it occurs at least
//! `n_min` times and some next symbol `a` has
//! `|log p(a | a_2 … a_j) - log p(a | a_1 … a_j)| >= log r`, with `p` the
//! empirical transition frequencies. All suffixes of included nodes are added,
//! and the root is always present.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::TreeSpace;
use crate::tree::Tree;

/// Sequences over a fixed alphabet, stored as symbol indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceCorpus {
    tokens: Vec<String>,
    sequences: Vec<Vec<u16>>,
}

impl SequenceCorpus {
    pub fn new(tokens: Vec<String>, sequences: Vec<Vec<u16>>) -> Result<Self> {
        let m = tokens.len();
        if m < 2 || m > u16::MAX as usize {
            return Err(Error::InvalidParameter(format!("alphabet size {m} out of range")));
        }
        if let Some(&bad) = sequences.iter().flatten().find(|&&s| s as usize >= m) {
            return Err(Error::UnknownSymbol(bad.to_string()));
        }
        Ok(Self { tokens, sequences })
    }

    /// Parses text sequences. Single-character alphabets read one symbol per
    /// character; otherwise symbols are separated by commas or whitespace.
    /// Whitespace between single-character symbols is ignored.
    pub fn from_strings<S: AsRef<str>>(tokens: Vec<String>, lines: &[S]) -> Result<Self> {
        let single = tokens.iter().all(|t| t.chars().count() == 1);
        let lookup: HashMap<&str, u16> = tokens.iter().enumerate().map(|(i, t)| (t.as_str(), i as u16)).collect();
        let mut sequences = Vec::with_capacity(lines.len());
        for line in lines {
            let line = line.as_ref();
            let mut seq = Vec::with_capacity(line.len());
            if single {
                for ch in line.chars().filter(|c| !c.is_whitespace()) {
                    let mut buf = [0u8; 4];
                    let tok: &str = ch.encode_utf8(&mut buf);
                    seq.push(*lookup.get(tok).ok_or_else(|| Error::UnknownSymbol(tok.to_string()))?);
                }
            } else {
                for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                    seq.push(*lookup.get(tok).ok_or_else(|| Error::UnknownSymbol(tok.to_string()))?);
                }
            }
            sequences.push(seq);
        }
        Self::new(tokens, sequences)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn sequences(&self) -> &[Vec<u16>] {
        &self.sequences
    }

    pub fn total_length(&self) -> usize {
        self.sequences.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_length() == 0
    }

    /// One corpus per sequence, sharing the alphabet.
    pub fn split(&self) -> Vec<SequenceCorpus> {
        self.sequences
            .iter()
            .map(|s| SequenceCorpus { tokens: self.tokens.clone(), sequences: vec![s.clone()] })
            .collect()
    }

    pub fn render(&self, seq: &[u16]) -> String {
        let parts: Vec<&str> = seq.iter().map(|&s| self.tokens[s as usize].as_str()).collect();
        if self.tokens.iter().all(|t| t.chars().count() == 1) {
            parts.concat()
        } else {
            parts.join(",")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PstParams {
    pub max_depth: usize,
    pub r: f64,
    pub n_min: u64,
}

impl PstParams {
    pub fn new(max_depth: usize, r: f64) -> Result<Self> {
        Self { max_depth, r, n_min: 1 }.validated()
    }

    pub fn with_n_min(mut self, n_min: u64) -> Result<Self> {
        self.n_min = n_min;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.max_depth < 1 {
            return Err(Error::InvalidParameter("PST depth must be at least 1".into()));
        }
        if !(self.r > 1.0) {
            return Err(Error::InvalidParameter(format!("threshold r must exceed 1, got {}", self.r)));
        }
        if self.n_min < 1 {
            return Err(Error::InvalidParameter("n_min must be at least 1".into()));
        }
        Ok(self)
    }
}

/// Window counts `N(w)` for every word `w` of length `1..=max_len`.
#[derive(Debug, Clone, Default)]
pub struct CountTable {
    alphabet: usize,
    max_len: usize,
    offsets: Vec<u64>,
    counts: HashMap<u64, u64>,
}

impl CountTable {
    fn key(&self, word: &[usize]) -> Option<u64> {
        if word.len() > self.max_len || word.iter().any(|&s| s >= self.alphabet) {
            return None;
        }
        let within = word.iter().fold(0u64, |acc, &s| acc * self.alphabet as u64 + s as u64);
        Some(self.offsets[word.len()] + within)
    }

    /// `N(word)`; zero for words never seen or longer than the table.
    pub fn get(&self, word: &[usize]) -> u64 {
        self.key(word).and_then(|k| self.counts.get(&k).copied()).unwrap_or(0)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct words with a positive count.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    fn decode(&self, key: u64) -> Vec<usize> {
        let len = self.offsets.partition_point(|&o| o <= key) - 1;
        let mut within = key - self.offsets[len];
        let m = self.alphabet as u64;
        let mut out = vec![0; len];
        for slot in out.iter_mut().rev() {
            *slot = (within % m) as usize;
            within /= m;
        }
        out
    }

    /// Words with a positive count, in no particular order.
    pub fn words(&self) -> impl Iterator<Item = (Vec<usize>, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (self.decode(k), c))
    }
}

/// Counts every window of length `1..=max_len` inside each sequence; windows
/// never span two sequences.
pub fn count_windows(corpus: &SequenceCorpus, max_len: usize) -> CountTable {
    let m = corpus.tokens.len() as u64;
    let mut offsets = Vec::with_capacity(max_len + 2);
    let (mut total, mut pow) = (0u64, 1u64);
    for _ in 0..=max_len + 1 {
        offsets.push(total);
        total = total.saturating_add(pow);
        pow = pow.saturating_mul(m);
    }
    let mut counts = HashMap::new();
    for seq in &corpus.sequences {
        for i in 0..seq.len() {
            let mut within = 0u64;
            for j in 1..=max_len.min(seq.len() - i) {
                within = within * m + seq[i + j - 1] as u64;
                *counts.entry(offsets[j] + within).or_insert(0) += 1;
            }
        }
    }
    CountTable { alphabet: corpus.tokens.len(), max_len, offsets, counts }
}

fn next_symbol_counts(tbl: &CountTable, ctx: &[usize]) -> (Vec<u64>, u64) {
    let mut word = ctx.to_vec();
    word.push(0);
    let mut counts = vec![0; tbl.alphabet];
    for (a, slot) in counts.iter_mut().enumerate() {
        *word.last_mut().unwrap() = a;
        *slot = tbl.get(&word);
    }
    let total = counts.iter().sum();
    (counts, total)
}

/// `N(ctx·a) / sum_b N(ctx·b)`.
pub fn transition_estimate(tbl: &CountTable, ctx: &[usize], a: usize) -> Result<f64> {
    let (counts, total) = next_symbol_counts(tbl, ctx);
    if total == 0 || a >= counts.len() {
        return Err(Error::UndefinedContext(format!("{ctx:?}")));
    }
    Ok(counts[a] as f64 / total as f64)
}

/// Whether the next-symbol laws of a node and its parent differ by the
/// log-ratio threshold for some symbol. A symbol whose probability is zero
/// under exactly one of the two laws counts as an infinite ratio; a symbol
/// absent from both contributes nothing.
pub fn ratio_criterion(child: &[f64], parent: &[f64], log_r: f64) -> bool {
    child.iter().zip(parent).any(|(&c, &p)| match (c > 0.0, p > 0.0) {
        (true, true) => (p.ln() - c.ln()).abs() >= log_r,
        (false, false) => false,
        _ => true,
    })
}

pub fn estimate_context_tree(corpus: &SequenceCorpus, params: &PstParams) -> Result<Tree> {
    if corpus.is_empty() {
        return Err(Error::EmptySample);
    }
    let space = Arc::new(TreeSpace::new(corpus.tokens.clone(), params.max_depth)?);
    let tbl = count_windows(corpus, params.max_depth + 1);
    estimate_from_counts(&tbl, &space, params)
}

/// Runs the inclusion rule on a precomputed table over `space`.
pub fn estimate_from_counts(tbl: &CountTable, space: &Arc<TreeSpace>, params: &PstParams) -> Result<Tree> {
    let log_r = params.r.ln();
    let mut included = vec![crate::space::ROOT];
    let mut words: Vec<(Vec<usize>, u64)> =
        tbl.words().filter(|(w, c)| !w.is_empty() && w.len() <= params.max_depth && *c >= params.n_min).collect();
    words.sort();
    for (word, _) in words {
        let (child_counts, child_total) = next_symbol_counts(tbl, &word);
        if child_total == 0 {
            continue;
        }
        let (parent_counts, parent_total) = next_symbol_counts(tbl, &word[1..]);
        let child: Vec<f64> = child_counts.iter().map(|&c| c as f64 / child_total as f64).collect();
        let parent: Vec<f64> = parent_counts.iter().map(|&c| c as f64 / parent_total as f64).collect();
        if ratio_criterion(&child, &parent, log_r) {
            included.push(space.encode(&word)?);
        }
    }
    Tree::closure(space.clone(), included)
}

/// One context tree per sequence of the corpus, estimated in parallel.
pub fn estimate_each(corpus: &SequenceCorpus, params: &PstParams) -> Result<Vec<Tree>> {
    let space = Arc::new(TreeSpace::new(corpus.tokens.clone(), params.max_depth)?);
    corpus
        .sequences
        .par_iter()
        .map(|seq| {
            if seq.is_empty() {
                return Err(Error::EmptySample);
            }
            let single = SequenceCorpus { tokens: corpus.tokens.clone(), sequences: vec![seq.clone()] };
            let tbl = count_windows(&single, params.max_depth + 1);
            estimate_from_counts(&tbl, &space, params)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(lines: &[&str]) -> SequenceCorpus {
        SequenceCorpus::from_strings(vec!["1".into(), "2".into()], lines).unwrap()
    }

    #[test]
    fn window_counts() {
        let c = binary(&["1121"]);
        let t = count_windows(&c, 2);
        assert_eq!(t.get(&[0]), 3);
        assert_eq!(t.get(&[1]), 1);
        assert_eq!(t.get(&[0, 0]), 1);
        assert_eq!(t.get(&[0, 1]), 1);
        assert_eq!(t.get(&[1, 0]), 1);
        assert_eq!(t.get(&[1, 1]), 0);
        assert_eq!(t.get(&[0, 0, 0]), 0);
        assert!(count_windows(&binary(&[]), 3).is_empty());
    }

    #[test]
    fn windows_do_not_span_sequences() {
        let t = count_windows(&binary(&["12", "21"]), 2);
        assert_eq!(t.get(&[1, 1]), 0);
        assert_eq!(t.get(&[0, 1]), 1);
        assert_eq!(t.get(&[1, 0]), 1);
    }

    #[test]
    fn transitions() {
        let t = count_windows(&binary(&["1121"]), 3);
        assert_eq!(transition_estimate(&t, &[0], 0).unwrap(), 0.5);
        assert_eq!(transition_estimate(&t, &[0], 1).unwrap(), 0.5);
        assert!(matches!(transition_estimate(&t, &[1, 1], 0), Err(Error::UndefinedContext(_))));
        // root context: the empty word followed by a symbol
        assert_eq!(transition_estimate(&t, &[], 0).unwrap(), 0.75);
    }

    #[test]
    fn criterion_zero_handling_and_symmetry() {
        let lr = 1.2f64.ln();
        assert!(ratio_criterion(&[0.0, 1.0], &[0.5, 0.5], lr));
        assert!(!ratio_criterion(&[0.0, 1.0], &[0.0, 1.0], lr));
        assert!(ratio_criterion(&[0.8, 0.2], &[0.5, 0.5], lr));
        assert!(!ratio_criterion(&[0.52, 0.48], &[0.5, 0.5], lr));
        assert_eq!(ratio_criterion(&[0.3, 0.7], &[0.4, 0.6], lr), ratio_criterion(&[0.4, 0.6], &[0.3, 0.7], lr));
    }

    #[test]
    fn infinite_threshold_gives_root() {
        // every window of length 3 appears, so no estimate is zero
        let spec = crate::genmodels::VlmcSpec::four_context(0.5).unwrap();
        let x = crate::genmodels::simulate_vlmc(&spec, 5000, 1).unwrap();
        let c = SequenceCorpus::new(vec!["1".into(), "2".into()], vec![x]).unwrap();
        let t = estimate_context_tree(&c, &PstParams::new(2, 1e300).unwrap()).unwrap();
        assert_eq!(t.labels(), [""]);
    }

    #[test]
    fn deterministic_period_two() {
        // "1212…": after 1 always 2 and vice versa, root law is uniform
        let c = binary(&["12121212121212121212"]);
        let t = estimate_context_tree(&c, &PstParams::new(2, 1.05).unwrap()).unwrap();
        assert!(t.contains(1) && t.contains(2));
        assert!(t.as_configuration().is_tree());
    }

    #[test]
    fn params_validation() {
        assert!(PstParams::new(0, 1.2).is_err());
        assert!(PstParams::new(2, 1.0).is_err());
        assert!(PstParams::new(2, 1.2).unwrap().with_n_min(0).is_err());
        assert!(estimate_context_tree(&binary(&[]), &PstParams::new(2, 1.2).unwrap()).is_err());
    }

    #[test]
    fn multichar_alphabet() {
        let c = SequenceCorpus::from_strings(vec!["ab".into(), "c".into()], &["ab c ab,ab"]).unwrap();
        assert_eq!(c.sequences()[0], [0, 1, 0, 0]);
        assert_eq!(c.render(&c.sequences()[0]), "ab,c,ab,ab");
        assert!(SequenceCorpus::from_strings(vec!["ab".into(), "c".into()], &["x"]).is_err());
    }
}
