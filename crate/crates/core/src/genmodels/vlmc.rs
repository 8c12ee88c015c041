use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Burn-in steps discarded before the first emitted symbol.
pub const BURN_IN: usize = 1000;

/// A variable-length Markov chain: a set of contexts (oldest symbol first),
/// each with a next-symbol distribution. The longest context that is a suffix
/// of the history decides the next symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct VlmcSpec {
    tokens: Vec<String>,
    contexts: HashMap<Vec<u16>, Vec<f64>>,
    lengths: Vec<usize>,
    depth: usize,
}

/// Largest number of full-depth histories checked for context coverage.
const COVERAGE_LIMIT: usize = 1 << 22;

impl VlmcSpec {
    pub fn new(tokens: Vec<String>, contexts: Vec<(Vec<u16>, Vec<f64>)>) -> Result<Self> {
        let m = tokens.len();
        if m < 2 {
            return Err(Error::InvalidParameter("VLMC alphabet needs at least two symbols".into()));
        }
        let mut map = HashMap::new();
        for (ctx, dist) in contexts {
            if dist.len() != m {
                return Err(Error::InvalidParameter(format!(
                    "context {ctx:?}: {} probabilities for {m} symbols",
                    dist.len()
                )));
            }
            if dist.iter().any(|p| !(0.0..=1.0).contains(p)) || (dist.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("context {ctx:?}: not a probability distribution")));
            }
            if ctx.iter().any(|&s| s as usize >= m) {
                return Err(Error::UnknownSymbol(format!("{ctx:?}")));
            }
            if map.insert(ctx.clone(), dist).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate context {ctx:?}")));
            }
        }
        let mut lengths: Vec<usize> = map.keys().map(Vec::len).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths.dedup();
        let depth = lengths.first().copied().unwrap_or(0);
        let spec = Self { tokens, contexts: map, lengths, depth };
        spec.check_coverage()?;
        Ok(spec)
    }

    /// The four-context binary chain: the next symbol is "1" with probability
    /// `alpha` after 111 or 122, `1 - alpha` after 211 or 222, and 1/2
    /// otherwise. For `alpha != 0.5` its context tree is
    /// `{λ, 1, 2, 11, 22, 111, 211, 122, 222}`.
    pub fn four_context(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")));
        }
        let hi = vec![alpha, 1.0 - alpha];
        let lo = vec![1.0 - alpha, alpha];
        let half = vec![0.5, 0.5];
        Self::new(
            vec!["1".into(), "2".into()],
            vec![
                (vec![0, 0, 0], hi.clone()),
                (vec![0, 1, 1], hi),
                (vec![1, 0, 0], lo.clone()),
                (vec![1, 1, 1], lo),
                (vec![0, 1], half.clone()),
                (vec![1, 0], half),
            ],
        )
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Longest context length.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn contexts(&self) -> impl Iterator<Item = (&Vec<u16>, &Vec<f64>)> {
        self.contexts.iter()
    }

    /// Distribution of the next symbol after `history` (most recent last).
    pub fn next_distribution(&self, history: &[u16]) -> Option<&[f64]> {
        self.lengths
            .iter()
            .filter(|&&k| k <= history.len())
            .find_map(|&k| self.contexts.get(&history[history.len() - k..]))
            .map(Vec::as_slice)
    }

    fn check_coverage(&self) -> Result<()> {
        let m = self.tokens.len();
        let total = m
            .checked_pow(self.depth as u32)
            .filter(|&t| t <= COVERAGE_LIMIT)
            .ok_or_else(|| Error::InvalidParameter(format!("context depth {} too large to validate", self.depth)))?;
        let mut hist = vec![0u16; self.depth];
        for code in 0..total {
            let mut c = code;
            for slot in hist.iter_mut().rev() {
                *slot = (c % m) as u16;
                c /= m;
            }
            if self.next_distribution(&hist).is_none() {
                return Err(Error::InvalidParameter(format!("no context matches history {hist:?}")));
            }
        }
        Ok(())
    }
}

fn draw(rng: &mut impl Rng, dist: &[f64]) -> u16 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u16;
        }
    }
    (dist.len() - 1) as u16
}

/// Generates `length` symbols after a uniform random start of `depth`
/// symbols and [`BURN_IN`] discarded steps.
pub fn simulate_vlmc(spec: &VlmcSpec, length: usize, seed: u64) -> Result<Vec<u16>> {
    let mut r = rng::master(seed);
    simulate_with(spec, length, &mut r)
}

pub fn simulate_with(spec: &VlmcSpec, length: usize, rng: &mut impl Rng) -> Result<Vec<u16>> {
    if length < 1 {
        return Err(Error::InvalidParameter("sequence length must be at least 1".into()));
    }
    let m = spec.tokens.len();
    let d = spec.depth;
    let mut buf: Vec<u16> = (0..d).map(|_| rng.gen_range(0..m) as u16).collect();
    buf.reserve(BURN_IN + length);
    for _ in 0..BURN_IN + length {
        let lo = buf.len().saturating_sub(d);
        let dist = spec.next_distribution(&buf[lo..]).expect("coverage checked at construction");
        let s = draw(rng, dist);
        buf.push(s);
    }
    Ok(buf.split_off(d + BURN_IN))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn longest_match_wins() {
        let spec = VlmcSpec::four_context(0.8).unwrap();
        assert_eq!(spec.next_distribution(&[1, 0, 0, 0]).unwrap(), [0.8, 0.19999999999999996]);
        assert_eq!(spec.next_distribution(&[0, 1, 0, 0]).unwrap()[0], 0.19999999999999996);
        assert_eq!(spec.next_distribution(&[0, 0, 1]).unwrap(), [0.5, 0.5]);
        assert_eq!(spec.depth(), 3);
    }

    #[test]
    fn rejects_uncovered_histories() {
        let toks = vec!["1".to_string(), "2".to_string()];
        assert!(VlmcSpec::new(toks.clone(), vec![(vec![0], vec![0.5, 0.5])]).is_err());
        assert!(VlmcSpec::new(toks.clone(), vec![(vec![], vec![0.6, 0.5])]).is_err());
        assert!(VlmcSpec::new(toks, vec![(vec![], vec![0.5, 0.5])]).is_ok());
    }

    #[test]
    fn single_symbol_and_determinism() {
        let spec = VlmcSpec::four_context(0.8).unwrap();
        assert_eq!(simulate_vlmc(&spec, 1, 3).unwrap().len(), 1);
        assert_eq!(simulate_vlmc(&spec, 500, 3).unwrap(), simulate_vlmc(&spec, 500, 3).unwrap());
        assert!(simulate_vlmc(&spec, 0, 3).is_err());
    }

    #[test]
    fn fair_coin_frequency() {
        let spec = VlmcSpec::four_context(0.5).unwrap();
        let n = 100_000;
        let x = simulate_vlmc(&spec, n, 11).unwrap();
        let ones = x.iter().filter(|&&s| s == 0).count() as f64 / n as f64;
        let sd = (0.25 / n as f64).sqrt();
        assert!((ones - 0.5).abs() < 3.0 * sd, "{ones}");
    }

    #[test]
    fn transition_after_111() {
        let spec = VlmcSpec::four_context(0.8).unwrap();
        let x = simulate_vlmc(&spec, 100_000, 5).unwrap();
        let (mut hits, mut ones) = (0usize, 0usize);
        for w in x.windows(4) {
            if w[..3] == [0, 0, 0] {
                hits += 1;
                ones += (w[3] == 0) as usize;
            }
        }
        let p = ones as f64 / hits as f64;
        let sd = (0.16 / hits as f64).sqrt();
        assert!((p - 0.8).abs() < 3.0 * sd, "{p} from {hits}");
    }
}
