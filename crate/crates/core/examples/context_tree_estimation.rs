//! Estimating context trees of a variable-length Markov chain.
//!
//! The four-context chain has context tree {λ,1,2,11,22,111,211,122,222}
//! whenever alpha differs from 1/2; at alpha = 1/2 it is i.i.d. fair coin
//! flips and the tree collapses to the root.

use treecmp::genmodels::{simulate_vlmc, VlmcSpec};
use treecmp::pst::{estimate_context_tree, PstParams, SequenceCorpus};

fn main() -> treecmp::Result<()> {
    let params = PstParams::new(3, 1.2)?;
    for alpha in [0.8, 0.65, 0.5] {
        let spec = VlmcSpec::four_context(alpha)?;
        for length in [1_000, 10_000, 100_000] {
            let seq = simulate_vlmc(&spec, length, 7)?;
            let corpus = SequenceCorpus::new(spec.tokens().to_vec(), vec![seq])?;
            let tree = estimate_context_tree(&corpus, &params)?;
            let labels: Vec<String> =
                tree.labels().into_iter().map(|l| if l.is_empty() { "λ".into() } else { l }).collect();
            println!("alpha={alpha:<4} length={length:<6} {{{}}}", labels.join(","));
        }
    }
    Ok(())
}
