//! Comparing two VLMC families through their estimated context trees.
//!
//! Each sequence yields one estimated tree; the samples of trees are then
//! compared with the permutation test.

use treecmp::genmodels::{simulate_vlmc, VlmcSpec};
use treecmp::inference::{permutation_two_sample, TestConfig};
use treecmp::pst::{estimate_each, PstParams, SequenceCorpus};
use treecmp::rng::derive_seed;
use treecmp::TreeSample;

fn trees(alpha: f64, count: u64, seed: u64, params: &PstParams) -> treecmp::Result<TreeSample> {
    let spec = VlmcSpec::four_context(alpha)?;
    let seqs = (0..count).map(|i| simulate_vlmc(&spec, 2000, derive_seed(seed, i))).collect::<treecmp::Result<_>>()?;
    let corpus = SequenceCorpus::new(spec.tokens().to_vec(), seqs)?;
    let trees = estimate_each(&corpus, params)?;
    TreeSample::new(trees[0].space().clone(), trees)
}

fn main() -> treecmp::Result<()> {
    let params = PstParams::new(3, 1.5)?;
    let cfg = TestConfig { n_perm: 1999, ..TestConfig::default() };
    let a = trees(0.8, 50, 1, &params)?;
    let b = trees(0.65, 50, 2, &params)?;
    let c = trees(0.65, 50, 3, &params)?;

    for (name, x, y) in [("0.8 vs 0.65", &a, &b), ("0.65 vs 0.65", &b, &c)] {
        let r = permutation_two_sample(x, y, &cfg)?;
        println!("{name}: W = {:.4}, p = {:.4}", r.statistic, r.p_value.unwrap());
    }
    Ok(())
}
