//! Two samples of Galton–Watson trees, compared by permutation.
//!
//! ```bash
//! cargo run --release --example two_sample_test
//! ```

use treecmp::genmodels::GwSpec;
use treecmp::inference::{permutation_two_sample, GwLaw, TestConfig, TreeLaw};
use treecmp::{rng, TreeSample};

fn sample(law: &GwLaw, n: usize, seed: u64) -> TreeSample {
    let mut r = rng::master(seed);
    TreeSample::new(law.space().clone(), (0..n).map(|_| law.draw(&mut r).unwrap()).collect()).unwrap()
}

fn main() -> treecmp::Result<()> {
    let fair = GwLaw::new(GwSpec::binomial(0.5, 8)?)?;
    let bushy = GwLaw::new(GwSpec::binomial(0.7, 8)?)?;
    let cfg = TestConfig { n_perm: 999, seed: 42, ..TestConfig::default() };

    for (name, other) in [("p=0.5 vs p=0.5", &fair), ("p=0.5 vs p=0.7", &bushy)] {
        let report = permutation_two_sample(&sample(&fair, 40, 1), &sample(other, 40, 2), &cfg)?;
        println!(
            "{name}: W = {:.4} (scaled {:.3}), p = {:.4}, witness has {} nodes",
            report.statistic,
            report.scaled_statistic,
            report.p_value.unwrap(),
            report.witness.len()
        );
    }
    Ok(())
}
