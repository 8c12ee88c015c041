//! Testing a sample against known node-occupancy marginals.

use treecmp::genmodels::GwSpec;
use treecmp::inference::{one_sample_test, GwLaw, TestConfig, TreeLaw};
use treecmp::{rng, TreeSample};

fn main() -> treecmp::Result<()> {
    let hypothesis = GwLaw::new(GwSpec::pseudo(0.5, 5)?)?;
    let mu = hypothesis.marginals()?;
    let cfg = TestConfig { n_perm: 500, ..TestConfig::default() };

    for p in [0.5, 0.55, 0.65] {
        let truth = GwLaw::new(GwSpec::pseudo(p, 5)?)?;
        let mut r = rng::master(3);
        let trees = (0..60).map(|_| truth.draw(&mut r)).collect::<treecmp::Result<Vec<_>>>()?;
        let sample = TreeSample::new(truth.space().clone(), trees)?;

        let report = one_sample_test(&sample, &mu, &cfg, Some(&hypothesis))?;
        println!("data p={p}: W = {:.4}, simulated p-value = {:.3}", report.statistic, report.p_value.unwrap());
    }
    Ok(())
}
