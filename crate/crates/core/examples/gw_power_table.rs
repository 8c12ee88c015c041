//! Monte-Carlo power of the two-sample test for binomial Galton–Watson trees.
//!
//! Quantiles come from pairs of samples of the fair mixture of the two laws;
//! power is the rejection rate on samples drawn from each law separately.
//! Pass the number of draws as the first argument (default 400).

use treecmp::genmodels::GwSpec;
use treecmp::inference::{power_study, GwLaw};

fn main() -> treecmp::Result<()> {
    let draws: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(400);
    let alphas = [0.01, 0.05, 0.1];
    let null = GwLaw::new(GwSpec::binomial(0.5, 8)?)?;

    println!("{:>5} {:>4} {:>8} {:>8} {:>8}", "n", "p'", "a=0.01", "a=0.05", "a=0.1");
    for n in [31, 51, 125] {
        for p_alt in [0.6, 0.7, 0.8] {
            let alt = GwLaw::new(GwSpec::binomial(p_alt, 8)?)?;
            let (_, power) = power_study(&null, &alt, n, draws, draws, &alphas, 0.35, n as u64)?;
            println!("{n:>5} {p_alt:>4} {:>8.3} {:>8.3} {:>8.3}", power[0], power[1], power[2]);
        }
    }
    Ok(())
}
