//! Rebuilding a tree law from its node marginals.
//!
//! For a pseudo Galton–Watson law each node's presence depends only on its
//! father, so the marginals determine the law. The second half shows two
//! different laws on the depth-1 space that share marginals, which the
//! expected distance to any tree cannot tell apart.

use std::sync::Arc;

use treecmp::genmodels::{non_identifiability_pair, pseudo_gw_marginals, reconstruct_distribution, TreeShift};
use treecmp::oracle::{enumerate_trees, EnumerationGuard};
use treecmp::{TreeSpace, WeightFunction};

fn show(labels: Vec<String>) -> String {
    let l: Vec<String> = labels.into_iter().map(|s| if s.is_empty() { "λ".into() } else { s }).collect();
    format!("{{{}}}", l.join(","))
}

fn main() -> treecmp::Result<()> {
    let space = Arc::new(TreeSpace::binary(2));
    let mu = pseudo_gw_marginals(0.6, &space)?;
    let mut law = reconstruct_distribution(&mu, TreeShift::Father, space.node_count())?;
    law.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("most probable trees, pseudo GW p=0.6, depth 2:");
    for (t, q) in law.iter().take(8) {
        println!("  {q:.5}  {}", show(t.labels()));
    }
    println!("  total mass {:.12}", law.iter().map(|(_, q)| q).sum::<f64>());

    let (pi, pj) = non_identifiability_pair();
    let w = WeightFunction::new(0.35)?;
    println!("\nexpected distances under two laws with equal marginals:");
    for t in enumerate_trees(pi.space(), &EnumerationGuard::default())? {
        let (a, b) = (pi.expected_distance(&t, &w)?, pj.expected_distance(&t, &w)?);
        println!(
            "  {:<10} {a:.6} {b:.6}  P = {:.3} vs {:.3}",
            show(t.labels()),
            pi.probability(&t) + 0.0,
            pj.probability(&t) + 0.0
        );
    }
    Ok(())
}
