//! Cross-checks the min-cut solver against exhaustive enumeration.

use treecmp::oracle::{count_trees, equivalence_suite, EnumerationGuard};
use treecmp::TreeSpace;

fn main() -> treecmp::Result<()> {
    for depth in 0..=3 {
        println!("binary trees of depth <= {depth}: {}", count_trees(&TreeSpace::binary(depth)));
    }
    let report = equivalence_suite(300, 3, 0, &EnumerationGuard::default())?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    if !report.passed {
        std::process::exit(1);
    }
    Ok(())
}
