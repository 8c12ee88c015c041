//! Permutation and Monte-Carlo inference for the sup statistic.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genmodels::{FiniteLaw, GwSpec};
use crate::mincut::{sup_statistic_local, sup_statistic_with, working_space_for, Pruning, SolverOptions, WorkingSpace};
use crate::rng::{self, StreamRng};
use crate::space::{TreeSpace, WeightFunction};
use crate::tree::{same_space, OccupancyVector, Tree, TreeSample};

/// How a permuted pool is divided into two pseudo-samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitRule {
    /// First `floor((n+m)/2)` versus the rest.
    #[default]
    Half,
    /// First `n` versus the remaining `m`.
    PreserveSizes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestConfig {
    pub theta: f64,
    pub n_perm: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    pub split: SplitRule,
    pub solver: SolverOptions,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            theta: 0.35,
            n_perm: 1000,
            alphas: vec![0.01, 0.05, 0.1],
            seed: 0,
            split: SplitRule::Half,
            solver: SolverOptions::default(),
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<WeightFunction> {
        if self.n_perm < 1 {
            return Err(Error::InvalidParameter("at least one replicate is required".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::InvalidParameter(format!("level {a} outside (0,1)")));
        }
        WeightFunction::new(self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: String,
    pub statistic: f64,
    pub scaled_statistic: f64,
    /// Absent for a one-sample statistic without a null sampler.
    pub p_value: Option<f64>,
    /// Null quantiles keyed by `1 - alpha`, e.g. `"0.95"`.
    pub quantiles: BTreeMap<String, f64>,
    /// Rejection at each level, keyed by `alpha`; `p_value <= alpha`.
    pub reject: BTreeMap<String, bool>,
    pub n: usize,
    pub m: Option<usize>,
    pub theta: f64,
    pub depth: usize,
    pub n_perm: usize,
    pub seed: u64,
    pub split: Option<SplitRule>,
    /// Labels of a tree attaining the supremum.
    pub witness: Vec<String>,
    pub elapsed_ms: u64,
}

/// Decimal key for a level, e.g. `0.95` → `"0.95"`, `0.9` → `"0.90"`.
pub fn level_key(x: f64) -> String {
    let two = format!("{x:.2}");
    if (two.parse::<f64>().expect("formatted float") - x).abs() < 1e-9 {
        return two;
    }
    let s = format!("{x:.9}");
    s.trim_end_matches('0').to_string()
}

/// Order statistic at rank `ceil(level * N)` (1-based) of ascending `sorted`.
pub fn order_statistic(sorted: &[f64], level: f64) -> f64 {
    let n = sorted.len();
    let k = ((level * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    sorted[k - 1]
}

/// Add-one p-value. Replicates within a relative `1e-12` of the observed
/// value count as ties: summation order differs between the observed and
/// the permuted occupancies, so exact ties can differ in the last bits.
pub fn permutation_p_value(observed: f64, replicates: &[f64]) -> f64 {
    let tol = 1e-12 * observed.abs().max(1.0);
    let hits = replicates.iter().filter(|&&w| w >= observed - tol).count();
    (1 + hits) as f64 / (replicates.len() + 1) as f64
}

fn finish_report(
    test: &str,
    statistic: f64,
    n: usize,
    m: Option<usize>,
    witness: &Tree,
    mut replicates: Vec<f64>,
    cfg: &TestConfig,
    split: Option<SplitRule>,
    started: Instant,
) -> TestReport {
    let scaled_statistic = match m {
        Some(m) => crate::mincut::scaled_statistic(statistic, n, m),
        None => (n as f64).sqrt() * statistic,
    };
    let mut quantiles = BTreeMap::new();
    let mut reject = BTreeMap::new();
    let p_value = if replicates.is_empty() {
        None
    } else {
        let p = permutation_p_value(statistic, &replicates);
        replicates.sort_by(f64::total_cmp);
        for &a in &cfg.alphas {
            let level = ((1.0 - a) * 1e9).round() / 1e9;
            quantiles.insert(level_key(level), order_statistic(&replicates, level));
            reject.insert(level_key(a), p <= a);
        }
        Some(p)
    };
    TestReport {
        test: test.into(),
        statistic,
        scaled_statistic,
        p_value,
        quantiles,
        reject,
        n,
        m,
        theta: cfg.theta,
        depth: witness.space().max_depth(),
        n_perm: if p_value.is_some() { cfg.n_perm } else { 0 },
        seed: cfg.seed,
        split,
        witness: witness.labels(),
        elapsed_ms: started.elapsed().as_millis() as u64,
    }
}

/// Trees as local-index lists over a working space.
fn localize(working: &WorkingSpace, trees: &[Tree]) -> Vec<Vec<u32>> {
    trees
        .iter()
        .map(|t| t.nodes().map(|v| working.local(v).expect("tree inside working space") as u32).collect())
        .collect()
}

fn local_occupancy(k: usize, trees: &[Vec<u32>], pick: &[usize]) -> Vec<f64> {
    let mut occ = vec![0.0; k];
    for &i in pick {
        for &v in &trees[i] {
            occ[v as usize] += 1.0;
        }
    }
    let n = pick.len() as f64;
    occ.iter_mut().for_each(|x| *x /= n);
    occ
}

/// Two-sample permutation test of equal tree laws.
pub fn permutation_two_sample(a: &TreeSample, b: &TreeSample, cfg: &TestConfig) -> Result<TestReport> {
    let started = Instant::now();
    let w = cfg.validate()?;
    if !same_space(a.space(), b.space()) {
        return Err(Error::SpaceMismatch);
    }
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Err(Error::EmptySample);
    }
    let occ_a = a.mean_occupancy()?;
    let occ_b = b.mean_occupancy()?;
    let obs = sup_statistic_with(&occ_a, &occ_b, &w, cfg.solver)?;

    // every permuted sample lives inside the support of the pool
    let working = working_space_for(&occ_a, &occ_b, Pruning::Support)?;
    let weights = working.weights(&w);
    let pooled: Vec<Tree> = a.trees().iter().chain(b.trees()).cloned().collect();
    let local = localize(&working, &pooled);
    let total = n + m;
    let cut = match cfg.split {
        SplitRule::Half => total / 2,
        SplitRule::PreserveSizes => n,
    };
    let algorithm = cfg.solver.algorithm;
    let replicates: Vec<f64> = (0..cfg.n_perm)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, i as u64);
            let mut idx: Vec<usize> = (0..total).collect();
            idx.shuffle(&mut r);
            let (first, rest) = idx.split_at(cut);
            let oa = local_occupancy(working.len(), &local, first);
            let ob = local_occupancy(working.len(), &local, rest);
            sup_statistic_local(&working, &weights, &oa, &ob, algorithm)
        })
        .collect::<Result<_>>()?;
    Ok(finish_report("two-sample", obs.statistic, n, Some(m), &obs.tree, replicates, cfg, Some(cfg.split), started))
}

/// `sup_t |dbar(t, a) - E_pi' d(t, .)|` with the model term written through
/// the marginals `mu` of `pi'`.
pub fn one_sample_statistic(a: &TreeSample, mu: &OccupancyVector, cfg: &TestConfig) -> Result<f64> {
    let w = cfg.validate()?;
    if !same_space(a.space(), mu.space()) {
        return Err(Error::SpaceMismatch);
    }
    Ok(sup_statistic_with(&a.mean_occupancy()?, mu, &w, cfg.solver)?.statistic)
}

/// One-sample test. With a `null` law (whose marginals should be `mu`), the
/// null distribution is simulated from size-`n` samples of it; without, only
/// the statistic is reported.
pub fn one_sample_test(
    a: &TreeSample,
    mu: &OccupancyVector,
    cfg: &TestConfig,
    null: Option<&dyn TreeLaw>,
) -> Result<TestReport> {
    let started = Instant::now();
    let w = cfg.validate()?;
    if !same_space(a.space(), mu.space()) {
        return Err(Error::SpaceMismatch);
    }
    if a.is_empty() {
        return Err(Error::EmptySample);
    }
    let obs = sup_statistic_with(&a.mean_occupancy()?, mu, &w, cfg.solver)?;
    let n = a.len();
    let replicates = match null {
        None => Vec::new(),
        Some(law) => {
            if !same_space(law.space(), mu.space()) {
                return Err(Error::SpaceMismatch);
            }
            (0..cfg.n_perm)
                .into_par_iter()
                .map(|i| {
                    let mut r = rng::stream(cfg.seed, i as u64);
                    let trees = (0..n).map(|_| law.draw(&mut r)).collect::<Result<Vec<_>>>()?;
                    let occ = occupancy_of(law.space(), &trees)?;
                    Ok(sup_statistic_with(&occ, mu, &w, cfg.solver)?.statistic)
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(finish_report("one-sample", obs.statistic, n, None, &obs.tree, replicates, cfg, None, started))
}

/// A tree law that can be sampled.
pub trait TreeLaw: Sync {
    fn space(&self) -> &Arc<TreeSpace>;
    fn draw(&self, rng: &mut StreamRng) -> Result<Tree>;
}

/// A Galton–Watson type law together with its space.
#[derive(Debug, Clone)]
pub struct GwLaw {
    spec: GwSpec,
    space: Arc<TreeSpace>,
}

impl GwLaw {
    pub fn new(spec: GwSpec) -> Result<Self> {
        spec.validate()?;
        let space = Arc::new(spec.space()?);
        Ok(Self { spec, space })
    }

    /// Uses an existing space so samples from several laws can be compared.
    pub fn on(spec: GwSpec, space: Arc<TreeSpace>) -> Result<Self> {
        if space.alphabet_size() != spec.arity || space.max_depth() != spec.max_depth {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { spec, space })
    }

    pub fn spec(&self) -> &GwSpec {
        &self.spec
    }

    pub fn marginals(&self) -> Result<OccupancyVector> {
        self.spec.marginals(&self.space)
    }
}

impl TreeLaw for GwLaw {
    fn space(&self) -> &Arc<TreeSpace> {
        &self.space
    }

    fn draw(&self, rng: &mut StreamRng) -> Result<Tree> {
        self.spec.sample(&self.space, rng)
    }
}

impl TreeLaw for FiniteLaw {
    fn space(&self) -> &Arc<TreeSpace> {
        FiniteLaw::space(self)
    }

    fn draw(&self, rng: &mut StreamRng) -> Result<Tree> {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (t, p) in self.atoms() {
            acc += p;
            if u < acc {
                return Ok(t.clone());
            }
        }
        Ok(self.atoms().last().expect("law has atoms").0.clone())
    }
}

fn occupancy_of(space: &Arc<TreeSpace>, trees: &[Tree]) -> Result<OccupancyVector> {
    let mut values = vec![0.0; space.node_count()];
    for t in trees {
        for v in t.nodes() {
            values[v] += 1.0;
        }
    }
    let n = trees.len() as f64;
    values.iter_mut().for_each(|x| *x /= n);
    OccupancyVector::new(space.clone(), values)
}

fn sample_w(a: &[Tree], b: &[Tree], space: &Arc<TreeSpace>, w: &WeightFunction) -> Result<f64> {
    let oa = occupancy_of(space, a)?;
    let ob = occupancy_of(space, b)?;
    Ok(sup_statistic_with(&oa, &ob, w, SolverOptions::default())?.statistic)
}

fn check_pair(pi: &dyn TreeLaw, pi_prime: &dyn TreeLaw, n: usize, draws: usize) -> Result<()> {
    if !same_space(pi.space(), pi_prime.space()) {
        return Err(Error::SpaceMismatch);
    }
    if n < 1 || draws < 1 {
        return Err(Error::InvalidParameter("sample size and draw count must be at least 1".into()));
    }
    Ok(())
}

/// Monte-Carlo null quantiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTable {
    pub alphas: Vec<f64>,
    /// `q(1 - alpha)` for each alpha.
    pub quantiles: Vec<f64>,
    /// All simulated statistics, ascending.
    pub null_values: Vec<f64>,
}

impl QuantileTable {
    pub fn quantile(&self, alpha: f64) -> Option<f64> {
        self.alphas.iter().position(|&a| (a - alpha).abs() < 1e-12).map(|i| self.quantiles[i])
    }
}

/// Null quantiles from `draws` pairs of size-`n` samples, each tree drawn
/// from the fair mixture of `pi` and `pi_prime`.
pub fn mc_quantile(
    pi: &dyn TreeLaw,
    pi_prime: &dyn TreeLaw,
    n: usize,
    draws: usize,
    alphas: &[f64],
    theta: f64,
    seed: u64,
) -> Result<QuantileTable> {
    check_pair(pi, pi_prime, n, draws)?;
    let w = WeightFunction::new(theta)?;
    let space = pi.space();
    let mut null_values: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let mixed = |r: &mut StreamRng| {
                if r.gen_bool(0.5) {
                    pi.draw(r)
                } else {
                    pi_prime.draw(r)
                }
            };
            let a = (0..n).map(|_| mixed(&mut r)).collect::<Result<Vec<_>>>()?;
            let b = (0..n).map(|_| mixed(&mut r)).collect::<Result<Vec<_>>>()?;
            sample_w(&a, &b, space, &w)
        })
        .collect::<Result<_>>()?;
    null_values.sort_by(f64::total_cmp);
    let quantiles = alphas.iter().map(|&a| order_statistic(&null_values, 1.0 - a)).collect();
    Ok(QuantileTable { alphas: alphas.to_vec(), quantiles, null_values })
}

/// Fraction of `draws` sample pairs (sample 1 from `pi`, sample 2 from
/// `pi_prime`) with `W > q(1 - alpha)`, per alpha of the table.
pub fn power_estimate(
    pi: &dyn TreeLaw,
    pi_prime: &dyn TreeLaw,
    n: usize,
    draws: usize,
    table: &QuantileTable,
    theta: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    check_pair(pi, pi_prime, n, draws)?;
    let w = WeightFunction::new(theta)?;
    let space = pi.space();
    let stats: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let a = (0..n).map(|_| pi.draw(&mut r)).collect::<Result<Vec<_>>>()?;
            let b = (0..n).map(|_| pi_prime.draw(&mut r)).collect::<Result<Vec<_>>>()?;
            sample_w(&a, &b, space, &w)
        })
        .collect::<Result<_>>()?;
    Ok(table.quantiles.iter().map(|&q| stats.iter().filter(|&&s| s > q).count() as f64 / draws as f64).collect())
}

/// Quantiles then power, on disjoint seed families derived from `seed`.
#[allow(clippy::too_many_arguments)]
pub fn power_study(
    pi: &dyn TreeLaw,
    pi_prime: &dyn TreeLaw,
    n: usize,
    quantile_draws: usize,
    power_draws: usize,
    alphas: &[f64],
    theta: f64,
    seed: u64,
) -> Result<(QuantileTable, Vec<f64>)> {
    let table = mc_quantile(pi, pi_prime, n, quantile_draws, alphas, theta, rng::derive_seed(seed, 1))?;
    let power = power_estimate(pi, pi_prime, n, power_draws, &table, theta, rng::derive_seed(seed, 2))?;
    Ok((table, power))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gw(p: f64, l: usize) -> GwLaw {
        GwLaw::new(GwSpec::binomial(p, l).unwrap()).unwrap()
    }

    fn draw_sample(law: &GwLaw, n: usize, seed: u64) -> TreeSample {
        let mut r = rng::master(seed);
        TreeSample::new(law.space().clone(), (0..n).map(|_| law.draw(&mut r).unwrap()).collect()).unwrap()
    }

    #[test]
    fn keys_and_ranks() {
        assert_eq!(level_key(0.9), "0.90");
        assert_eq!(level_key(0.95), "0.95");
        assert_eq!(level_key(0.999), "0.999");
        assert_eq!(level_key(0.01), "0.01");
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(order_statistic(&v, 0.95), 950.0);
        assert_eq!(order_statistic(&v, 0.99), 990.0);
        assert_eq!(order_statistic(&v, 0.9), 900.0);
        assert_eq!(order_statistic(&[3.0], 0.5), 3.0);
    }

    #[test]
    fn p_value_formula() {
        assert_eq!(permutation_p_value(5.0, &[1.0; 1000]), 1.0 / 1001.0);
        assert_eq!(permutation_p_value(0.0, &[0.0, 0.1, 0.2]), 1.0);
        assert_eq!(permutation_p_value(0.15, &[0.0, 0.1, 0.2]), 0.5);
    }

    #[test]
    fn identical_samples() {
        let law = gw(0.5, 4);
        let a = draw_sample(&law, 20, 1);
        let cfg = TestConfig { n_perm: 200, ..Default::default() };
        let rep = permutation_two_sample(&a, &a, &cfg).unwrap();
        assert_eq!(rep.statistic, 0.0);
        assert_eq!(rep.p_value, Some(1.0));
        assert!(rep.reject.values().all(|r| !r));
        assert_eq!(rep.quantiles.keys().collect::<Vec<_>>(), ["0.90", "0.95", "0.99"]);
    }

    #[test]
    fn separated_samples_reject() {
        let a = draw_sample(&gw(0.2, 5), 40, 1);
        let b = draw_sample(&gw(0.9, 5), 40, 2);
        let cfg = TestConfig { n_perm: 300, ..Default::default() };
        let rep = permutation_two_sample(&a, &b, &cfg).unwrap();
        assert_eq!(rep.p_value, Some(1.0 / 301.0));
        assert!(rep.reject["0.01"]);
        assert!(rep.quantiles["0.99"] < rep.statistic);
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let a = draw_sample(&gw(0.5, 5), 15, 3);
        let b = draw_sample(&gw(0.6, 5), 21, 4);
        let cfg = TestConfig { n_perm: 100, seed: 42, ..Default::default() };
        let mut r1 = permutation_two_sample(&a, &b, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let mut r2 = pool.install(|| permutation_two_sample(&a, &b, &cfg)).unwrap();
        r1.elapsed_ms = 0;
        r2.elapsed_ms = 0;
        assert_eq!(r1, r2);
        let sizes = TestConfig { split: SplitRule::PreserveSizes, ..cfg };
        assert!(permutation_two_sample(&a, &b, &sizes).is_ok());
    }

    #[test]
    fn errors() {
        let law = gw(0.5, 3);
        let a = draw_sample(&law, 5, 1);
        let empty = TreeSample::new(law.space().clone(), vec![]).unwrap();
        assert!(matches!(permutation_two_sample(&a, &empty, &TestConfig::default()), Err(Error::EmptySample)));
        let other = draw_sample(&gw(0.5, 4), 5, 1);
        assert!(matches!(permutation_two_sample(&a, &other, &TestConfig::default()), Err(Error::SpaceMismatch)));
        let bad = TestConfig { n_perm: 0, ..Default::default() };
        assert!(permutation_two_sample(&a, &a, &bad).is_err());
        let bad = TestConfig { theta: 1.0, ..Default::default() };
        assert!(permutation_two_sample(&a, &a, &bad).is_err());
    }

    #[test]
    fn one_sample_examples() {
        let sp = Arc::new(TreeSpace::binary(3));
        let root = Tree::root_only(sp.clone());
        let a = TreeSample::new(sp.clone(), vec![root.clone()]).unwrap();
        let cfg = TestConfig::default();
        assert_eq!(one_sample_statistic(&a, &OccupancyVector::membership(&root), &cfg).unwrap(), 0.0);
        let law = gw(0.5, 3);
        let b = draw_sample(&law, 30, 7);
        assert!(one_sample_statistic(&b, &b.mean_occupancy().unwrap(), &cfg).unwrap().abs() < 1e-12);
        let rep = one_sample_test(&b, &law.marginals().unwrap(), &cfg, None).unwrap();
        assert!(rep.p_value.is_none() && rep.quantiles.is_empty());
        let cfg = TestConfig { n_perm: 99, ..cfg };
        let rep = one_sample_test(&b, &law.marginals().unwrap(), &cfg, Some(&law)).unwrap();
        assert!(rep.p_value.unwrap() > 0.0 && rep.p_value.unwrap() <= 1.0);
    }

    #[test]
    fn quantiles_are_ordered_and_power_bounded() {
        let (pi, pj) = (gw(0.5, 4), gw(0.8, 4));
        let (table, power) = power_study(&pi, &pj, 10, 200, 100, &[0.1, 0.05, 0.01], 0.35, 5).unwrap();
        assert!(table.quantiles.windows(2).all(|q| q[0] <= q[1]));
        assert!(power.windows(2).all(|p| p[0] >= p[1]));
        assert!(power[0] > 0.5);
        assert_eq!(table.quantile(0.05), Some(table.quantiles[1]));
        let again = power_study(&pi, &pj, 10, 200, 100, &[0.1, 0.05, 0.01], 0.35, 5).unwrap();
        assert_eq!(again.1, power);
    }

    #[test]
    fn finite_law_sampling_frequencies() {
        let (pi, _) = crate::genmodels::non_identifiability_pair();
        let mut r = rng::master(3);
        let n = 20_000;
        let empty = (0..n).filter(|_| pi.draw(&mut r).unwrap().is_empty()).count() as f64 / n as f64;
        assert!((empty - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }
}
