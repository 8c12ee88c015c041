//! The `treecmp` command-line tool.
//!
//! Every subcommand echoes its resolved configuration (including the seed):
//! inside JSON outputs and tree files as a `config` record, as a `>config`
//! header in sequence files, and always on stderr as one JSON line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::genmodels::{simulate_vlmc, ChildLabeling, GwModel, GwSpec, VlmcSpec};
use crate::inference::{self, GwLaw, SplitRule, TestConfig, TestReport, TreeLaw};
use crate::io::{self, ClosurePolicy, PowerRow, VlmcFile};
use crate::mincut::{MaxFlowAlgorithm, SolverOptions};
use crate::oracle::{self, EnumerationGuard};
use crate::pst::{self, PstParams, SequenceCorpus};
use crate::rng;
use crate::tree::TreeSample;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_GUARD: i32 = 4;

const PROTEIN: &str = "ACDEFGHIKLMNPQRSTVWY";

#[derive(Debug, Parser)]
#[command(name = "treecmp", version, about = "Compare distributions of rooted trees")]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format for test and power results.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate one context tree per input sequence.
    Estimate(EstimateArgs),
    /// Sample Galton–Watson type trees.
    Simulate(SimulateArgs),
    /// Simulate sequences from a variable-length Markov chain.
    SimulateVlmc(SimulateVlmcArgs),
    /// Two-sample permutation test on two tree files.
    Test2(Test2Args),
    /// One-sample test of a tree file against a model or occupancy file.
    Test1(Test1Args),
    /// Monte-Carlo power table for a model and a list of alternatives.
    Power(PowerArgs),
    /// Check the min-cut solver against brute-force enumeration.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
pub struct AlphabetArgs {
    /// "protein", "binary", comma-separated tokens, or a string of
    /// single-character tokens.
    #[arg(long)]
    pub alphabet: Option<String>,
    /// Use tokens "1", …, "m".
    #[arg(long, conflicts_with = "alphabet")]
    pub alphabet_size: Option<usize>,
}

impl AlphabetArgs {
    fn tokens(&self) -> Result<Vec<String>> {
        let tokens: Vec<String> = match (&self.alphabet, self.alphabet_size) {
            (_, Some(m)) => (1..=m).map(|i| i.to_string()).collect(),
            (None, None) => PROTEIN.chars().map(String::from).collect(),
            (Some(a), None) => match a.as_str() {
                "protein" => PROTEIN.chars().map(String::from).collect(),
                "binary" => vec!["1".into(), "2".into()],
                s if s.contains(',') => s.split(',').map(|t| t.trim().to_string()).collect(),
                s => s.chars().map(String::from).collect(),
            },
        };
        if tokens.len() < 2 {
            return Err(Error::InvalidParameter("alphabet needs at least two symbols".into()));
        }
        Ok(tokens)
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Sequence file: one sequence per line, `>` lines skipped.
    pub input: PathBuf,
    #[command(flatten)]
    pub alphabet: AlphabetArgs,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Ratio threshold of the inclusion rule.
    #[arg(long, default_value_t = 1.05)]
    pub r: f64,
    #[arg(long, default_value_t = 1)]
    pub n_min: u64,
    /// Estimate a single tree from all sequences together.
    #[arg(long)]
    pub pooled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Binomial,
    Mixture,
    Pseudo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Labeling {
    EldestFirst,
    IndependentSlots,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// JSON model spec, e.g. {"model":"binomial","p":0.5,"L":8}.
    #[arg(long, conflicts_with = "model")]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    /// Truncation depth L.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[arg(long, default_value_t = 2)]
    pub arity: usize,
    #[arg(long)]
    pub root_prob: Option<f64>,
    #[arg(long, value_enum)]
    pub labeling: Option<Labeling>,
}

fn need(x: Option<f64>, name: &str) -> Result<f64> {
    x.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required for this model")))
}

impl ModelArgs {
    fn given(&self) -> bool {
        self.spec.is_some() || self.model.is_some()
    }

    fn resolve(&self) -> Result<GwSpec> {
        if let Some(path) = &self.spec {
            return io::read_model_spec(path);
        }
        let model = match self.model {
            None => return Err(Error::InvalidParameter("either --spec or --model is required".into())),
            Some(ModelKind::Binomial) => GwModel::Binomial { p: need(self.p, "p")? },
            Some(ModelKind::Pseudo) => GwModel::Pseudo { p: need(self.p, "p")? },
            Some(ModelKind::Mixture) => {
                GwModel::Mixture { q: need(self.q, "q")?, p1: need(self.p1, "p1")?, p2: need(self.p2, "p2")? }
            }
        };
        let mut spec = GwSpec::new(model, self.depth)?.with_arity(self.arity)?;
        if let Some(r) = self.root_prob {
            spec = spec.with_root_prob(r)?;
        }
        if let Some(l) = self.labeling {
            spec = spec.with_labeling(match l {
                Labeling::EldestFirst => ChildLabeling::EldestFirst,
                Labeling::IndependentSlots => ChildLabeling::IndependentSlots,
            });
        }
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of trees.
    #[arg(long, short = 'n', default_value_t = 50)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct SimulateVlmcArgs {
    /// JSON spec {"contexts":[{"ctx":"111","dist":[0.8,0.2]},…]}.
    #[arg(long, conflicts_with = "alpha")]
    pub spec: Option<PathBuf>,
    /// Use the built-in four-context binary chain with this parameter.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub length: usize,
    /// Number of independent sequences.
    #[arg(long, short = 'n', default_value_t = 1)]
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Split {
    Half,
    PreserveSizes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    AugmentingPath,
    PushRelabel,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Depth decay of the node weights, phi(v) = theta^|v|.
    #[arg(long, default_value_t = 0.35)]
    pub theta: f64,
    /// Number of permutation / Monte-Carlo replicates.
    #[arg(long, default_value_t = 1000)]
    pub perms: usize,
    /// Test levels (repeatable or comma-separated); default 0.01,0.05,0.1.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Algorithm::AugmentingPath)]
    pub algorithm: Algorithm,
    /// Add missing ancestors instead of rejecting non-suffix-closed records.
    #[arg(long)]
    pub auto_close: bool,
}

impl TestArgs {
    fn config(&self, seed: u64, split: SplitRule) -> TestConfig {
        let alphas = if self.alpha.is_empty() { TestConfig::default().alphas } else { self.alpha.clone() };
        let algorithm = match self.algorithm {
            Algorithm::AugmentingPath => MaxFlowAlgorithm::AugmentingPath,
            Algorithm::PushRelabel => MaxFlowAlgorithm::PushRelabel,
        };
        TestConfig {
            theta: self.theta,
            n_perm: self.perms,
            alphas,
            seed,
            split,
            solver: SolverOptions { algorithm, ..Default::default() },
        }
    }

    fn policy(&self) -> ClosurePolicy {
        if self.auto_close {
            ClosurePolicy::AutoClose
        } else {
            ClosurePolicy::Reject
        }
    }
}

#[derive(Debug, Args)]
pub struct Test2Args {
    pub first: PathBuf,
    pub second: PathBuf,
    #[command(flatten)]
    pub test: TestArgs,
    #[arg(long, value_enum, default_value_t = Split::Half)]
    pub split: Split,
}

#[derive(Debug, Args)]
pub struct Test1Args {
    pub sample: PathBuf,
    /// Occupancy file {"space":…,"mu":{"<label>":value,…}}.
    #[arg(long)]
    pub mu: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub test: TestArgs,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Null law.
    #[command(flatten)]
    pub model: ModelArgs,
    /// Alternatives: p' for binomial and pseudo laws, "p1:p2" for mixtures
    /// (q' = q). Repeatable or comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alt: Vec<String>,
    /// Sample sizes.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [31, 51, 125])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub quantile_draws: usize,
    #[arg(long, default_value_t = 1000)]
    pub power_draws: usize,
    #[arg(long, default_value_t = 0.35)]
    pub theta: f64,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 300)]
    pub instances: usize,
    /// Depth of the binary space; enumeration guards apply.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
}

/// Runs the tool with `argv` (program name first), writing results to `out`
/// (unless `--out` is given) and diagnostics to `err`.
pub fn run_with(argv: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = writeln!(err, "{}", json!({ "error": { "kind": "usage", "message": e.to_string().trim() } }));
            return EXIT_USAGE;
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::InvalidParameter(e.to_string())),
        },
        None => dispatch(&cli),
    };
    let written = result.and_then(|(config, text, code)| {
        writeln!(err, "{}", json!({ "config": config }))?;
        emit(cli.out.as_deref(), &text, out)?;
        Ok(code)
    });
    match written {
        Ok(code) => code,
        Err(e) => {
            let (kind, code) = classify(&e);
            let _ = writeln!(err, "{}", json!({ "error": { "kind": kind, "message": e.to_string() } }));
            code
        }
    }
}

pub fn run(argv: impl IntoIterator<Item = OsString>) -> i32 {
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn classify(e: &Error) -> (&'static str, i32) {
    match e.root() {
        Error::GuardExceeded { .. } => ("guard", EXIT_GUARD),
        Error::InvalidParameter(_) => ("usage", EXIT_USAGE),
        _ => ("data", EXIT_DATA),
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Estimate(a) => estimate(a, seed),
        Command::Simulate(a) => simulate(a, seed),
        Command::SimulateVlmc(a) => simulate_vlmc_cmd(a, seed),
        Command::Test2(a) => test2(a, seed, cli.format.unwrap_or(Format::Json)),
        Command::Test1(a) => test1(a, seed, cli.format.unwrap_or(Format::Json)),
        Command::Power(a) => power(a, seed, cli.format.unwrap_or(Format::Csv)),
        Command::OracleCheck(a) => oracle_check(a, seed),
    }
}

type Outcome = (Value, String, i32);

fn estimate(a: &EstimateArgs, seed: u64) -> Result<Outcome> {
    let tokens = a.alphabet.tokens()?;
    let corpus = io::read_sequences(&a.input, tokens.clone())?;
    let params = PstParams::new(a.depth, a.r)?.with_n_min(a.n_min)?;
    let trees = if a.pooled {
        vec![pst::estimate_context_tree(&corpus, &params)?]
    } else {
        pst::estimate_each(&corpus, &params)?
    };
    let space = match trees.first() {
        Some(t) => t.space().clone(),
        None => return Err(Error::EmptySample),
    };
    let sample = TreeSample::new(space, trees)?;
    let config = json!({
        "command": "estimate", "input": a.input, "tokens": tokens, "depth": a.depth,
        "r": a.r, "n_min": a.n_min, "pooled": a.pooled, "seed": seed,
    });
    Ok((config.clone(), io::serialize_tree_lines_with_config(&sample, &config), EXIT_OK))
}

fn simulate(a: &SimulateArgs, seed: u64) -> Result<Outcome> {
    let spec = a.model.resolve()?;
    let law = GwLaw::new(spec)?;
    let trees = (0..a.count).map(|i| law.draw(&mut rng::stream(seed, i as u64))).collect::<Result<Vec<_>>>()?;
    let sample = TreeSample::new(law.space().clone(), trees)?;
    let config = json!({ "command": "simulate", "model": spec, "count": a.count, "seed": seed });
    Ok((config.clone(), io::serialize_tree_lines_with_config(&sample, &config), EXIT_OK))
}

fn simulate_vlmc_cmd(a: &SimulateVlmcArgs, seed: u64) -> Result<Outcome> {
    let spec = match (&a.spec, a.alpha) {
        (Some(path), _) => io::read_vlmc_spec(path)?,
        (None, Some(alpha)) => VlmcSpec::four_context(alpha)?,
        (None, None) => return Err(Error::InvalidParameter("either --spec or --alpha is required".into())),
    };
    let sequences = (0..a.count)
        .map(|i| simulate_vlmc(&spec, a.length, rng::derive_seed(seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let corpus = SequenceCorpus::new(spec.tokens().to_vec(), sequences)?;
    let config = json!({
        "command": "simulate-vlmc", "vlmc": VlmcFile::from_spec(&spec), "length": a.length,
        "count": a.count, "seed": seed,
    });
    let text = format!(">config {config}\n{}", io::render_sequences(&corpus));
    Ok((config, text, EXIT_OK))
}

fn report_text(report: &TestReport, config: &Value, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(report)?;
            v["config"] = config.clone();
            Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header =
                vec!["statistic", "scaled_statistic", "p_value", "n", "m", "theta", "depth", "n_perm", "seed"]
                    .into_iter()
                    .map(String::from)
                    .collect::<Vec<_>>();
            let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
            let mut row = vec![
                report.statistic.to_string(),
                report.scaled_statistic.to_string(),
                opt(report.p_value),
                report.n.to_string(),
                report.m.map_or(String::new(), |m| m.to_string()),
                report.theta.to_string(),
                report.depth.to_string(),
                report.n_perm.to_string(),
                report.seed.to_string(),
            ];
            for (k, q) in &report.quantiles {
                header.push(format!("q{k}"));
                row.push(q.to_string());
            }
            for (k, r) in &report.reject {
                header.push(format!("reject{k}"));
                row.push(r.to_string());
            }
            w.write_record(&header)?;
            w.write_record(&row)?;
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn test_config_json(command: &str, cfg: &TestConfig, extra: Value) -> Value {
    let mut v = json!({
        "command": command, "theta": cfg.theta, "perms": cfg.n_perm, "alpha": cfg.alphas,
        "seed": cfg.seed, "algorithm": cfg.solver.algorithm,
    });
    if let (Value::Object(base), Value::Object(more)) = (&mut v, extra) {
        base.extend(more);
    }
    v
}

fn test2(a: &Test2Args, seed: u64, format: Format) -> Result<Outcome> {
    let split = match a.split {
        Split::Half => SplitRule::Half,
        Split::PreserveSizes => SplitRule::PreserveSizes,
    };
    let cfg = a.test.config(seed, split);
    let first = io::read_tree_file(&a.first, None, a.test.policy())?;
    let second = io::read_tree_file(&a.second, Some(first.space().clone()), a.test.policy())?;
    let report = inference::permutation_two_sample(&first, &second, &cfg)?;
    let config = test_config_json("test2", &cfg, json!({ "first": a.first, "second": a.second, "split": split }));
    Ok((config.clone(), report_text(&report, &config, format)?, EXIT_OK))
}

fn test1(a: &Test1Args, seed: u64, format: Format) -> Result<Outcome> {
    let cfg = a.test.config(seed, SplitRule::Half);
    let sample = io::read_tree_file(&a.sample, None, a.test.policy())?;
    let space = sample.space().clone();
    let (report, source) = match (&a.mu, a.model.given()) {
        (Some(path), false) => {
            let mu = io::read_occupancy(path)?;
            if *mu.space().as_ref() != *space.as_ref() {
                return Err(Error::SpaceMismatch);
            }
            let mu = crate::tree::OccupancyVector::new(space.clone(), mu.values().to_vec())?;
            (inference::one_sample_test(&sample, &mu, &cfg, None)?, json!({ "mu": path }))
        }
        (None, true) => {
            let spec = a.model.resolve()?;
            let law = GwLaw::on(spec, space.clone())?;
            let mu = law.marginals()?;
            (inference::one_sample_test(&sample, &mu, &cfg, Some(&law))?, json!({ "model": spec }))
        }
        _ => return Err(Error::InvalidParameter("give exactly one of --mu or a model (--spec/--model)".into())),
    };
    let mut extra = json!({ "sample": a.sample });
    if let (Value::Object(e), Value::Object(s)) = (&mut extra, source) {
        e.extend(s);
    }
    let config = test_config_json("test1", &cfg, extra);
    Ok((config.clone(), report_text(&report, &config, format)?, EXIT_OK))
}

fn alternative(base: &GwSpec, alt: &str) -> Result<GwSpec> {
    let bad = || Error::InvalidParameter(format!("cannot parse alternative {alt:?}"));
    let model = match base.model {
        GwModel::Binomial { .. } => GwModel::Binomial { p: alt.trim().parse().map_err(|_| bad())? },
        GwModel::Pseudo { .. } => GwModel::Pseudo { p: alt.trim().parse().map_err(|_| bad())? },
        GwModel::Mixture { q, .. } => {
            let (p1, p2) = alt.split_once(':').ok_or_else(bad)?;
            GwModel::Mixture { q, p1: p1.trim().parse().map_err(|_| bad())?, p2: p2.trim().parse().map_err(|_| bad())? }
        }
    };
    let spec = GwSpec { model, ..*base };
    spec.validate()?;
    Ok(spec)
}

fn power(a: &PowerArgs, seed: u64, format: Format) -> Result<Outcome> {
    let base = a.model.resolve()?;
    let alphas = if a.alpha.is_empty() { TestConfig::default().alphas } else { a.alpha.clone() };
    let null = GwLaw::new(base)?;
    let mut rows = Vec::new();
    for (ai, alt) in a.alt.iter().enumerate() {
        let alt_law = GwLaw::on(alternative(&base, alt)?, null.space().clone())?;
        for (ni, &n) in a.sizes.iter().enumerate() {
            let cell_seed = rng::derive_seed(rng::derive_seed(seed, ai as u64), ni as u64);
            let (_, power) = inference::power_study(
                &null,
                &alt_law,
                n,
                a.quantile_draws,
                a.power_draws,
                &alphas,
                a.theta,
                cell_seed,
            )?;
            for (&alpha, &p) in alphas.iter().zip(&power) {
                rows.push(PowerRow { alpha, param: alt.trim().to_string(), n, power: p });
            }
        }
    }
    rows.sort_by(|x, y| x.alpha.total_cmp(&y.alpha).then(x.n.cmp(&y.n)));
    let config = json!({
        "command": "power", "model": base, "alt": a.alt, "n": a.sizes, "quantile_draws": a.quantile_draws,
        "power_draws": a.power_draws, "theta": a.theta, "alpha": alphas, "seed": seed,
    });
    let text = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_power_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&json!({ "config": config, "rows": rows }))?),
    };
    Ok((config, text, EXIT_OK))
}

fn oracle_check(a: &OracleArgs, seed: u64) -> Result<Outcome> {
    let report = oracle::equivalence_suite(a.instances, a.depth, seed, &EnumerationGuard::default())?;
    let config = json!({ "command": "oracle-check", "instances": a.instances, "depth": a.depth, "seed": seed });
    let code = if report.passed { EXIT_OK } else { EXIT_FAILED_CHECK };
    let text = format!("{}\n", serde_json::to_string_pretty(&json!({ "config": config, "report": report }))?);
    Ok((config, text, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("treecmp").chain(args.iter().copied()).map(OsString::from);
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        let (code, _, err) = call(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("\"kind\":\"usage\""));
        let (code, _, _) = call(&["simulate", "--model", "binomial"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn guard_exit_4() {
        let (code, _, err) = call(&["oracle-check", "--depth", "5", "--instances", "1"]);
        assert_eq!(code, EXIT_GUARD);
        assert!(err.contains("\"kind\":\"guard\""));
    }

    #[test]
    fn simulate_is_seeded() {
        let a = call(&["simulate", "--model", "binomial", "--p", "0.5", "--depth", "4", "-n", "5", "--seed", "3"]);
        let b = call(&["simulate", "--model", "binomial", "--p", "0.5", "--depth", "4", "-n", "5", "--seed", "3"]);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
        assert!(a.1.lines().nth(1).unwrap().contains("\"seed\":3"));
        assert!(a.2.contains("\"config\""));
    }

    #[test]
    fn alternative_parsing() {
        let base = GwSpec::mixture(0.5, 0.45, 0.5, 8).unwrap();
        assert_eq!(alternative(&base, "0.1:0.85").unwrap().model, GwModel::Mixture { q: 0.5, p1: 0.1, p2: 0.85 });
        assert!(alternative(&base, "0.1").is_err());
        let bin = GwSpec::binomial(0.5, 8).unwrap();
        assert_eq!(alternative(&bin, "0.7").unwrap().model, GwModel::Binomial { p: 0.7 });
    }
}
