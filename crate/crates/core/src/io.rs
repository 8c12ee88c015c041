//! File formats: tree samples (JSON lines), sequences (plain text or
//! FASTA-style), model and VLMC specs, occupancy vectors and power tables.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genmodels::{GwSpec, VlmcSpec};
use crate::pst::SequenceCorpus;
use crate::space::TreeSpace;
use crate::tree::{OccupancyVector, Tree, TreeSample};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceHeader {
    pub m: usize,
    pub tokens: Vec<String>,
    #[serde(rename = "L")]
    pub max_depth: usize,
}

impl SpaceHeader {
    pub fn of(space: &TreeSpace) -> Self {
        Self { m: space.alphabet_size(), tokens: space.tokens().to_vec(), max_depth: space.max_depth() }
    }

    pub fn to_space(&self) -> Result<TreeSpace> {
        if self.m != self.tokens.len() {
            return Err(Error::InvalidSpace(format!("m = {} but {} tokens", self.m, self.tokens.len())));
        }
        TreeSpace::new(self.tokens.clone(), self.max_depth)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Record {
    Header {
        space: SpaceHeader,
    },
    // run metadata written by the command-line tool; ignored on input
    Config {
        #[allow(dead_code)]
        config: serde_json::Value,
    },
    Tree {
        nodes: Vec<String>,
    },
}

#[derive(Serialize)]
struct HeaderOut<'a> {
    space: &'a SpaceHeader,
}

#[derive(Serialize)]
struct TreeOut {
    nodes: Vec<String>,
}

/// What to do with a record whose node set is not suffix-closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosurePolicy {
    #[default]
    Reject,
    /// Add all missing ancestors.
    AutoClose,
}

fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| Error::Line { line, source: Box::new(e) }
}

/// Parses a tree sample. The space comes from the optional header line or,
/// failing that, from `space`; when both are present they must agree.
pub fn parse_tree_lines(text: &str, space: Option<Arc<TreeSpace>>, policy: ClosurePolicy) -> Result<TreeSample> {
    let mut space = space;
    let mut trees = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(raw).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        match record {
            Record::Header { space: header } => {
                if seen_header || !trees.is_empty() {
                    return Err(Error::Parse { line, msg: "space header must be the first record".into() });
                }
                seen_header = true;
                let declared = header.to_space().map_err(at_line(line))?;
                match &space {
                    Some(given) if **given != declared => return Err(at_line(line)(Error::SpaceMismatch)),
                    Some(_) => {}
                    None => space = Some(Arc::new(declared)),
                }
            }
            Record::Config { .. } => {}
            Record::Tree { nodes } => {
                let sp = space
                    .as_ref()
                    .ok_or_else(|| Error::Parse { line, msg: "no space header and no space given".into() })?;
                trees.push(parse_record(sp, &nodes, policy).map_err(at_line(line))?);
            }
        }
    }
    let space = space.ok_or_else(|| Error::Parse { line: 0, msg: "no space header and no space given".into() })?;
    TreeSample::new(space, trees)
}

fn parse_record(space: &Arc<TreeSpace>, labels: &[String], policy: ClosurePolicy) -> Result<Tree> {
    let mut seen = HashSet::with_capacity(labels.len());
    let mut nodes = Vec::with_capacity(labels.len());
    for label in labels {
        let v = space.parse_label(label)?;
        if !seen.insert(v) {
            return Err(Error::DuplicateNode(label.clone()));
        }
        nodes.push(v);
    }
    match policy {
        ClosurePolicy::Reject => Tree::from_nodes(space.clone(), nodes),
        ClosurePolicy::AutoClose => Tree::closure(space.clone(), nodes),
    }
}

/// One JSON record per tree, preceded by a space header when `header` is set.
pub fn serialize_tree_lines(sample: &TreeSample, header: bool) -> String {
    serialize_with(sample, header, None)
}

/// Header, then a `{"config": ...}` record, then the trees.
pub fn serialize_tree_lines_with_config(sample: &TreeSample, config: &serde_json::Value) -> String {
    serialize_with(sample, true, Some(config))
}

fn serialize_with(sample: &TreeSample, header: bool, config: Option<&serde_json::Value>) -> String {
    let mut out = String::new();
    if header {
        let h = SpaceHeader::of(sample.space());
        out.push_str(&serde_json::to_string(&HeaderOut { space: &h }).expect("serializable"));
        out.push('\n');
    }
    if let Some(c) = config {
        out.push_str(&serde_json::json!({ "config": c }).to_string());
        out.push('\n');
    }
    for t in sample.trees() {
        out.push_str(&serde_json::to_string(&TreeOut { nodes: t.labels() }).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn read_tree_file(path: &Path, space: Option<Arc<TreeSpace>>, policy: ClosurePolicy) -> Result<TreeSample> {
    parse_tree_lines(&fs::read_to_string(path)?, space, policy)
}

pub fn write_tree_file(path: &Path, sample: &TreeSample) -> Result<()> {
    fs::write(path, serialize_tree_lines(sample, true))?;
    Ok(())
}

/// One sequence per line; blank lines and lines starting with `>` are skipped.
pub fn parse_sequences(text: &str, tokens: Vec<String>) -> Result<SequenceCorpus> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('>')).collect();
    SequenceCorpus::from_strings(tokens, &lines)
}

pub fn render_sequences(corpus: &SequenceCorpus) -> String {
    let mut out = String::new();
    for seq in corpus.sequences() {
        out.push_str(&corpus.render(seq));
        out.push('\n');
    }
    out
}

pub fn read_sequences(path: &Path, tokens: Vec<String>) -> Result<SequenceCorpus> {
    parse_sequences(&fs::read_to_string(path)?, tokens)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VlmcFile {
    /// Defaults to `"1", …, "m"` with `m` the distribution length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<String>>,
    pub contexts: Vec<ContextEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextEntry {
    /// Oldest symbol first.
    pub ctx: String,
    pub dist: Vec<f64>,
}

impl VlmcFile {
    pub fn to_spec(&self) -> Result<VlmcSpec> {
        let tokens = match &self.tokens {
            Some(t) => t.clone(),
            None => {
                let m = self.contexts.first().map_or(0, |c| c.dist.len());
                (1..=m).map(|i| i.to_string()).collect()
            }
        };
        let single = tokens.iter().all(|t| t.chars().count() == 1);
        let mut contexts = Vec::with_capacity(self.contexts.len());
        for entry in &self.contexts {
            let parts: Vec<String> = if entry.ctx.is_empty() {
                Vec::new()
            } else if single {
                entry.ctx.chars().map(String::from).collect()
            } else {
                entry.ctx.split(',').map(String::from).collect()
            };
            let ctx = parts
                .iter()
                .map(|p| {
                    tokens.iter().position(|t| t == p).map(|i| i as u16).ok_or_else(|| Error::UnknownSymbol(p.clone()))
                })
                .collect::<Result<Vec<u16>>>()?;
            contexts.push((ctx, entry.dist.clone()));
        }
        VlmcSpec::new(tokens, contexts)
    }

    pub fn from_spec(spec: &VlmcSpec) -> Self {
        let single = spec.tokens().iter().all(|t| t.chars().count() == 1);
        let sep = if single { "" } else { "," };
        let mut contexts: Vec<ContextEntry> = spec
            .contexts()
            .map(|(ctx, dist)| ContextEntry {
                ctx: ctx.iter().map(|&s| spec.tokens()[s as usize].as_str()).collect::<Vec<_>>().join(sep),
                dist: dist.clone(),
            })
            .collect();
        contexts.sort_by(|a, b| (a.ctx.len(), &a.ctx).cmp(&(b.ctx.len(), &b.ctx)));
        Self { tokens: Some(spec.tokens().to_vec()), contexts }
    }
}

pub fn read_vlmc_spec(path: &Path) -> Result<VlmcSpec> {
    let file: VlmcFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.to_spec()
}

pub fn read_model_spec(path: &Path) -> Result<GwSpec> {
    let spec: GwSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
    spec.validate()?;
    Ok(spec)
}

/// Occupancy file: `{"space": {...}, "mu": {"<label>": value, ...}}`;
/// unlisted nodes are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OccupancyFile {
    pub space: SpaceHeader,
    pub mu: BTreeMap<String, f64>,
}

impl OccupancyFile {
    pub fn from_occupancy(occ: &OccupancyVector) -> Self {
        let space = occ.space();
        let mu = occ.support().map(|v| (space.label(v), occ.get(v))).collect();
        Self { space: SpaceHeader::of(space), mu }
    }

    pub fn to_occupancy(&self) -> Result<OccupancyVector> {
        let space = Arc::new(self.space.to_space()?);
        let mut values = vec![0.0; space.node_count()];
        for (label, &x) in &self.mu {
            values[space.parse_label(label)?] = x;
        }
        OccupancyVector::new(space, values)
    }
}

pub fn read_occupancy(path: &Path) -> Result<OccupancyVector> {
    let file: OccupancyFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.to_occupancy()
}

/// One cell of a power table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub alpha: f64,
    /// Alternative parameter, e.g. `p'`.
    pub param: String,
    pub n: usize,
    pub power: f64,
}

pub fn write_power_csv<W: std::io::Write>(rows: &[PowerRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_power_csv<R: std::io::Read>(input: R) -> Result<Vec<PowerRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(l: usize) -> Arc<TreeSpace> {
        Arc::new(TreeSpace::binary(l))
    }

    #[test]
    fn parse_examples() {
        let s = parse_tree_lines("{\"nodes\":[\"\",\"1\"]}\n{\"nodes\":[]}\n", Some(bin(2)), ClosurePolicy::Reject)
            .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].labels(), ["", "1"]);
        assert!(s[1].is_empty());
        let orphan = parse_tree_lines("{\"nodes\":[\"1\"]}", Some(bin(2)), ClosurePolicy::Reject).unwrap_err();
        assert!(matches!(orphan, Error::Line { line: 1, .. }));
        assert!(matches!(orphan.root(), Error::NotSuffixClosed(_)));
        let closed = parse_tree_lines("{\"nodes\":[\"21\"]}", Some(bin(2)), ClosurePolicy::AutoClose).unwrap();
        assert_eq!(closed[0].labels(), ["", "1", "21"]);
    }

    #[test]
    fn parse_errors() {
        let dup = parse_tree_lines("\n{\"nodes\":[\"\",\"\"]}", Some(bin(2)), ClosurePolicy::Reject).unwrap_err();
        assert!(matches!(dup, Error::Line { line: 2, .. }));
        assert!(matches!(dup.root(), Error::DuplicateNode(_)));
        let bad = parse_tree_lines("{\"nodes\":[\"3\"]}", Some(bin(2)), ClosurePolicy::Reject).unwrap_err();
        assert!(matches!(bad.root(), Error::UnknownSymbol(_)));
        let long = parse_tree_lines("{\"nodes\":[\"111\"]}", Some(bin(2)), ClosurePolicy::AutoClose).unwrap_err();
        assert!(matches!(long.root(), Error::LabelTooLong { .. }));
        assert!(matches!(
            parse_tree_lines("{nodes}", Some(bin(2)), ClosurePolicy::Reject),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_tree_lines("{\"nodes\":[]}", None, ClosurePolicy::Reject).is_err());
    }

    #[test]
    fn header_round_trip() {
        let sp = Arc::new(TreeSpace::new(["A", "C", "G"], 3).unwrap());
        let trees = vec![
            Tree::from_labels(sp.clone(), &["", "A", "CA", "GCA"]).unwrap(),
            Tree::empty(sp.clone()),
            Tree::full(sp.clone()),
        ];
        let sample = TreeSample::new(sp.clone(), trees).unwrap();
        let text = serialize_tree_lines(&sample, true);
        assert!(text.starts_with("{\"space\":{\"m\":3,\"tokens\":[\"A\",\"C\",\"G\"],\"L\":3}}\n"));
        let back = parse_tree_lines(&text, None, ClosurePolicy::Reject).unwrap();
        assert_eq!(back.trees(), sample.trees());
        assert!(matches!(
            parse_tree_lines(&text, Some(bin(3)), ClosurePolicy::Reject).unwrap_err().root(),
            Error::SpaceMismatch
        ));
        let with_config = serialize_tree_lines_with_config(&sample, &serde_json::json!({"seed": 3}));
        assert_eq!(parse_tree_lines(&with_config, None, ClosurePolicy::Reject).unwrap().trees(), sample.trees());
    }

    #[test]
    fn multi_char_tokens_use_commas() {
        let sp = Arc::new(TreeSpace::new(["ab", "cd"], 2).unwrap());
        let s = parse_tree_lines("{\"nodes\":[\"\",\"cd\",\"ab,cd\"]}", Some(sp), ClosurePolicy::Reject).unwrap();
        assert_eq!(serialize_tree_lines(&s, false), "{\"nodes\":[\"\",\"cd\",\"ab,cd\"]}\n");
    }

    #[test]
    fn fasta_style_sequences() {
        let c = parse_sequences(">one\n1211\n\n>two\n22 1\n", vec!["1".into(), "2".into()]).unwrap();
        assert_eq!(c.sequences(), [vec![0, 1, 0, 0], vec![1, 1, 0]]);
        assert_eq!(render_sequences(&c), "1211\n221\n");
        assert!(parse_sequences("123\n", vec!["1".into(), "2".into()]).is_err());
    }

    #[test]
    fn vlmc_file_matches_builtin() {
        let json = r#"{"contexts":[
            {"ctx":"111","dist":[0.8,0.2]},{"ctx":"122","dist":[0.8,0.2]},
            {"ctx":"211","dist":[0.2,0.8]},{"ctx":"222","dist":[0.2,0.8]},
            {"ctx":"12","dist":[0.5,0.5]},{"ctx":"21","dist":[0.5,0.5]}]}"#;
        let file: VlmcFile = serde_json::from_str(json).unwrap();
        let spec = file.to_spec().unwrap();
        let builtin = VlmcSpec::four_context(0.8).unwrap();
        for h in [[0u16, 0, 0], [1, 0, 0], [0, 1, 1], [0, 0, 1]] {
            let a = spec.next_distribution(&h).unwrap();
            let b = builtin.next_distribution(&h).unwrap();
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12));
        }
        let again = VlmcFile::from_spec(&spec).to_spec().unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn occupancy_and_power_round_trip() {
        let sp = bin(2);
        let occ = OccupancyVector::new(sp, vec![1.0, 0.5, 0.25, 0.0, 0.0, 0.1, 0.0]).unwrap();
        let json = serde_json::to_string(&OccupancyFile::from_occupancy(&occ)).unwrap();
        let back: OccupancyFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_occupancy().unwrap().values(), occ.values());

        let rows = vec![PowerRow { alpha: 0.05, param: "0.6".into(), n: 31, power: 0.25 }];
        let mut buf = Vec::new();
        write_power_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "alpha,param,n,power\n0.05,0.6,31,0.25\n");
        assert_eq!(read_power_csv(buf.as_slice()).unwrap(), rows);
    }
}
