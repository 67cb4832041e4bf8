use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DirectedGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "valid" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(Error::Value(format!("split must be train|valid|test, got {other:?}"))),
        }
    }
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

/// Binary default prediction or multiclass node classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    #[default]
    Binary,
    Multiclass,
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Task::Binary),
            "multiclass" => Ok(Task::Multiclass),
            other => Err(Error::Value(format!("task must be binary|multiclass, got {other:?}"))),
        }
    }
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Binary => "binary",
            Task::Multiclass => "multiclass",
        }
    }
}

/// Partial node labels with a train/valid/test tag per labeled node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<Option<usize>>,
    splits: Vec<Option<Split>>,
    num_classes: usize,
}

impl LabelSet {
    pub fn empty(n: usize) -> Self {
        Self {
            labels: vec![None; n],
            splits: vec![None; n],
            num_classes: 2,
        }
    }

    /// Builds from `(node, label, split)` triples.
    pub fn from_entries(n: usize, task: Task, entries: &[(usize, usize, Split)]) -> Result<Self> {
        let mut set = Self::empty(n);
        for &(u, y, split) in entries {
            set.insert(u, y, split, task)?;
        }
        if task == Task::Multiclass {
            set.num_classes = set.labels.iter().flatten().max().map_or(2, |&m| (m + 1).max(2));
        }
        Ok(set)
    }

    fn insert(&mut self, u: usize, y: usize, split: Split, task: Task) -> Result<()> {
        if u >= self.labels.len() {
            return Err(Error::Range {
                what: "labeled node",
                value: u,
                expected: format!("< {}", self.labels.len()),
            });
        }
        if task == Task::Binary && y > 1 {
            return Err(Error::Value(format!("label must be 0 or 1, got {y}")));
        }
        if self.labels[u].is_some() {
            return Err(Error::Value(format!("node {u} labeled twice")));
        }
        self.labels[u] = Some(y);
        self.splits[u] = Some(split);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Writes `id<TAB>label<TAB>split` lines in node order.
    pub fn write_tsv<W: std::io::Write>(&self, mut out: W, ids: &[String]) -> std::io::Result<()> {
        for (u, id) in ids.iter().enumerate() {
            if let (Some(y), Some(split)) = (self.labels[u], self.splits[u]) {
                writeln!(out, "{id}\t{y}\t{}", split.as_str())?;
            }
        }
        out.flush()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn label(&self, u: usize) -> Option<usize> {
        self.labels[u]
    }

    pub fn split(&self, u: usize) -> Option<Split> {
        self.splits[u]
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.labeled_count() == 0
    }

    /// Nodes in `split`, ascending.
    pub fn nodes(&self, split: Split) -> Vec<usize> {
        (0..self.labels.len()).filter(|&u| self.splits[u] == Some(split)).collect()
    }
}

/// Reads `id<TAB>label<TAB>split` lines; `#` and blank lines are skipped.
pub fn load_labels(path: impl AsRef<Path>, graph: &DirectedGraph, task: Task) -> Result<LabelSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, path, graph, task)
}

pub fn parse_labels(text: &str, origin: &Path, graph: &DirectedGraph, task: Task) -> Result<LabelSet> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, label, split] = fields[..] else {
            return Err(at(format!("expected \"id<TAB>label<TAB>split\", got {line:?}")));
        };
        let u = graph
            .index_of(id)
            .ok_or_else(|| at(format!("unknown node id {id:?}")))?;
        let y: usize = label
            .trim()
            .parse()
            .map_err(|_| at(format!("label must be a non-negative integer, got {label:?}")))?;
        if task == Task::Binary && y > 1 {
            return Err(at(format!("label must be 0 or 1, got {y}")));
        }
        let split: Split = split.trim().parse().map_err(|e: Error| at(e.to_string()))?;
        entries.push((u, y, split));
    }
    LabelSet::from_entries(graph.node_count(), task, &entries).map_err(|e| Error::Format {
        path: origin.to_path_buf(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edges;

    fn graph() -> DirectedGraph {
        parse_edges("a\tb\nb\tc\n", Path::new("g")).unwrap().0
    }

    fn parse(text: &str) -> Result<LabelSet> {
        parse_labels(text, Path::new("l.tsv"), &graph(), Task::Binary)
    }

    #[test]
    fn single_label() {
        let l = parse("a\t1\ttrain\n").unwrap();
        assert_eq!(l.label(0), Some(1));
        assert_eq!(l.split(0), Some(Split::Train));
        assert_eq!(l.nodes(Split::Train), vec![0]);
    }

    #[test]
    fn unknown_node_named() {
        let err = parse("z\t0\ttest\n").unwrap_err();
        assert!(err.to_string().contains("\"z\""));
    }

    #[test]
    fn bad_label_and_split() {
        assert!(parse("a\t2\ttrain\n").is_err());
        assert!(parse("a\t1\tholdout\n").is_err());
    }

    #[test]
    fn empty_file_gives_empty_set() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn multiclass_counts_classes() {
        let l = parse_labels("a\t4\ttrain\nb\t0\ttest\n", Path::new("l"), &graph(), Task::Multiclass).unwrap();
        assert_eq!(l.num_classes(), 5);
    }
}
