//! Citation datasets in the LINQS layout (`<name>.content`, `<name>.cites`).

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DirectedGraph, FeatureGroup, FeatureTable, LabelSet, Split, Task};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// A citation graph with bag-of-words features and topic labels.
#[derive(Debug, Clone)]
pub struct LinqsDataset {
    pub graph: DirectedGraph,
    pub features: FeatureTable,
    pub labels: LabelSet,
    /// Topic names by class index.
    pub classes: Vec<String>,
}

/// Fractions of labeled nodes assigned to train and valid; the rest is test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPlan {
    pub train: f64,
    pub valid: f64,
    pub seed: u64,
}

impl Default for SplitPlan {
    fn default() -> Self {
        Self {
            train: 0.6,
            valid: 0.2,
            seed: 0,
        }
    }
}

/// Loads `<dir>/<name>.content` and `<dir>/<name>.cites`.
///
/// Content lines are `id<TAB>x_1 … x_d<TAB>topic`; cites lines are
/// `cited<TAB>citing`, giving the edge `citing → cited`. Citations naming
/// unknown papers are skipped. Feature columns are tagged `profile`.
pub fn load_linqs(dir: impl AsRef<Path>, name: &str, plan: SplitPlan) -> Result<LinqsDataset> {
    let dir = dir.as_ref();
    let content_path = dir.join(format!("{name}.content"));
    let cites_path = dir.join(format!("{name}.cites"));
    let content = std::fs::read_to_string(&content_path).map_err(|e| Error::io(&content_path, e))?;
    let cites = std::fs::read_to_string(&cites_path).map_err(|e| Error::io(&cites_path, e))?;

    let mut ids = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    let mut topics: Vec<String> = Vec::new();
    let mut width = None;
    for (lineno, line) in content.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let at = |msg: String| Error::Parse {
            path: content_path.clone(),
            line: lineno + 1,
            msg,
        };
        if fields.len() < 3 {
            return Err(at("expected id, features and topic".into()));
        }
        let d = fields.len() - 2;
        if *width.get_or_insert(d) != d {
            return Err(at(format!("expected {} features, got {d}", width.unwrap_or(0))));
        }
        for cell in &fields[1..=d] {
            rows.push(cell.parse().map_err(|_| at(format!("non-numeric feature {cell:?}")))?);
        }
        ids.push(fields[0].to_owned());
        topics.push(fields[d + 1].to_owned());
    }
    let Some(d) = width else {
        return Err(Error::EmptyGraph);
    };
    let n = ids.len();
    let lookup: std::collections::HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut edges = Vec::new();
    for (lineno, line) in cites.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[..] {
            [] => continue,
            [cited, citing] => {
                if let (Some(&t), Some(&s)) = (lookup.get(cited), lookup.get(citing)) {
                    edges.push((s, t));
                }
            }
            _ => {
                return Err(Error::Parse {
                    path: cites_path.clone(),
                    line: lineno + 1,
                    msg: "expected two paper ids".into(),
                })
            }
        }
    }
    let (graph, _) = DirectedGraph::from_edges(ids, &edges)?;

    let mut classes: Vec<String> = topics.clone();
    classes.sort();
    classes.dedup();
    let y: Vec<usize> = topics
        .iter()
        .map(|t| classes.binary_search(t).expect("topic listed"))
        .collect();
    let features = FeatureTable::new(
        Tensor::from_vec(n, d, rows)?,
        (0..d).map(|j| format!("profile_w{j}")).collect(),
        vec![FeatureGroup::Profile; d],
    )?;
    let labels = split_labels(&y, Task::Multiclass, plan)?;
    Ok(LinqsDataset {
        graph,
        features,
        labels,
        classes,
    })
}

/// Randomly assigns every node to a split according to `plan`.
pub fn split_labels(y: &[usize], task: Task, plan: SplitPlan) -> Result<LabelSet> {
    if !(plan.train > 0.0 && plan.valid >= 0.0 && plan.train + plan.valid <= 1.0) {
        return Err(Error::Config(format!(
            "split fractions must satisfy 0 < train and train + valid <= 1, got {} and {}",
            plan.train, plan.valid
        )));
    }
    let n = y.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(plan.seed));
    let train_end = (n as f64 * plan.train).round() as usize;
    let valid_end = (train_end + (n as f64 * plan.valid).round() as usize).min(n);
    let entries: Vec<(usize, usize, Split)> = order
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let split = match i {
                i if i < train_end => Split::Train,
                i if i < valid_end => Split::Valid,
                _ => Split::Test,
            };
            (u, y[u], split)
        })
        .collect();
    LabelSet::from_entries(n, task, &entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_dataset() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("mini.content"),
            "p1\t1\t0\tA\np2\t0\t1\tB\np3\t1\t1\tA\n",
        )
        .unwrap();
        std::fs::write(dir.path().join("mini.cites"), "p1\tp2\np1\tp3\np9\tp3\n").unwrap();
        let data = load_linqs(dir.path(), "mini", SplitPlan::default()).unwrap();
        assert_eq!(data.graph.node_count(), 3);
        assert_eq!(data.graph.edge_count(), 2);
        assert!(data.graph.has_edge(1, 0) && data.graph.has_edge(2, 0));
        assert_eq!(data.classes, vec!["A", "B"]);
        assert_eq!(data.labels.label(1), Some(1));
        assert_eq!(data.labels.num_classes(), 2);
        assert_eq!(data.features.shape(), (3, 2));
    }

    #[test]
    fn split_fractions() {
        let y = vec![0; 100];
        let l = split_labels(&y, Task::Binary, SplitPlan::default()).unwrap();
        assert_eq!(l.nodes(Split::Train).len(), 60);
        assert_eq!(l.nodes(Split::Valid).len(), 20);
        assert_eq!(l.nodes(Split::Test).len(), 20);
    }
}
