//! Directed graph storage plus node features and labels.

mod features;
mod io;
mod labels;
mod linqs;

pub use features::{FeatureGroup, FeatureTable};
pub use io::{load_graph, parse_edges, write_edge_list, LoadStats};
pub use labels::{load_labels, parse_labels, LabelSet, Split, Task};
pub use linqs::{load_linqs, split_labels, LinqsDataset, SplitPlan};

pub const EDGE_FILE: &str = "edges.tsv";
pub const FEATURE_FILE: &str = "features.csv";
pub const LABEL_FILE: &str = "labels.tsv";

/// Writes `edges.tsv`, `features.csv` and `labels.tsv` into `dir`.
pub fn write_dataset(dir: &Path, graph: &DirectedGraph, features: &FeatureTable, labels: &LabelSet) -> Result<()> {
    use std::io::BufWriter;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let create = |name: &str| {
        let path = dir.join(name);
        std::fs::File::create(&path).map(BufWriter::new).map_err(|e| Error::io(&path, e))
    };
    let ids = graph.ids();
    write_edge_list(create(EDGE_FILE)?, ids, graph.edges()).map_err(|e| Error::io(dir.join(EDGE_FILE), e))?;
    features.write_csv(create(FEATURE_FILE)?, ids)?;
    labels.write_tsv(create(LABEL_FILE)?, ids).map_err(|e| Error::io(dir.join(LABEL_FILE), e))
}

/// Reads a feature CSV aligned to `graph`; see [`FeatureTable::load`].
pub fn load_features(path: impl AsRef<std::path::Path>, graph: &DirectedGraph) -> Result<FeatureTable> {
    FeatureTable::load(path, graph)
}

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which edge endpoints count as neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    #[default]
    In,
    Both,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "out" => Ok(Direction::Out),
            "in" => Ok(Direction::In),
            "both" => Ok(Direction::Both),
            other => Err(Error::Value(format!("direction must be out|in|both, got {other:?}"))),
        }
    }
}

/// Sparse directed unweighted graph with CSR out- and in-indices.
///
/// No self-loops and no duplicate edges are stored. Node ids are opaque
/// strings mapped to dense indices in first-seen order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    out_offsets: Vec<usize>,
    out_targets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
}

impl DirectedGraph {
    /// Builds a graph over `ids`; self-loops and duplicate edges are dropped
    /// and counted in the returned stats.
    pub fn from_edges(ids: Vec<String>, edges: &[(usize, usize)]) -> Result<(Self, LoadStats)> {
        let n = ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::Value(format!("duplicate node id {id:?}")));
            }
        }
        let mut stats = LoadStats::default();
        let mut kept = Vec::with_capacity(edges.len());
        for &(s, t) in edges {
            if s >= n || t >= n {
                return Err(Error::Range {
                    what: "edge endpoint",
                    value: s.max(t),
                    expected: format!("< {n}"),
                });
            }
            if s == t {
                stats.self_loops += 1;
            } else {
                kept.push((s, t));
            }
        }
        kept.sort_unstable();
        let before = kept.len();
        kept.dedup();
        stats.duplicates = before - kept.len();

        let (out_offsets, out_targets) = csr(n, kept.iter().copied());
        let mut rev: Vec<(usize, usize)> = kept.iter().map(|&(s, t)| (t, s)).collect();
        rev.sort_unstable();
        let (in_offsets, in_sources) = csr(n, rev.into_iter());
        Ok((
            Self {
                ids,
                index,
                out_offsets,
                out_targets,
                in_offsets,
                in_sources,
            },
            stats,
        ))
    }

    /// Graph on nodes named `"0".."n-1"`.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let ids = (0..n).map(|i| i.to_string()).collect();
        Self::from_edges(ids, edges).expect("indices in range").0
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn id(&self, u: usize) -> &str {
        &self.ids[u]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Sorted out-neighbors.
    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    /// Sorted in-neighbors.
    pub fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[u]..self.in_offsets[u + 1]]
    }

    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        self.out_neighbors(s).binary_search(&t).is_ok()
    }

    /// All edges `(src, dst)` in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |s| self.out_neighbors(s).iter().map(move |&t| (s, t)))
    }

    /// Sorted, deduplicated 1-hop neighbors along `direction`.
    pub fn neighbors(&self, u: usize, direction: Direction) -> Vec<usize> {
        match direction {
            Direction::Out => self.out_neighbors(u).to_vec(),
            Direction::In => self.in_neighbors(u).to_vec(),
            Direction::Both => merge_sorted(self.out_neighbors(u), self.in_neighbors(u)),
        }
    }

    /// Per-node neighbor lists at exactly `order` hops (1 or 2). Order-2 sets
    /// exclude the node itself and its order-1 neighbors.
    pub fn neighbor_sets(&self, order: u8, direction: Direction) -> Result<Vec<Vec<usize>>> {
        let first: Vec<Vec<usize>> = (0..self.node_count()).map(|u| self.neighbors(u, direction)).collect();
        expand_order(first, order)
    }
}

/// Turns sorted 1-hop lists into exact `order`-hop lists (1 or 2).
pub fn expand_order(first: Vec<Vec<usize>>, order: u8) -> Result<Vec<Vec<usize>>> {
    match order {
        1 => Ok(first),
        2 => {
            let n = first.len();
            let mut stamp = vec![usize::MAX; n];
            let mut out = Vec::with_capacity(n);
            for u in 0..n {
                stamp[u] = u;
                for &v in &first[u] {
                    stamp[v] = u;
                }
                let mut second = Vec::new();
                for &v in &first[u] {
                    for &w in &first[v] {
                        if stamp[w] != u {
                            stamp[w] = u;
                            second.push(w);
                        }
                    }
                }
                second.sort_unstable();
                out.push(second);
            }
            Ok(out)
        }
        other => Err(Error::Range {
            what: "neighbor order",
            value: other as usize,
            expected: "1 or 2".into(),
        }),
    }
}

fn csr(n: usize, sorted: impl Iterator<Item = (usize, usize)>) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; n + 1];
    let mut targets = Vec::new();
    for (s, t) in sorted {
        offsets[s + 1] += 1;
        targets.push(t);
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, targets)
}

pub(crate) fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> DirectedGraph {
        DirectedGraph::from_index_edges(4, &[(0, 1), (1, 2)])
    }

    #[test]
    fn path_neighbor_orders() {
        let g = path();
        let first = g.neighbor_sets(1, Direction::Out).unwrap();
        let second = g.neighbor_sets(2, Direction::Out).unwrap();
        assert_eq!(first[0], vec![1]);
        assert_eq!(second[0], vec![2]);
        // node 3 is isolated
        assert!(first[3].is_empty() && second[3].is_empty());
    }

    #[test]
    fn transpose_consistency() {
        let g = DirectedGraph::from_index_edges(5, &[(0, 1), (1, 0), (2, 4), (3, 1), (4, 0)]);
        let mut from_in = Vec::new();
        for t in 0..g.node_count() {
            for &s in g.in_neighbors(t) {
                from_in.push((s, t));
            }
        }
        from_in.sort_unstable();
        assert_eq!(from_in, g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn both_direction_is_symmetric() {
        let g = DirectedGraph::from_index_edges(5, &[(0, 1), (2, 1), (3, 4), (4, 3)]);
        let sets = g.neighbor_sets(1, Direction::Both).unwrap();
        for u in 0..5 {
            for &v in &sets[u] {
                assert!(sets[v].contains(&u));
            }
        }
    }

    #[test]
    fn bad_order_rejected() {
        assert!(path().neighbor_sets(3, Direction::In).is_err());
    }
}
