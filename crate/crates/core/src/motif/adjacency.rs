use std::io::Write;

use serde::{Deserialize, Serialize};

use super::census::{check_k, TriadCensus};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::par;

/// How co-occurrence in a motif instance becomes an adjacency entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    /// Any two nodes of one instance are linked, both ways.
    #[default]
    PairCooccurrence,
    /// Only original edges whose endpoints share an instance are kept.
    EdgePreserving,
}

impl std::str::FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair_cooccurrence" => Ok(Semantics::PairCooccurrence),
            "edge_preserving" => Ok(Semantics::EdgePreserving),
            other => Err(Error::Value(format!(
                "semantics must be pair_cooccurrence|edge_preserving, got {other:?}"
            ))),
        }
    }
}

impl Semantics {
    pub fn as_str(self) -> &'static str {
        match self {
            Semantics::PairCooccurrence => "pair_cooccurrence",
            Semantics::EdgePreserving => "edge_preserving",
        }
    }
}

/// Binary motif adjacency with an implicit unit diagonal.
///
/// Only off-diagonal ones are stored, as sorted per-row column lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifAdjacency {
    k: usize,
    semantics: Semantics,
    rows: Vec<Vec<usize>>,
    preserved_edge_count: usize,
}

impl MotifAdjacency {
    /// Identity matrix on `n` nodes; used for the original-graph view slot.
    pub fn identity(n: usize, k: usize, semantics: Semantics) -> Self {
        Self {
            k,
            semantics,
            rows: vec![Vec::new(); n],
            preserved_edge_count: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    /// Off-diagonal ones in row `i`, ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i == j || self.rows[i].binary_search(&j).is_ok()
    }

    /// Number of off-diagonal ones.
    pub fn off_diagonal_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Original directed edges `(i, j)` with a one at `(i, j)`.
    pub fn preserved_edge_count(&self) -> usize {
        self.preserved_edge_count
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().all(|&j| self.rows[j].binary_search(&i).is_ok()))
    }

    /// Nodes with at least one off-diagonal entry.
    pub fn covered_nodes(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_empty()).count()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let n = self.rows.len();
        (0..n)
            .map(|i| (0..n).map(|j| u8::from(self.contains(i, j))).collect())
            .collect()
    }

    /// Writes the off-diagonal entries as a `src<TAB>dst` edge list.
    pub fn write_tsv<W: Write>(&self, out: W, ids: &[String]) -> std::io::Result<()> {
        let edges = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&j| (i, j)));
        crate::graph::write_edge_list(out, ids, edges)
    }
}

/// Builds `A_k` from the instances of class `k` (1-based).
pub fn build_motif_adjacency(
    graph: &DirectedGraph,
    census: &TriadCensus,
    k: usize,
    semantics: Semantics,
) -> Result<MotifAdjacency> {
    check_k(k)?;
    let n = graph.node_count();
    if census.node_count() != n {
        return Err(Error::Contract(format!(
            "census covers {} nodes but graph has {n}",
            census.node_count()
        )));
    }
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in census.instances(k)? {
        let [a, b, c] = t.map(|x| x as usize);
        for (i, j) in [(a, b), (a, c), (b, c)] {
            rows[i].push(j);
            rows[j].push(i);
        }
    }
    let mut preserved = 0;
    for (i, row) in rows.iter_mut().enumerate() {
        row.sort_unstable();
        row.dedup();
        if semantics == Semantics::EdgePreserving {
            row.retain(|&j| graph.has_edge(i, j));
            preserved += row.len();
        } else {
            preserved += row.iter().filter(|&&j| graph.has_edge(i, j)).count();
        }
    }
    Ok(MotifAdjacency {
        k,
        semantics,
        rows,
        preserved_edge_count: preserved,
    })
}

/// Builds several motif adjacencies concurrently, in the order of `ks`.
pub fn build_motif_adjacencies(
    graph: &DirectedGraph,
    census: &TriadCensus,
    ks: &[usize],
    semantics: Semantics,
) -> Result<Vec<MotifAdjacency>> {
    par::map(ks.to_vec(), |k| build_motif_adjacency(graph, census, k, semantics))
        .into_iter()
        .collect()
}
