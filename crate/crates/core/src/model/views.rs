use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{merge_sorted, DirectedGraph, Direction};
use crate::motif::MotifAdjacency;
use crate::tensor::{EdgeIndex, Segments};

/// Message-passing structure of one view, self-loops included.
#[derive(Debug, Clone)]
pub struct ViewEdges {
    pub index: Arc<EdgeIndex>,
    pub dst: Arc<Vec<usize>>,
    pub src: Arc<Vec<usize>>,
    pub segments: Arc<Segments>,
}

impl ViewEdges {
    /// `neighbors[u]` lists the nodes `u` aggregates from, excluding `u`.
    pub fn from_neighbors(neighbors: &[Vec<usize>]) -> Result<Self> {
        let n = neighbors.len();
        let lists: Vec<Vec<usize>> = neighbors
            .iter()
            .enumerate()
            .map(|(u, nb)| {
                let mut sorted = nb.clone();
                sorted.sort_unstable();
                sorted.dedup();
                merge_sorted(&sorted, &[u])
            })
            .collect();
        let index = EdgeIndex::from_lists(n, &lists)?;
        Ok(Self {
            dst: Arc::new(index.destinations().to_vec()),
            src: Arc::new(index.sources().to_vec()),
            segments: Arc::new(index.segments().clone()),
            index: Arc::new(index),
        })
    }

    pub fn num_edges(&self) -> usize {
        self.index.num_edges()
    }
}

/// The original-graph view followed by one view per selected motif class.
#[derive(Debug, Clone)]
pub struct ViewSet {
    views: Vec<ViewEdges>,
    ks: Vec<usize>,
}

impl ViewSet {
    pub fn build(graph: &DirectedGraph, direction: Direction, motifs: &[MotifAdjacency]) -> Result<Self> {
        let n = graph.node_count();
        let original: Vec<Vec<usize>> = (0..n).map(|u| graph.neighbors(u, direction)).collect();
        let mut views = vec![ViewEdges::from_neighbors(&original)?];
        for adj in motifs {
            if adj.node_count() != n {
                return Err(Error::Contract(format!(
                    "motif view {} covers {} nodes, graph has {n}",
                    adj.k(),
                    adj.node_count()
                )));
            }
            views.push(ViewEdges::from_neighbors(adj.rows())?);
        }
        Ok(Self {
            views,
            ks: motifs.iter().map(MotifAdjacency::k).collect(),
        })
    }

    /// Views given directly as neighbor lists; the first is the original graph.
    pub fn from_neighbor_lists(lists: &[Vec<Vec<usize>>], ks: Vec<usize>) -> Result<Self> {
        if lists.is_empty() || ks.len() + 1 != lists.len() {
            return Err(Error::Contract(format!(
                "{} neighbor lists need {} motif indices, got {}",
                lists.len(),
                lists.len().saturating_sub(1),
                ks.len()
            )));
        }
        Ok(Self {
            views: lists.iter().map(|l| ViewEdges::from_neighbors(l)).collect::<Result<_>>()?,
            ks,
        })
    }

    /// Keeps only the original-graph view.
    pub fn original_only(&self) -> Self {
        Self {
            views: self.views[..1].to_vec(),
            ks: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.views[0].index.num_destinations()
    }

    pub fn view(&self, i: usize) -> &ViewEdges {
        &self.views[i]
    }

    /// Motif class of each motif view.
    pub fn ks(&self) -> &[usize] {
        &self.ks
    }
}
