use super::adjacency::MotifAdjacency;
use crate::error::Result;
use crate::graph::{expand_order, DirectedGraph, Direction, LabelSet};
use crate::Measure;

/// Ratio of the mean neighbor bad rate of default users to that of normal
/// users, over `order`-hop neighbors along `direction`.
pub fn bad_rate_lift(graph: &DirectedGraph, labels: &LabelSet, order: u8, direction: Direction) -> Result<Measure> {
    Ok(lift_over(&graph.neighbor_sets(order, direction)?, labels))
}

/// [`bad_rate_lift`] on a motif graph's off-diagonal neighborhoods.
pub fn motif_bad_rate_lift(adj: &MotifAdjacency, labels: &LabelSet, order: u8) -> Result<Measure> {
    Ok(lift_over(&expand_order(adj.rows().to_vec(), order)?, labels))
}

/// Lift computed from explicit neighbor lists. Unlabeled neighbors are
/// ignored, as are users with no labeled neighbor.
pub fn lift_over(neighbors: &[Vec<usize>], labels: &LabelSet) -> Measure {
    if labels.num_classes() != 2 {
        return Measure::undefined("lift needs binary labels");
    }
    let mut sums = [0.0f64; 2];
    let mut users = [0usize; 2];
    for (u, nbrs) in neighbors.iter().enumerate() {
        let Some(y) = labels.label(u) else { continue };
        let (mut bad, mut seen) = (0usize, 0usize);
        for &v in nbrs {
            if let Some(yv) = labels.label(v) {
                seen += 1;
                bad += yv;
            }
        }
        if seen > 0 {
            sums[y] += bad as f64 / seen as f64;
            users[y] += 1;
        }
    }
    if users[0] == 0 || users[1] == 0 {
        return Measure::undefined("a label class has no user with labeled neighbors");
    }
    let normal = sums[0] / users[0] as f64;
    if normal == 0.0 {
        return Measure::undefined("normal users have zero neighbor bad rate");
    }
    Measure::Defined((sums[1] / users[1] as f64) / normal)
}

/// Fraction of off-diagonal entries whose two labeled endpoints disagree.
pub fn heterophily_ratio(neighbors: &[Vec<usize>], labels: &LabelSet) -> Measure {
    let (mut mixed, mut total) = (0usize, 0usize);
    for (i, row) in neighbors.iter().enumerate() {
        let Some(yi) = labels.label(i) else { continue };
        for &j in row {
            if i == j {
                continue;
            }
            if let Some(yj) = labels.label(j) {
                total += 1;
                mixed += usize::from(yi != yj);
            }
        }
    }
    if total == 0 {
        return Measure::undefined("no edge joins two labeled nodes");
    }
    Measure::Defined(mixed as f64 / total as f64)
}

/// Heterophily over the directed edges of `graph`.
pub fn graph_heterophily(graph: &DirectedGraph, labels: &LabelSet) -> Measure {
    let rows: Vec<Vec<usize>> = (0..graph.node_count()).map(|u| graph.out_neighbors(u).to_vec()).collect();
    heterophily_ratio(&rows, labels)
}

/// Fraction of original directed edges that survive in `adj`.
pub fn edge_retention(graph: &DirectedGraph, adj: &MotifAdjacency) -> Measure {
    if graph.edge_count() == 0 {
        return Measure::undefined("graph has no edges");
    }
    let kept = graph.edges().filter(|&(i, j)| adj.contains(i, j)).count();
    Measure::Defined(kept as f64 / graph.edge_count() as f64)
}
