use serde::Serialize;

use super::catalog::MotifCatalog;
use crate::error::{Error, Result};
use crate::graph::{merge_sorted, DirectedGraph};
use crate::par;

pub const NUM_CLASSES: usize = 13;

/// Motif instances of a graph under induced-subgraph semantics.
///
/// Every weakly connected node triple belongs to exactly one class. Instances
/// are stored as ascending node triples, sorted within each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriadCensus {
    node_count: usize,
    counts: [u64; NUM_CLASSES],
    participation: Vec<[u32; NUM_CLASSES]>,
    instances: Vec<Vec<[u32; 3]>>,
}

impl TriadCensus {
    fn from_instances(node_count: usize, mut instances: Vec<Vec<[u32; 3]>>) -> Self {
        let mut counts = [0u64; NUM_CLASSES];
        let mut participation = vec![[0u32; NUM_CLASSES]; node_count];
        for (c, list) in instances.iter_mut().enumerate() {
            list.sort_unstable();
            counts[c] = list.len() as u64;
            for t in list.iter() {
                for &u in t {
                    participation[u as usize][c] += 1;
                }
            }
        }
        Self {
            node_count,
            counts,
            participation,
            instances,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Instance counts indexed by class position (`k - 1`).
    pub fn counts(&self) -> &[u64; NUM_CLASSES] {
        &self.counts
    }

    /// Instance count of class `k` (1-based).
    pub fn count(&self, k: usize) -> Result<u64> {
        check_k(k)?;
        Ok(self.counts[k - 1])
    }

    /// Number of weakly connected triples.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Per-class instance counts containing node `u`.
    pub fn participation(&self, u: usize) -> &[u32; NUM_CLASSES] {
        &self.participation[u]
    }

    /// Instances of class `k` (1-based).
    pub fn instances(&self, k: usize) -> Result<&[[u32; 3]]> {
        check_k(k)?;
        Ok(&self.instances[k - 1])
    }
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > NUM_CLASSES {
        return Err(Error::Range {
            what: "motif index",
            value: k,
            expected: format!("1..={NUM_CLASSES}"),
        });
    }
    Ok(())
}

/// Labeled 6-bit code of the triple in the order given.
fn triple_code(graph: &DirectedGraph, u: usize, v: usize, w: usize) -> u8 {
    let nodes = [u, v, w];
    super::catalog::CELLS
        .iter()
        .enumerate()
        .fold(0u8, |code, (bit, &(i, j))| {
            if graph.has_edge(nodes[i], nodes[j]) {
                code | (1 << bit)
            } else {
                code
            }
        })
}

/// Class index (1-based) of the subgraph induced by `{u, v, w}`, or `None`
/// when it is not weakly connected.
pub fn classify_triple(
    catalog: &MotifCatalog,
    graph: &DirectedGraph,
    u: usize,
    v: usize,
    w: usize,
) -> Result<Option<usize>> {
    if u == v || v == w || u == w {
        return Err(Error::Contract(format!("classify_triple needs distinct nodes, got ({u}, {v}, {w})")));
    }
    Ok(catalog.classify_code(triple_code(graph, u, v, w)))
}

/// Undirected skeleton in CSR form.
struct Skeleton {
    offsets: Vec<usize>,
    nbrs: Vec<usize>,
}

impl Skeleton {
    fn new(graph: &DirectedGraph) -> Self {
        let n = graph.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut nbrs = Vec::new();
        offsets.push(0);
        for u in 0..n {
            nbrs.extend(merge_sorted(graph.out_neighbors(u), graph.in_neighbors(u)));
            offsets.push(nbrs.len());
        }
        Self { offsets, nbrs }
    }

    fn of(&self, u: usize) -> &[usize] {
        &self.nbrs[self.offsets[u]..self.offsets[u + 1]]
    }

    fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }
}

const GRAIN: usize = 256;

/// Enumerates all motif instances without touching disconnected triples.
///
/// Triangles of the skeleton are listed once each from their lowest-ranked
/// vertex, ranking by (degree, index); open wedges are listed once each from
/// their unique center.
pub fn enumerate_instances(catalog: &MotifCatalog, graph: &DirectedGraph) -> TriadCensus {
    let n = graph.node_count();
    let skel = Skeleton::new(graph);
    let rank_less = |a: usize, b: usize| (skel.degree(a), a) < (skel.degree(b), b);

    let higher: Vec<Vec<usize>> = (0..n)
        .map(|u| skel.of(u).iter().copied().filter(|&v| rank_less(u, v)).collect())
        .collect();

    let parts = par::map(par::chunks(n, GRAIN), |range| {
        let mut found: Vec<Vec<[u32; 3]>> = vec![Vec::new(); NUM_CLASSES];
        let mut record = |a: usize, b: usize, c: usize| {
            let k = catalog
                .classify_code(triple_code(graph, a, b, c))
                .expect("skeleton-connected triple");
            let mut t = [a as u32, b as u32, c as u32];
            t.sort_unstable();
            found[k - 1].push(t);
        };
        let mut mark = vec![usize::MAX; n];
        let mut token = 0usize;

        for u in range.clone() {
            for &v in &higher[u] {
                mark[v] = u;
            }
            for &v in &higher[u] {
                for &w in &higher[v] {
                    if mark[w] == u {
                        record(u, v, w);
                    }
                }
            }
        }

        // triangle marks are node ids and would collide with wedge tokens
        mark.fill(usize::MAX);
        for c in range {
            let around = skel.of(c);
            for (i, &a) in around.iter().enumerate() {
                token += 1;
                for &x in skel.of(a) {
                    mark[x] = token;
                }
                for &b in &around[i + 1..] {
                    if mark[b] != token {
                        record(a, c, b);
                    }
                }
            }
        }
        found
    });

    let mut instances: Vec<Vec<[u32; 3]>> = vec![Vec::new(); NUM_CLASSES];
    for part in parts {
        for (c, list) in part.into_iter().enumerate() {
            instances[c].extend(list);
        }
    }
    TriadCensus::from_instances(n, instances)
}

/// Classifies every one of the C(n, 3) triples. Cubic time; meant for small
/// graphs and as a reference for [`enumerate_instances`].
pub fn brute_force_census(catalog: &MotifCatalog, graph: &DirectedGraph) -> TriadCensus {
    let n = graph.node_count();
    let mut instances: Vec<Vec<[u32; 3]>> = vec![Vec::new(); NUM_CLASSES];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if let Some(k) = catalog.classify_code(triple_code(graph, a, b, c)) {
                    instances[k - 1].push([a as u32, b as u32, c as u32]);
                }
            }
        }
    }
    TriadCensus::from_instances(n, instances)
}

/// One catalog row of `census.json`.
#[derive(Debug, Clone, Serialize)]
pub struct CensusClassEntry {
    pub index: usize,
    pub name: &'static str,
    pub canonical_code: u8,
    pub edges: Vec<(usize, usize)>,
    pub contains_triangle: bool,
    pub instance_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_retention: Option<crate::Measure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeParticipation {
    pub id: String,
    pub counts: [u32; NUM_CLASSES],
}

/// Serializable census summary.
#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub total_instances: u64,
    pub classes: Vec<CensusClassEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub participation: Option<Vec<NodeParticipation>>,
}

impl CensusReport {
    pub fn new(catalog: &MotifCatalog, graph: &DirectedGraph, census: &TriadCensus, with_participation: bool) -> Self {
        let classes = catalog
            .classes()
            .iter()
            .map(|c| CensusClassEntry {
                index: c.index,
                name: c.name,
                canonical_code: c.canonical_code,
                edges: c.edges.clone(),
                contains_triangle: c.contains_triangle,
                instance_count: census.counts[c.index - 1],
                edge_retention: None,
            })
            .collect();
        let participation = with_participation.then(|| {
            (0..graph.node_count())
                .map(|u| NodeParticipation {
                    id: graph.id(u).to_owned(),
                    counts: census.participation[u],
                })
                .collect()
        });
        Self {
            node_count: graph.node_count(),
            edge_count: graph.edge_count(),
            total_instances: census.total(),
            classes,
            participation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle() -> DirectedGraph {
        DirectedGraph::from_index_edges(3, &[(0, 1), (1, 2), (2, 0)])
    }

    #[test]
    fn classify_examples() {
        let cat = MotifCatalog::build();
        let g = DirectedGraph::from_index_edges(3, &[(0, 1)]);
        assert_eq!(classify_triple(&cat, &g, 0, 1, 2).unwrap(), None);
        let path = DirectedGraph::from_index_edges(3, &[(0, 1), (1, 2)]);
        let k = classify_triple(&cat, &path, 0, 1, 2).unwrap().unwrap();
        assert_eq!(cat.class(k).unwrap().name, "021C");
        let k = classify_triple(&cat, &cycle(), 2, 0, 1).unwrap().unwrap();
        assert_eq!(cat.class(k).unwrap().name, "030C");
    }

    #[test]
    fn repeated_node_is_contract_error() {
        let cat = MotifCatalog::build();
        assert!(matches!(classify_triple(&cat, &cycle(), 0, 0, 1), Err(Error::Contract(_))));
    }

    #[test]
    fn edgeless_graph_has_no_instances() {
        let cat = MotifCatalog::build();
        let g = DirectedGraph::from_index_edges(5, &[]);
        assert_eq!(enumerate_instances(&cat, &g).total(), 0);
    }

    #[test]
    fn cycle_has_one_instance() {
        let cat = MotifCatalog::build();
        let c = enumerate_instances(&cat, &cycle());
        assert_eq!(c.total(), 1);
        let k = cat.by_name("030C").unwrap().index;
        assert_eq!(c.count(k).unwrap(), 1);
        assert_eq!(c.instances(k).unwrap(), &[[0, 1, 2]]);
    }

    #[test]
    fn star_wedges() {
        // hub 0 pointing at 1..=4: C(4,2) open wedges, all out-stars
        let cat = MotifCatalog::build();
        let g = DirectedGraph::from_index_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let c = enumerate_instances(&cat, &g);
        assert_eq!(c.total(), 6);
        assert_eq!(c.count(cat.by_name("021D").unwrap().index).unwrap(), 6);
        assert_eq!(c.participation(0).iter().sum::<u32>(), 6);
        assert_eq!(c.participation(1).iter().sum::<u32>(), 3);
    }

    #[test]
    fn matches_brute_force_on_clique_with_tail() {
        let cat = MotifCatalog::build();
        let mut edges = Vec::new();
        for a in 0..5 {
            for b in 0..5 {
                if a != b && (a + 2 * b) % 3 != 0 {
                    edges.push((a, b));
                }
            }
        }
        edges.extend([(4, 5), (6, 5), (5, 7), (7, 8)]);
        let g = DirectedGraph::from_index_edges(9, &edges);
        assert_eq!(enumerate_instances(&cat, &g), brute_force_census(&cat, &g));
    }

    #[test]
    fn report_serializes() {
        let cat = MotifCatalog::build();
        let g = cycle();
        let c = enumerate_instances(&cat, &g);
        let json = serde_json::to_value(CensusReport::new(&cat, &g, &c, true)).unwrap();
        assert_eq!(json["total_instances"], 1);
        assert_eq!(json["classes"].as_array().unwrap().len(), 13);
        assert_eq!(json["participation"][0]["id"], "0");
    }
}
