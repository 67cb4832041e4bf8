//! Directed 3-node motifs: catalog, census, motif adjacencies and the
//! label statistics computed on them.

mod adjacency;
mod catalog;
mod census;
mod stats;

pub use adjacency::{build_motif_adjacencies, build_motif_adjacency, MotifAdjacency, Semantics};
pub use catalog::{canonical_code, code_of, edges_of, MotifCatalog, TriadClass, CELLS};
pub use census::{
    brute_force_census, classify_triple, enumerate_instances, CensusClassEntry, CensusReport, NodeParticipation,
    TriadCensus, NUM_CLASSES,
};
pub use stats::{
    bad_rate_lift, edge_retention, graph_heterophily, heterophily_ratio, lift_over, motif_bad_rate_lift,
};
