#![allow(dead_code)]

use motifgnn::encoder::{EncoderConfig, InputEncoder};
use motifgnn::graph::{DirectedGraph, FeatureGroup, FeatureTable, LabelSet, Split, Task};
use motifgnn::model::{GraphInputs, ModelConfig, MotifGnn, ViewSet};
use motifgnn::motif::{build_motif_adjacencies, enumerate_instances, MotifCatalog, Semantics};
use motifgnn::tensor::Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Fixture {
    pub graph: DirectedGraph,
    pub table: FeatureTable,
    pub labels: LabelSet,
}

/// Two overlapping triangles with a tail. Node label is 1 exactly when its
/// profile value exceeds 0.5.
pub fn six_node() -> Fixture {
    let edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (4, 5), (5, 3), (1, 5)];
    let graph = DirectedGraph::from_index_edges(6, &edges);
    let rows = vec![
        vec![0.9, 0.2, 1.5],
        vec![0.1, 0.8, 0.3],
        vec![0.7, 0.5, 2.0],
        vec![0.3, 0.1, 0.7],
        vec![0.8, 0.9, 0.1],
        vec![0.2, 0.4, 1.1],
    ];
    let labels: Vec<(usize, usize, Split)> = rows
        .iter()
        .enumerate()
        .map(|(u, r)| (u, usize::from(r[0] > 0.5), Split::Train))
        .collect();
    Fixture {
        graph,
        table: table(rows),
        labels: LabelSet::from_entries(6, Task::Binary, &labels).unwrap(),
    }
}

pub fn table(rows: Vec<Vec<f64>>) -> FeatureTable {
    FeatureTable::new(
        Tensor::from_rows(&rows).unwrap(),
        vec!["profile_a".into(), "behavior_b".into(), "loan_c".into()],
        FeatureGroup::ALL.to_vec(),
    )
    .unwrap()
}

pub fn small_config() -> ModelConfig {
    ModelConfig {
        encoder: EncoderConfig {
            buckets: 3,
            embed_dim_profile: 3,
            embed_dim_behavior: 2,
            embed_dim_loan: 3,
            ..EncoderConfig::default()
        },
        hidden_dim: 8,
        layers: 2,
        attn_dim: 4,
        mlp_hidden: 6,
        ..ModelConfig::default()
    }
}

/// Model over the original graph plus the motif views `ks`.
pub fn build(fx: &Fixture, config: ModelConfig, ks: &[usize]) -> (MotifGnn, GraphInputs) {
    let catalog = MotifCatalog::build();
    let census = enumerate_instances(&catalog, &fx.graph);
    let adjs = build_motif_adjacencies(&fx.graph, &census, ks, Semantics::PairCooccurrence).unwrap();
    let views = ViewSet::build(&fx.graph, config.direction, &adjs).unwrap();
    let all: Vec<usize> = (0..fx.graph.node_count()).collect();
    let encoder = InputEncoder::fit(&fx.table, &all, &config.encoder).unwrap();
    let model = MotifGnn::new(config, encoder, views.len()).unwrap();
    let inputs = model.prepare(&fx.table, views).unwrap();
    (model, inputs)
}

pub fn all_motifs() -> Vec<usize> {
    (1..=13).collect()
}

pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.random_bool(p) {
                edges.push((s, t));
            }
        }
    }
    DirectedGraph::from_index_edges(n, &edges)
}

pub fn random_fixture(seed: u64, n: usize, p: f64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = random_digraph(&mut rng, n, p);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let entries: Vec<(usize, usize, Split)> = (0..n).map(|u| (u, rng.random_range(0..2), Split::Train)).collect();
    Fixture {
        graph,
        table: table(rows),
        labels: LabelSet::from_entries(n, Task::Binary, &entries).unwrap(),
    }
}
