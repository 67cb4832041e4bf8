//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each operation returns a JSON string; the plain functions are usable
//! natively and are what the tests exercise.

use std::path::Path;

use motifgnn::encoder::{EncoderConfig, InputEncoder};
use motifgnn::graph::{parse_edges, Split};
use motifgnn::model::{ModelConfig, MotifGnn, Variant, ViewSet};
use motifgnn::motif::{
    build_motif_adjacencies, build_motif_adjacency, edge_retention, enumerate_instances, graph_heterophily,
    heterophily_ratio, CensusReport, MotifCatalog, Semantics,
};
use motifgnn::synth::{generate, SynthConfig};
use motifgnn::train::{train, AttentionSummary, TrainConfig};
use motifgnn::Measure;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bound on demo graph sizes; keeps the page responsive.
pub const MAX_NODES: usize = 3000;

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Census of a pasted `src<TAB>dst` (or whitespace separated) edge list.
pub fn census(edges: &str) -> Result<String, String> {
    let text: String = edges
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join("\t"))
        .filter(|l| !l.is_empty())
        .map(|l| l + "\n")
        .collect();
    let (graph, _) = parse_edges(&text, Path::new("pasted edges")).map_err(|e| e.to_string())?;
    if graph.node_count() > MAX_NODES {
        return Err(format!("the demo accepts at most {MAX_NODES} nodes"));
    }
    let catalog = MotifCatalog::build();
    let instances = enumerate_instances(&catalog, &graph);
    let mut report = CensusReport::new(&catalog, &graph, &instances, false);
    for class in &mut report.classes {
        let adj = build_motif_adjacency(&graph, &instances, class.index, Semantics::PairCooccurrence)
            .map_err(|e| e.to_string())?;
        class.edge_retention = Some(edge_retention(&graph, &adj));
    }
    to_json(&report)
}

#[derive(Serialize)]
struct ViewHeterophily {
    k: usize,
    name: &'static str,
    instances: u64,
    heterophily: Measure,
}

#[derive(Serialize)]
struct SynthSummary {
    nodes: usize,
    edges: usize,
    seeds: usize,
    exposed: usize,
    default_rate: f64,
    original_heterophily: Measure,
    triangle_views: Vec<ViewHeterophily>,
}

/// Generates a planted-motif graph and compares heterophily of the
/// original graph with that of each triangle-class motif graph.
pub fn synth(n: usize, signal: f64, seed: u64) -> Result<String, String> {
    if n > MAX_NODES {
        return Err(format!("the demo accepts at most {MAX_NODES} nodes"));
    }
    let config = SynthConfig {
        n,
        signal,
        seed,
        ..SynthConfig::default()
    };
    let data = generate(&config).map_err(|e| e.to_string())?;
    let catalog = MotifCatalog::build();
    let instances = enumerate_instances(&catalog, &data.graph);
    let triangle: Vec<usize> = catalog.classes().iter().filter(|c| c.contains_triangle).map(|c| c.index).collect();
    let adjs = build_motif_adjacencies(&data.graph, &instances, &triangle, Semantics::PairCooccurrence)
        .map_err(|e| e.to_string())?;
    let defaults = (0..n).filter(|&u| data.labels.label(u) == Some(1)).count();
    let summary = SynthSummary {
        nodes: n,
        edges: data.graph.edge_count(),
        seeds: data.seeds.len(),
        exposed: data.exposed.iter().filter(|&&e| e).count(),
        default_rate: defaults as f64 / n as f64,
        original_heterophily: graph_heterophily(&data.graph, &data.labels),
        triangle_views: adjs
            .iter()
            .map(|a| ViewHeterophily {
                k: a.k(),
                name: catalog.classes()[a.k() - 1].name,
                instances: instances.counts()[a.k() - 1],
                heterophily: heterophily_ratio(a.rows(), &data.labels),
            })
            .collect(),
    };
    to_json(&summary)
}

#[derive(Serialize)]
struct RunSummary {
    variant: &'static str,
    epochs_run: usize,
    test_auc: Measure,
    test_accuracy: Measure,
    attention: Vec<AttentionSummary>,
}

/// Trains a small MotifGNN and a plain GAT on the same planted dataset.
pub fn train_small(n: usize, epochs: usize, seed: u64) -> Result<String, String> {
    if n > 600 {
        return Err("training in the browser is limited to 600 nodes".into());
    }
    let data = generate(&SynthConfig {
        n,
        edge_prob: 4.0 / n as f64,
        seed,
        ..SynthConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let catalog = MotifCatalog::build();
    let instances = enumerate_instances(&catalog, &data.graph);
    let ks: Vec<usize> = catalog.classes().iter().filter(|c| c.contains_triangle).map(|c| c.index).collect();
    let adjs = build_motif_adjacencies(&data.graph, &instances, &ks, Semantics::PairCooccurrence)
        .map_err(|e| e.to_string())?;
    let train_rows = data.labels.nodes(Split::Train);
    let mut runs = Vec::new();
    for variant in [Variant::Full, Variant::PlainGat] {
        let config = ModelConfig {
            encoder: EncoderConfig {
                embed_dim_profile: 4,
                embed_dim_behavior: 4,
                embed_dim_loan: 4,
                ..EncoderConfig::default()
            },
            hidden_dim: 12,
            attn_dim: 8,
            mlp_hidden: 12,
            variant,
            ..ModelConfig::default()
        };
        let views = ViewSet::build(&data.graph, config.direction, &adjs).map_err(|e| e.to_string())?;
        let views = if variant == Variant::PlainGat { views.original_only() } else { views };
        let encoder = InputEncoder::fit(&data.features, &train_rows, &config.encoder).map_err(|e| e.to_string())?;
        let model = MotifGnn::new(config, encoder, views.len()).map_err(|e| e.to_string())?;
        let inputs = model.prepare(&data.features, views).map_err(|e| e.to_string())?;
        let tc = TrainConfig {
            epochs,
            seed,
            ..TrainConfig::default()
        };
        let outcome = train(&model, &inputs, &data.labels, &tc, model.init_params(seed)).map_err(|e| e.to_string())?;
        let r = outcome.report;
        runs.push(RunSummary {
            variant: variant.as_str(),
            epochs_run: r.epochs_run,
            test_auc: r.auc,
            test_accuracy: r.accuracy,
            attention: r.attention,
        });
    }
    to_json(&runs)
}

#[wasm_bindgen(js_name = census)]
pub fn census_js(edges: &str) -> Result<String, JsValue> {
    census(edges).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = synth)]
pub fn synth_js(n: usize, signal: f64, seed: u32) -> Result<String, JsValue> {
    synth(n, signal, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = trainSmall)]
pub fn train_small_js(n: usize, epochs: usize, seed: u32) -> Result<String, JsValue> {
    train_small(n, epochs, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn census_of_a_cycle() {
        let out: Value = serde_json::from_str(&census("a b\nb c\n\nc a\n").unwrap()).unwrap();
        let nonzero: Vec<&Value> = out["classes"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["instance_count"] != 0)
            .collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0]["name"], "030C");
    }

    #[test]
    fn census_rejects_garbage() {
        assert!(census("").is_err());
        assert!(census("a b c\n").is_err());
    }

    #[test]
    fn synth_summary_lists_triangle_views() {
        let out: Value = serde_json::from_str(&synth(300, 0.85, 3).unwrap()).unwrap();
        assert_eq!(out["nodes"], 300);
        assert_eq!(out["triangle_views"].as_array().unwrap().len(), 7);
        assert!(synth(300, 2.0, 3).is_err());
    }

    #[test]
    fn small_training_run_reports_both_variants() {
        let out: Value = serde_json::from_str(&train_small(120, 3, 1).unwrap()).unwrap();
        let runs = out.as_array().unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0]["variant"], "full");
        assert_eq!(runs[1]["attention"].as_array().unwrap().len(), 1);
    }
}
