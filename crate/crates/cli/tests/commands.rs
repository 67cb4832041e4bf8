use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use motifgnn::graph::{load_graph, load_labels, Task};
use motifgnn::model::Snapshot;
use motifgnn::motif::{build_motif_adjacency, enumerate_instances, MotifCatalog, Semantics};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_motifgnn"))
}

fn run(args: &[&str]) -> i32 {
    let mut all = vec!["motifgnn"];
    all.extend_from_slice(args);
    motifgnn_cli::run(all)
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small synthetic dataset written into `dir/data`.
fn synth_data(dir: &Path, n: usize, extra: &[&str]) -> PathBuf {
    let data = dir.join("data");
    let n = n.to_string();
    let mut args = vec!["synth", "--out", s(&data), "--n", &n, "--set", "edge_prob=0.02"];
    args.extend_from_slice(extra);
    assert_eq!(run(&args), 0);
    data
}

const SMALL_MODEL: [&str; 12] = [
    "--set",
    "hidden_dim=6",
    "--set",
    "mlp_hidden=6",
    "--set",
    "embed_dim_profile=3",
    "--set",
    "embed_dim_behavior=3",
    "--set",
    "embed_dim_loan=3",
    "--set",
    "attn_dim=4",
];

fn train_args<'a>(data: &'a Path, out: &'a Path, epochs: &'a str) -> Vec<String> {
    let mut v: Vec<String> = [
        "train",
        "--graph",
        s(&data.join("edges.tsv")),
        "--features",
        s(&data.join("features.csv")),
        "--labels",
        s(&data.join("labels.tsv")),
        "--out",
        s(out),
        "--epochs",
        epochs,
        "--motifs",
        "1,4,9",
    ]
    .iter()
    .map(|a| a.to_string())
    .collect();
    v.extend(SMALL_MODEL.iter().map(|a| a.to_string()));
    v
}

fn run_owned(args: &[String]) -> i32 {
    run(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn three_cycle_census_has_one_class() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.tsv");
    fs::write(&edges, "a\tb\nb\tc\nc\ta\n").unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&["census", "--graph", s(&edges), "--out", s(&out)]), 0);
    let report = json(out.join("census.json"));
    let nonzero: Vec<&Value> = report["classes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["instance_count"].as_u64().unwrap() > 0)
        .collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0]["name"], "030C");
    assert_eq!(nonzero[0]["instance_count"], 1);
    assert_eq!(nonzero[0]["edge_retention"]["value"], 1.0);
    assert!(out.join("config.resolved").exists());
}

#[test]
fn brute_force_census_equals_fast_path() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 40, &["--set", "edge_prob=0.08"]);
    let graph = data.join("edges.tsv");
    let fast = dir.path().join("fast");
    let slow = dir.path().join("slow");
    assert_eq!(run(&["census", "--graph", s(&graph), "--out", s(&fast), "--participation"]), 0);
    assert_eq!(
        run(&["census", "--graph", s(&graph), "--out", s(&slow), "--participation", "--brute-force"]),
        0
    );
    assert_eq!(
        fs::read(fast.join("census.json")).unwrap(),
        fs::read(slow.join("census.json")).unwrap()
    );
}

#[test]
fn brute_force_refuses_large_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 500, &[]);
    let out = dir.path().join("out");
    assert_eq!(
        run(&["census", "--graph", s(&data.join("edges.tsv")), "--out", s(&out), "--brute-force"]),
        2
    );
}

#[test]
fn empty_graph_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.tsv");
    fs::write(&edges, "").unwrap();
    let out = bin()
        .args(["census", "--graph", s(&edges), "--out", s(&dir.path().join("o"))])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty graph"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 30, &[]);
    let graph = data.join("edges.tsv");
    let out = dir.path().join("o");
    let cases: Vec<Vec<&str>> = vec![
        vec!["analyze", "--graph", s(&graph), "--out", s(&out)],
        vec!["analyze", "--graph", s(&graph), "--labels", "/nonexistent/labels.tsv", "--out", s(&out)],
        vec!["census", "--graph", s(&graph), "--out", s(&out), "--set", "bogus=1"],
        vec!["census", "--graph", s(&graph), "--out", s(&out), "--set", "layers"],
        vec!["census", "--graph", s(&graph), "--out", s(&out), "--threads", "0"],
        vec!["census", "--graph", s(&graph), "--out", s(&out), "--motifs", "14"],
        vec!["census", "--graph", s(&graph)],
        vec!["synth", "--out", s(&out), "--n", "2"],
        vec!["synth", "--out", s(&out), "--signal", "1.5"],
        vec!["train", "--graph", s(&graph), "--out", s(&out), "--ablate", "nothing"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let status = bin().args(&args).output().unwrap().status;
        assert_eq!(status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_then_set_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 30, &[]);
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# test\nlayers = 3\nhidden_dim = 5\nmotifs = 2\n").unwrap();
    let out = dir.path().join("o");
    let code = run(&[
        "census",
        "--config",
        s(&cfg),
        "--set",
        "hidden_dim=7",
        "--set",
        "motifs=3",
        "--motifs",
        "4-5",
        "--graph",
        s(&data.join("edges.tsv")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 0);
    let resolved = fs::read_to_string(out.join("config.resolved")).unwrap();
    for line in ["layers = 3", "hidden_dim = 7", "motifs = 4,5"] {
        assert!(resolved.lines().any(|l| l == line), "{line} missing from\n{resolved}");
    }
}

#[test]
fn build_writes_motif_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 60, &[]);
    let edges = data.join("edges.tsv");
    let out = dir.path().join("o");
    assert_eq!(
        run(&["build", "--graph", s(&edges), "--out", s(&out), "--motifs", "1,9", "--semantics", "edge_preserving"]),
        0
    );
    let (graph, _) = load_graph(&edges).unwrap();
    let catalog = MotifCatalog::build();
    let census = enumerate_instances(&catalog, &graph);
    for k in [1, 9] {
        let adj = build_motif_adjacency(&graph, &census, k, Semantics::EdgePreserving).unwrap();
        let text = fs::read_to_string(out.join(format!("motif_{k}.tsv"))).unwrap();
        let mut pairs: Vec<(usize, usize)> = text
            .lines()
            .map(|l| {
                let (a, b) = l.split_once('\t').unwrap();
                (graph.index_of(a).unwrap(), graph.index_of(b).unwrap())
            })
            .collect();
        pairs.sort_unstable();
        let mut expected = Vec::new();
        for i in 0..graph.node_count() {
            for &j in adj.neighbors(i) {
                if i != j {
                    expected.push((i, j));
                }
            }
        }
        expected.sort_unstable();
        assert_eq!(pairs, expected, "motif {k}");
    }
    assert!(!out.join("motif_2.tsv").exists());
}

#[test]
fn zero_epochs_saves_initial_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 60, &[]);
    let out = dir.path().join("o");
    let mut args = train_args(&data, &out, "0");
    args.extend(["--seed".into(), "9".into()]);
    assert_eq!(run_owned(&args), 0);
    let snap = Snapshot::load(out.join("model.json")).unwrap();
    let (model, params) = snap.restore().unwrap();
    assert_eq!(params, model.init_params(9));
    let metrics = json(out.join("metrics.json"));
    assert_eq!(metrics["epochs_run"], 0);
    assert!(metrics["auc"]["value"].is_number());
}

#[test]
fn fixed_seed_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 80, &[]);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let mut args = train_args(&data, out, "3");
        args.extend(["--seed".into(), "7".into()]);
        assert_eq!(run_owned(&args), 0);
    }
    for f in ["metrics.json", "model.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 80, &[]);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}"));
        let mut args = train_args(&data, &out, "3");
        args.extend(["--threads".into(), threads.into()]);
        assert_eq!(run_owned(&args), 0);
        outputs.push((fs::read(out.join("metrics.json")).unwrap(), fs::read(out.join("model.json")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn several_seeds_report_mean_and_std() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 60, &[]);
    let out = dir.path().join("o");
    let mut args = train_args(&data, &out, "1");
    args.extend(["--seeds", "3", "--seed", "5"].map(String::from));
    assert_eq!(run_owned(&args), 0);
    let m = json(out.join("metrics.json"));
    assert_eq!(m["seeds"], serde_json::json!([5, 6, 7]));
    assert_eq!(m["runs"].as_array().unwrap().len(), 3);
    let aucs: Vec<f64> = m["runs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["auc"]["value"].as_f64().unwrap())
        .collect();
    let mean = aucs.iter().sum::<f64>() / 3.0;
    assert!((m["summary"]["auc"]["mean"].as_f64().unwrap() - mean).abs() < 1e-12);
    for seed in 5..8 {
        assert!(out.join(format!("seed_{seed}/model.json")).exists());
    }
}

#[test]
fn plain_gat_ablation_uses_one_view() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 60, &[]);
    let out = dir.path().join("o");
    let mut args = train_args(&data, &out, "1");
    args.extend(["--ablate", "plain-gat"].map(String::from));
    assert_eq!(run_owned(&args), 0);
    let snap = Snapshot::load(out.join("model.json")).unwrap();
    assert!(snap.motifs.is_empty());
    let attention = json(out.join("metrics.json"))["attention"].clone();
    assert_eq!(attention.as_array().unwrap().len(), 1);
}

#[test]
fn eval_reproduces_training_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 80, &[]);
    let out = dir.path().join("o");
    assert_eq!(run_owned(&train_args(&data, &out, "2")), 0);
    let ev = dir.path().join("ev");
    let code = run(&[
        "eval",
        "--snapshot",
        s(&out.join("model.json")),
        "--graph",
        s(&data.join("edges.tsv")),
        "--features",
        s(&data.join("features.csv")),
        "--labels",
        s(&data.join("labels.tsv")),
        "--out",
        s(&ev),
    ]);
    assert_eq!(code, 0);
    let trained = json(out.join("metrics.json"));
    let evaluated = json(ev.join("metrics.json"));
    for key in ["accuracy", "auc", "ks", "loss", "splits"] {
        assert_eq!(trained[key], evaluated[key], "{key}");
    }
    let rows = fs::read_to_string(ev.join("predictions.tsv")).unwrap();
    assert_eq!(rows.lines().count(), 80);
}

#[test]
fn uniform_labels_give_no_heterophily_and_undefined_lift() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(dir.path(), 60, &[]);
    let labels = dir.path().join("ones.tsv");
    let text: String = fs::read_to_string(data.join("labels.tsv"))
        .unwrap()
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            format!("{}\t1\t{}\n", f[0], f[2])
        })
        .collect();
    fs::write(&labels, text).unwrap();
    let out = dir.path().join("o");
    assert_eq!(
        run(&["analyze", "--graph", s(&data.join("edges.tsv")), "--labels", s(&labels), "--out", s(&out)]),
        0
    );
    let a = json(out.join("analysis.json"));
    assert_eq!(a["original"]["heterophily"]["value"], 0.0);
    for g in std::iter::once(&a["original"]).chain(a["motifs"].as_array().unwrap()) {
        // no normal users, so the ratio has no denominator
        for key in ["lift_order1", "lift_order2"] {
            assert!(g[key]["value"].is_null(), "{} {key}", g["name"]);
            assert!(g[key]["undefined"].is_string(), "{} {key}", g["name"]);
        }
        if let Some(v) = g["heterophily"]["value"].as_f64() {
            assert_eq!(v, 0.0, "{}", g["name"]);
        }
    }
}

#[test]
fn planted_triangles_lower_heterophily() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    assert_eq!(run(&["synth", "--out", s(&data)]), 0);
    let out = dir.path().join("o");
    assert_eq!(
        run(&[
            "analyze",
            "--graph",
            s(&data.join("edges.tsv")),
            "--labels",
            s(&data.join("labels.tsv")),
            "--out",
            s(&out),
        ]),
        0
    );
    let a = json(out.join("analysis.json"));
    let original = a["original"]["heterophily"]["value"].as_f64().unwrap();
    let catalog = MotifCatalog::build();
    let best = a["motifs"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|m| catalog.class(m["k"].as_u64().unwrap() as usize).unwrap().contains_triangle)
        .filter(|m| m["instance_count"].as_u64().unwrap() >= 20)
        .filter_map(|m| m["heterophily"]["value"].as_f64())
        .fold(f64::INFINITY, f64::min);
    assert!(best < original, "best triangle class {best} vs original {original}");
}

#[test]
fn synth_is_byte_identical_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        assert_eq!(run(&["synth", "--out", s(out), "--n", "150", "--seed", "3"]), 0);
    }
    for f in ["edges.tsv", "features.csv", "labels.tsv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let (g, _) = load_graph(a.join("edges.tsv")).unwrap();
    assert_eq!(g.node_count(), 150);
    let labels = load_labels(a.join("labels.tsv"), &g, Task::Binary).unwrap();
    assert_eq!(labels.labeled_count(), 150);
}

#[test]
fn without_planted_signal_motifs_do_not_help() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_data(
        dir.path(),
        600,
        &["--signal", "0", "--set", "base_rate=0.3", "--set", "edge_prob=0.005"],
    );
    let mut aucs = Vec::new();
    for ablate in [None, Some("plain-gat")] {
        let out = dir.path().join(ablate.unwrap_or("full"));
        let mut args: Vec<String> = train_args(&data, &out, "30")
            .into_iter()
            .map(|a| if a == "1,4,9" { "5,9".into() } else { a })
            .collect();
        args.extend(["--seed", "3"].map(String::from));
        if let Some(a) = ablate {
            args.extend(["--ablate".to_string(), a.to_string()]);
        }
        assert_eq!(run_owned(&args), 0);
        aucs.push(json(out.join("metrics.json"))["auc"]["value"].as_f64().unwrap());
    }
    assert!((aucs[0] - aucs[1]).abs() < 0.1, "full {} vs plain {}", aucs[0], aucs[1]);
}
