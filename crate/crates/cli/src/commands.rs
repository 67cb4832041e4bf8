use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use motifgnn::encoder::InputEncoder;
use motifgnn::graph::{
    load_features, load_graph, load_labels, DirectedGraph, FeatureTable, LabelSet,
    Split, Task,
};
use motifgnn::model::{MotifGnn, Snapshot, Variant, ViewSet};
use motifgnn::motif::{
    bad_rate_lift, brute_force_census, build_motif_adjacencies, edge_retention, enumerate_instances,
    graph_heterophily, heterophily_ratio, motif_bad_rate_lift, CensusReport, MotifAdjacency, MotifCatalog,
    TriadCensus,
};
use motifgnn::synth::generate;
use motifgnn::train::{attention_report, split_metrics, train, view_names, AttentionSummary, MetricsReport, SplitMetrics};
use motifgnn::Measure;
use serde::Serialize;

use crate::config::RunConfig;
use crate::{Base, CliError, Command, MotifArgs};

/// Largest graph accepted by `census --brute-force`.
const BRUTE_FORCE_LIMIT: usize = 400;

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Census {
            base,
            graph,
            motif,
            participation,
            brute_force,
        } => {
            let cfg = resolve(&base, &[("graph", path_value(&graph))], Some(&motif))?;
            census(&cfg, participation, brute_force)
        }
        Command::Build { base, graph, motif } => {
            let cfg = resolve(&base, &[("graph", path_value(&graph))], Some(&motif))?;
            build(&cfg)
        }
        Command::Train {
            base,
            graph,
            features,
            labels,
            motif,
            seeds,
            epochs,
            task,
            ablate,
        } => {
            let mut flags = vec![
                ("graph", path_value(&graph)),
                ("features", path_value(&features)),
                ("labels", path_value(&labels)),
                ("seeds", seeds.map(|s| s.to_string())),
                ("epochs", epochs.map(|e| e.to_string())),
                ("task", task),
            ];
            match ablate.as_deref() {
                None => {}
                Some("plain-gat") => flags.extend([("variant", Some("plain-gat".into())), ("motifs", Some("none".into()))]),
                Some("no-gate") => flags.push(("variant", Some("no-gate".into()))),
                Some("no-curriculum") => flags.push(("curriculum", Some("false".into()))),
                Some(other) => {
                    return Err(CliError::Usage(format!(
                        "--ablate expects plain-gat|no-gate|no-curriculum, got {other:?}"
                    )))
                }
            }
            let cfg = resolve(&base, &flags, Some(&motif))?;
            train_cmd(&cfg)
        }
        Command::Eval {
            base,
            snapshot,
            graph,
            features,
            labels,
        } => {
            let flags = [
                ("graph", path_value(&graph)),
                ("features", path_value(&features)),
                ("labels", path_value(&labels)),
            ];
            let cfg = resolve(&base, &flags, None)?;
            eval(&cfg, &snapshot)
        }
        Command::Analyze {
            base,
            graph,
            labels,
            motif,
        } => {
            let flags = [("graph", path_value(&graph)), ("labels", path_value(&labels))];
            let cfg = resolve(&base, &flags, Some(&motif))?;
            analyze(&cfg)
        }
        Command::Synth { base, n, signal } => {
            let flags = [("n", n.map(|v| v.to_string())), ("signal", signal.map(|v| v.to_string()))];
            let cfg = resolve(&base, &flags, None)?;
            synth(&cfg)
        }
    }
}

fn path_value(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

/// Defaults, then the config file, then `--set`, then dedicated flags.
fn resolve(base: &Base, flags: &[(&str, Option<String>)], motif: Option<&MotifArgs>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &base.config {
        cfg.apply_file(path)?;
    }
    for item in &base.set {
        let Some((k, v)) = item.split_once('=') else {
            return Err(CliError::Usage(format!("--set expects KEY=VALUE, got {item:?}")));
        };
        cfg.set(k.trim(), v)?;
    }
    let mut all: Vec<(&str, Option<String>)> = flags.to_vec();
    all.push(("out", path_value(&base.out)));
    all.push(("seed", base.seed.map(|s| s.to_string())));
    if let Some(m) = motif {
        all.push(("motifs", m.motifs.clone()));
        all.push(("semantics", m.semantics.clone()));
    }
    for (k, v) in all {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    Ok(cfg)
}

fn require<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
    let path = p
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("missing --{key} (or `{key}` in the config)")))?;
    if !path.exists() {
        return Err(CliError::Usage(format!("{key} file {} does not exist", path.display())));
    }
    Ok(path)
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("missing --out (or `out` in the config)".into()))?;
    std::fs::create_dir_all(&dir).map_err(|e| motifgnn::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| {
        CliError::Core(motifgnn::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(motifgnn::Error::from)?;
    text.push('\n');
    write_text(path, &text)
}

fn write_resolved(dir: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    write_text(&dir.join("config.resolved"), &cfg.resolved())
}

fn read_graph(cfg: &RunConfig) -> Result<DirectedGraph, CliError> {
    let path = require(&cfg.graph, "graph")?;
    let (graph, stats) = load_graph(path)?;
    if stats.self_loops + stats.duplicates > 0 {
        eprintln!(
            "warning: dropped {} self-loops and {} duplicate edges",
            stats.self_loops, stats.duplicates
        );
    }
    Ok(graph)
}

fn read_labels(cfg: &RunConfig, graph: &DirectedGraph, task: Task) -> Result<LabelSet, CliError> {
    Ok(load_labels(require(&cfg.labels, "labels")?, graph, task)?)
}

fn read_features(cfg: &RunConfig, graph: &DirectedGraph) -> Result<FeatureTable, CliError> {
    let table = load_features(require(&cfg.features, "features")?, graph)?;
    if table.imputed_rows() > 0 {
        eprintln!("warning: {} nodes had no feature row; filled with column medians", table.imputed_rows());
    }
    Ok(table)
}

fn adjacencies(cfg: &RunConfig, graph: &DirectedGraph, census: &TriadCensus) -> Result<Vec<MotifAdjacency>, CliError> {
    Ok(build_motif_adjacencies(graph, census, &cfg.motifs, cfg.semantics)?)
}

fn census(cfg: &RunConfig, participation: bool, brute_force: bool) -> Result<(), CliError> {
    let dir = out_dir(cfg)?;
    write_resolved(&dir, cfg)?;
    let graph = read_graph(cfg)?;
    let catalog = MotifCatalog::build();
    let census = if brute_force {
        if graph.node_count() > BRUTE_FORCE_LIMIT {
            return Err(CliError::Usage(format!(
                "--brute-force is limited to {BRUTE_FORCE_LIMIT} nodes, graph has {}",
                graph.node_count()
            )));
        }
        brute_force_census(&catalog, &graph)
    } else {
        enumerate_instances(&catalog, &graph)
    };
    let mut report = CensusReport::new(&catalog, &graph, &census, participation);
    if graph.edge_count() > 0 {
        for adj in adjacencies(cfg, &graph, &census)? {
            report.classes[adj.k() - 1].edge_retention = Some(edge_retention(&graph, &adj));
        }
    }
    write_json(&dir.join("census.json"), &report)?;
    println!("{} nodes, {} edges, {} connected triples", report.node_count, report.edge_count, report.total_instances);
    println!("{:>3}  {:<5} {:>4} {:>10}  {:>9}", "k", "class", "code", "instances", "retention");
    for c in &report.classes {
        let retention = c.edge_retention.as_ref().map_or("-".to_owned(), Measure::to_string);
        println!(
            "{:>3}  {:<5} {:>4} {:>10}  {:>9}",
            c.index, c.name, c.canonical_code, c.instance_count, retention
        );
    }
    Ok(())
}

fn build(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = out_dir(cfg)?;
    write_resolved(&dir, cfg)?;
    let graph = read_graph(cfg)?;
    let catalog = MotifCatalog::build();
    let census = enumerate_instances(&catalog, &graph);
    write_json(&dir.join("census.json"), &CensusReport::new(&catalog, &graph, &census, false))?;
    for adj in adjacencies(cfg, &graph, &census)? {
        let path = dir.join(format!("motif_{}.tsv", adj.k()));
        let file = std::fs::File::create(&path).map_err(|e| motifgnn::Error::Io {
            path: path.clone(),
            source: e,
        })?;
        adj.write_tsv(std::io::BufWriter::new(file), graph.ids())
            .map_err(|e| motifgnn::Error::Io { path, source: e })?;
        println!(
            "motif {:>2} ({}): {} directed pairs over {} nodes",
            adj.k(),
            catalog.class(adj.k())?.name,
            adj.off_diagonal_count(),
            adj.covered_nodes()
        );
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct MeanStd {
    mean: Option<f64>,
    std: Option<f64>,
    /// Seeds with a defined value.
    count: usize,
}

fn mean_std(values: &[Measure]) -> MeanStd {
    let v: Vec<f64> = values.iter().filter_map(Measure::value).collect();
    if v.is_empty() {
        return MeanStd {
            mean: None,
            std: None,
            count: 0,
        };
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    MeanStd {
        mean: Some(mean),
        std: Some(var.sqrt()),
        count: v.len(),
    }
}

#[derive(Debug, Serialize)]
struct SeedSummary<'a> {
    seeds: Vec<u64>,
    summary: BTreeMap<&'static str, MeanStd>,
    runs: &'a [MetricsReport],
}

fn train_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let mut cfg = cfg.clone();
    if cfg.model.variant == Variant::PlainGat && !cfg.motifs.is_empty() {
        cfg.motifs.clear();
    }
    if cfg.seeds == 0 {
        return Err(CliError::Usage("seeds must be at least 1".into()));
    }
    let dir = out_dir(&cfg)?;
    let graph = read_graph(&cfg)?;
    let table = read_features(&cfg, &graph)?;
    let labels = read_labels(&cfg, &graph, cfg.model.task)?;
    if cfg.model.task == Task::Multiclass {
        cfg.model.num_classes = labels.num_classes();
    }
    cfg.model.validate()?;
    cfg.train.validate()?;
    write_resolved(&dir, &cfg)?;

    let catalog = MotifCatalog::build();
    let census = enumerate_instances(&catalog, &graph);
    let adjs = adjacencies(&cfg, &graph, &census)?;
    let views = ViewSet::build(&graph, cfg.model.direction, &adjs)?;
    let train_rows = labels.nodes(Split::Train);
    if train_rows.is_empty() {
        return Err(CliError::Usage("the labels file has no train nodes".into()));
    }
    let encoder = InputEncoder::fit(&table, &train_rows, &cfg.model.encoder)?;
    let model = MotifGnn::new(cfg.model.clone(), encoder, views.len())?;
    let inputs = model.prepare(&table, views)?;

    let first = cfg.train.seed;
    let seeds: Vec<u64> = (0..cfg.seeds as u64).map(|i| first + i).collect();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for &seed in &seeds {
        let train_cfg = motifgnn::train::TrainConfig {
            seed,
            ..cfg.train.clone()
        };
        let outcome = train(&model, &inputs, &labels, &train_cfg, model.init_params(seed))?;
        let run_dir = if seeds.len() == 1 {
            dir.clone()
        } else {
            let d = dir.join(format!("seed_{seed}"));
            std::fs::create_dir_all(&d).map_err(|e| motifgnn::Error::Io {
                path: d.clone(),
                source: e,
            })?;
            d
        };
        Snapshot::new(&model, &cfg.motifs, cfg.semantics, &outcome.params).save(run_dir.join("model.json"))?;
        write_json(&run_dir.join("metrics.json"), &outcome.report)?;
        let r = &outcome.report;
        println!(
            "seed {seed}: {} epochs (best {}), test accuracy {} auc {} ks {}",
            r.epochs_run, r.best_epoch, r.accuracy, r.auc, r.ks
        );
        if let Some(d) = &r.divergence {
            failures.push(format!("seed {seed}: {d}"));
        }
        reports.push(outcome.report);
    }
    if seeds.len() > 1 {
        let pick = |f: fn(&MetricsReport) -> &Measure| reports.iter().map(|r| f(r).clone()).collect::<Vec<_>>();
        let summary: BTreeMap<&'static str, MeanStd> = [
            ("accuracy", mean_std(&pick(|r| &r.accuracy))),
            ("auc", mean_std(&pick(|r| &r.auc))),
            ("ks", mean_std(&pick(|r| &r.ks))),
            ("loss", mean_std(&pick(|r| &r.loss))),
        ]
        .into_iter()
        .collect();
        for (name, m) in &summary {
            if let (Some(mean), Some(std)) = (m.mean, m.std) {
                println!("{name}: {mean:.4} ± {std:.4} over {} seeds", m.count);
            }
        }
        write_json(
            &dir.join("metrics.json"),
            &SeedSummary {
                seeds: seeds.clone(),
                summary,
                runs: &reports,
            },
        )?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "training diverged ({}); the last good parameters were saved",
            failures.join("; ")
        )))
    }
}

#[derive(Debug, Serialize)]
struct EvalReport {
    task: Task,
    accuracy: Measure,
    auc: Measure,
    ks: Measure,
    loss: Measure,
    splits: BTreeMap<String, SplitMetrics>,
    attention: Vec<AttentionSummary>,
}

fn eval(cfg: &RunConfig, snapshot: &Path) -> Result<(), CliError> {
    let dir = out_dir(cfg)?;
    write_resolved(&dir, cfg)?;
    if !snapshot.exists() {
        return Err(CliError::Usage(format!("snapshot {} does not exist", snapshot.display())));
    }
    let snap = Snapshot::load(snapshot)?;
    let (model, params) = snap.restore()?;
    let graph = read_graph(cfg)?;
    let table = read_features(cfg, &graph)?;
    let task = model.config().task;
    let labels = read_labels(cfg, &graph, task)?;
    let catalog = MotifCatalog::build();
    let census = enumerate_instances(&catalog, &graph);
    let adjs = build_motif_adjacencies(&graph, &census, &snap.motifs, snap.semantics)?;
    let views = ViewSet::build(&graph, model.config().direction, &adjs)?;
    let inputs = model.prepare(&table, views)?;
    let pass = model.forward(&params, &inputs)?;

    let splits: BTreeMap<String, SplitMetrics> = [Split::Train, Split::Valid, Split::Test]
        .into_iter()
        .map(|s| (s.as_str().to_owned(), split_metrics(task, &pass.output, &labels, s)))
        .collect();
    let test = splits["test"].clone();
    let report = EvalReport {
        task,
        accuracy: test.accuracy,
        auc: test.auc,
        ks: test.ks,
        loss: test.loss,
        splits,
        attention: attention_report(&pass.alpha, &view_names(&snap.motifs)),
    };
    write_json(&dir.join("metrics.json"), &report)?;
    let mut text = String::new();
    for u in 0..graph.node_count() {
        let probs: Vec<String> = pass.output.row(u).iter().map(|p| p.to_string()).collect();
        text.push_str(&format!("{}\t{}\n", graph.id(u), probs.join("\t")));
    }
    write_text(&dir.join("predictions.tsv"), &text)?;
    println!(
        "test accuracy {} auc {} ks {} loss {}",
        report.accuracy, report.auc, report.ks, report.loss
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct GraphStats {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance_count: Option<u64>,
    lift_order1: Measure,
    lift_order2: Measure,
    heterophily: Measure,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_retention: Option<Measure>,
}

#[derive(Debug, Serialize)]
struct Analysis {
    direction: motifgnn::graph::Direction,
    semantics: motifgnn::motif::Semantics,
    original: GraphStats,
    motifs: Vec<GraphStats>,
}

fn analyze(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = out_dir(cfg)?;
    write_resolved(&dir, cfg)?;
    let graph = read_graph(cfg)?;
    let labels = read_labels(cfg, &graph, cfg.model.task)?;
    let direction = cfg.model.direction;
    let original = GraphStats {
        name: "original".into(),
        k: None,
        instance_count: None,
        lift_order1: bad_rate_lift(&graph, &labels, 1, direction)?,
        lift_order2: bad_rate_lift(&graph, &labels, 2, direction)?,
        heterophily: graph_heterophily(&graph, &labels),
        edge_retention: None,
    };
    let catalog = MotifCatalog::build();
    let census = enumerate_instances(&catalog, &graph);
    let motifs = adjacencies(cfg, &graph, &census)?
        .iter()
        .map(|adj| {
            Ok(GraphStats {
                name: format!("motif{} ({})", adj.k(), catalog.class(adj.k())?.name),
                k: Some(adj.k()),
                instance_count: Some(census.count(adj.k())?),
                lift_order1: motif_bad_rate_lift(adj, &labels, 1)?,
                lift_order2: motif_bad_rate_lift(adj, &labels, 2)?,
                heterophily: heterophily_ratio(adj.rows(), &labels),
                edge_retention: Some(edge_retention(&graph, adj)),
            })
        })
        .collect::<motifgnn::Result<Vec<_>>>()?;
    let analysis = Analysis {
        direction,
        semantics: cfg.semantics,
        original,
        motifs,
    };
    write_json(&dir.join("analysis.json"), &analysis)?;
    println!("{:<16} {:>8} {:>8} {:>11}", "graph", "lift1", "lift2", "heterophily");
    for g in std::iter::once(&analysis.original).chain(&analysis.motifs) {
        println!(
            "{:<16} {:>8} {:>8} {:>11}",
            g.name,
            g.lift_order1.to_string(),
            g.lift_order2.to_string(),
            g.heterophily.to_string()
        );
    }
    Ok(())
}

fn synth(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = out_dir(cfg)?;
    write_resolved(&dir, cfg)?;
    let data = generate(&cfg.synth)?;
    data.write(&dir)?;
    let defaults = (0..data.graph.node_count())
        .filter(|&u| data.labels.label(u) == Some(1))
        .count();
    println!(
        "{} nodes, {} edges, {} seeds, {} users in seed triangles, default rate {:.3}",
        data.graph.node_count(),
        data.graph.edge_count(),
        data.seeds.len(),
        data.exposed.iter().filter(|&&e| e).count(),
        defaults as f64 / data.graph.node_count() as f64
    );
    Ok(())
}
