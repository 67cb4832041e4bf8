//! Planted-motif synthetic datasets.
//!
//! A sparse random digraph gets a set of seed users who are recognizable
//! from one behavior feature. Each seed is placed in a few directed
//! triangles and also sends extra plain edges to random users. Users that
//! share a triangle with a seed default at an elevated rate, so the
//! triangle structure carries label signal that plain adjacency to a seed
//! does not.

use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{split_labels, write_dataset, DirectedGraph, FeatureGroup, FeatureTable, LabelSet, SplitPlan, Task};
use crate::motif::{enumerate_instances, MotifCatalog};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    /// Probability of each background directed edge.
    pub edge_prob: f64,
    /// Fraction of users that are seeds.
    pub seed_rate: f64,
    pub triangles_per_seed: usize,
    /// Plain out-edges from each seed to random users.
    pub seed_fanout: usize,
    pub base_rate: f64,
    /// Extra default probability for seeds and their triangle partners.
    pub signal: f64,
    /// Mean shift of the seed-marker feature for seeds.
    pub marker_shift: f64,
    /// Mean shift of the profile features for defaulters.
    pub feature_signal: f64,
    pub train_frac: f64,
    pub valid_frac: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            edge_prob: 0.002,
            seed_rate: 0.06,
            triangles_per_seed: 3,
            seed_fanout: 6,
            base_rate: 0.05,
            signal: 0.85,
            marker_shift: 2.0,
            feature_signal: 0.3,
            train_frac: 0.6,
            valid_frac: 0.2,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {x}")))
            }
        };
        if self.n < 3 {
            return Err(Error::Config(format!("n must be at least 3, got {}", self.n)));
        }
        unit("edge_prob", self.edge_prob)?;
        unit("seed_rate", self.seed_rate)?;
        unit("base_rate", self.base_rate)?;
        unit("signal", self.signal)?;
        unit("train_frac", self.train_frac)?;
        unit("valid_frac", self.valid_frac)?;
        if self.base_rate + self.signal > 1.0 {
            return Err(Error::Config("base_rate + signal must not exceed 1".into()));
        }
        if self.train_frac + self.valid_frac > 1.0 || self.train_frac == 0.0 {
            return Err(Error::Config("need 0 < train_frac and train_frac + valid_frac <= 1".into()));
        }
        for (name, x) in [("marker_shift", self.marker_shift), ("feature_signal", self.feature_signal)] {
            if !x.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Graph, features and labels of one generated dataset.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub graph: DirectedGraph,
    pub features: FeatureTable,
    pub labels: LabelSet,
    pub seeds: Vec<usize>,
    /// Users sharing a triangle with a seed.
    pub exposed: Vec<bool>,
}

pub fn generate(config: &SynthConfig) -> Result<SynthDataset> {
    config.validate()?;
    let n = config.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.random_bool(config.edge_prob) {
                edges.push((s, t));
            }
        }
    }
    let users: Vec<usize> = (0..n).collect();
    let seed_count = ((n as f64 * config.seed_rate).round() as usize).min(n);
    let mut seeds: Vec<usize> = users.choose_multiple(&mut rng, seed_count).copied().collect();
    seeds.sort_unstable();
    let mut is_seed = vec![false; n];
    for &s in &seeds {
        is_seed[s] = true;
    }
    for &s in &seeds {
        for _ in 0..config.triangles_per_seed {
            let (a, b) = loop {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                if a != b && a != s && b != s {
                    break (a, b);
                }
            };
            // cyclic or transitive orientation
            if rng.random_bool(0.5) {
                edges.extend([(s, a), (a, b), (b, s)]);
            } else {
                edges.extend([(s, a), (s, b), (a, b)]);
            }
        }
        for _ in 0..config.seed_fanout {
            let t = rng.random_range(0..n);
            if t != s {
                edges.push((s, t));
            }
        }
    }
    // every user needs an edge to appear in the edge file
    let mut touched = vec![false; n];
    for &(s, t) in &edges {
        touched[s] = true;
        touched[t] = true;
    }
    for u in 0..n {
        if !touched[u] {
            let t = loop {
                let t = rng.random_range(0..n);
                if t != u {
                    break t;
                }
            };
            edges.push((u, t));
        }
    }
    let ids: Vec<String> = (0..n).map(|u| format!("u{u:05}")).collect();
    let (graph, _) = DirectedGraph::from_edges(ids, &edges)?;

    let catalog = MotifCatalog::build();
    let census = enumerate_instances(&catalog, &graph);
    let mut exposed = vec![false; n];
    for class in catalog.classes().iter().filter(|c| c.contains_triangle) {
        for t in census.instances(class.index)? {
            if t.iter().any(|&x| is_seed[x as usize]) {
                for &x in t {
                    exposed[x as usize] = true;
                }
            }
        }
    }

    let mut y = vec![0usize; n];
    for u in 0..n {
        let p = config.base_rate + if exposed[u] || is_seed[u] { config.signal } else { 0.0 };
        y[u] = usize::from(rng.random_bool(p.min(1.0)));
    }

    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let names = [
        "profile_age",
        "profile_income",
        "behavior_marker",
        "behavior_activity",
        "loan_amount",
        "loan_term",
    ];
    let groups = [
        FeatureGroup::Profile,
        FeatureGroup::Profile,
        FeatureGroup::Behavior,
        FeatureGroup::Behavior,
        FeatureGroup::Loan,
        FeatureGroup::Loan,
    ];
    let mut values = Vec::with_capacity(n * names.len());
    for u in 0..n {
        let d = y[u] as f64 * config.feature_signal;
        let m = if is_seed[u] { config.marker_shift } else { 0.0 };
        let row = [d, -d, m, 0.0, d, 0.0];
        values.extend(row.iter().map(|shift| shift + noise.sample(&mut rng)));
    }
    let features = FeatureTable::new(
        Tensor::from_vec(n, names.len(), values)?,
        names.iter().map(|s| s.to_string()).collect(),
        groups.to_vec(),
    )?;

    let plan = SplitPlan {
        train: config.train_frac,
        valid: config.valid_frac,
        seed: config.seed,
    };
    let labels = split_labels(&y, Task::Binary, plan)?;
    Ok(SynthDataset {
        graph,
        features,
        labels,
        seeds,
        exposed,
    })
}

impl SynthDataset {
    /// Writes `edges.tsv`, `features.csv` and `labels.tsv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_dataset(dir, &self.graph, &self.features, &self.labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_features, load_graph, load_labels, EDGE_FILE, FEATURE_FILE, LABEL_FILE};

    fn small() -> SynthConfig {
        SynthConfig {
            n: 200,
            edge_prob: 0.01,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn same_seed_same_files() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        generate(&small()).unwrap().write(a.path()).unwrap();
        generate(&small()).unwrap().write(b.path()).unwrap();
        for f in [EDGE_FILE, FEATURE_FILE, LABEL_FILE] {
            assert_eq!(
                std::fs::read(a.path().join(f)).unwrap(),
                std::fs::read(b.path().join(f)).unwrap()
            );
        }
    }

    #[test]
    fn files_load_back() {
        let dir = tempfile::tempdir().unwrap();
        let data = generate(&small()).unwrap();
        data.write(dir.path()).unwrap();
        let (g, _) = load_graph(dir.path().join(EDGE_FILE)).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (200, data.graph.edge_count()));
        let f = load_features(dir.path().join(FEATURE_FILE), &g).unwrap();
        assert_eq!(f.shape(), (200, 6));
        assert_eq!(f.imputed_rows(), 0);
        let l = load_labels(dir.path().join(LABEL_FILE), &g, Task::Binary).unwrap();
        assert_eq!(l.labeled_count(), 200);
        for u in 0..200 {
            let v = g.index_of(data.graph.id(u)).unwrap();
            assert_eq!(l.label(v), data.labels.label(u));
            assert_eq!(f.values().row(v), data.features.values().row(u));
        }
    }

    #[test]
    fn seeds_sit_in_triangles() {
        let data = generate(&small()).unwrap();
        for &s in &data.seeds {
            assert!(data.exposed[s]);
        }
    }

    #[test]
    fn bad_parameters_are_config_errors() {
        for cfg in [
            SynthConfig { n: 2, ..small() },
            SynthConfig { edge_prob: 1.5, ..small() },
            SynthConfig { base_rate: 0.6, signal: 0.6, ..small() },
        ] {
            assert!(matches!(generate(&cfg), Err(Error::Config(_))));
        }
    }
}
