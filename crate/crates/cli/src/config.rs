//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use motifgnn::encoder::InputMode;
use motifgnn::graph::{Direction, Task};
use motifgnn::model::{FusionMode, ModelConfig, Variant};
use motifgnn::motif::{Semantics, NUM_CLASSES};
use motifgnn::synth::SynthConfig;
use motifgnn::train::TrainConfig;

use crate::CliError;

/// Every setting a command can read. Unset paths stay `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Motif classes used as views, 1-based.
    pub motifs: Vec<usize>,
    pub semantics: Semantics,
    pub seeds: usize,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            graph: None,
            features: None,
            labels: None,
            out: None,
            motifs: (1..=NUM_CLASSES).collect(),
            semantics: Semantics::default(),
            seeds: 1,
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

/// Keys in the order they are written to `config.resolved`.
pub const KEYS: &[&str] = &[
    "graph",
    "features",
    "labels",
    "out",
    "motifs",
    "semantics",
    "seed",
    "seeds",
    "input_mode",
    "buckets",
    "embed_dim_profile",
    "embed_dim_behavior",
    "embed_dim_loan",
    "hidden_dim",
    "layers",
    "attn_dim",
    "mlp_hidden",
    "variant",
    "fusion",
    "direction",
    "task",
    "lr",
    "epochs",
    "batch_size",
    "lambda_reg",
    "rescale_beta",
    "beta_stop_gradient",
    "curriculum",
    "patience",
    "n",
    "edge_prob",
    "seed_rate",
    "triangles_per_seed",
    "seed_fanout",
    "base_rate",
    "signal",
    "marker_shift",
    "feature_signal",
    "train_frac",
    "valid_frac",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("{key}: cannot parse {value:?}")))
}

fn parse_with<T>(key: &str, value: &str, f: impl FnOnce(&str) -> motifgnn::Result<T>) -> Result<T, CliError> {
    f(value).map_err(|e| CliError::Usage(format!("{key}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(CliError::Usage(format!("{key}: expected true or false, got {value:?}"))),
    }
}

/// `all`, `none` or a comma list such as `1,4-7,13`.
pub fn parse_motifs(value: &str) -> Result<Vec<usize>, CliError> {
    let bad = |msg: String| CliError::Usage(format!("motifs: {msg}"));
    match value.trim() {
        "all" => return Ok((1..=NUM_CLASSES).collect()),
        "none" | "" => return Ok(Vec::new()),
        _ => {}
    }
    let mut ks = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (part, part),
        };
        let lo: usize = lo.parse().map_err(|_| bad(format!("cannot parse {part:?}")))?;
        let hi: usize = hi.parse().map_err(|_| bad(format!("cannot parse {part:?}")))?;
        if lo == 0 || hi > NUM_CLASSES || lo > hi {
            return Err(bad(format!("{part:?} is outside 1..{NUM_CLASSES}")));
        }
        ks.extend(lo..=hi);
    }
    ks.sort_unstable();
    ks.dedup();
    Ok(ks)
}

fn motif_list(ks: &[usize]) -> String {
    if ks.is_empty() {
        "none".into()
    } else {
        ks.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }
}

fn path_str(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

impl RunConfig {
    /// Applies one setting; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        let path = || (!value.is_empty()).then(|| PathBuf::from(value));
        let m = &mut self.model;
        let t = &mut self.train;
        let s = &mut self.synth;
        match key {
            "graph" => self.graph = path(),
            "features" => self.features = path(),
            "labels" => self.labels = path(),
            "out" => self.out = path(),
            "motifs" => self.motifs = parse_motifs(value)?,
            "semantics" => self.semantics = parse_with(key, value, Semantics::from_str)?,
            "seed" => {
                t.seed = parse(key, value)?;
                s.seed = t.seed;
            }
            "seeds" => self.seeds = parse(key, value)?,
            "input_mode" => {
                m.encoder.mode = match value {
                    "bucketized" => InputMode::Bucketized,
                    "passthrough" => InputMode::Passthrough,
                    _ => return Err(CliError::Usage(format!("input_mode: expected bucketized|passthrough, got {value:?}"))),
                }
            }
            "buckets" => m.encoder.buckets = parse(key, value)?,
            "embed_dim_profile" => m.encoder.embed_dim_profile = parse(key, value)?,
            "embed_dim_behavior" => m.encoder.embed_dim_behavior = parse(key, value)?,
            "embed_dim_loan" => m.encoder.embed_dim_loan = parse(key, value)?,
            "hidden_dim" => m.hidden_dim = parse(key, value)?,
            "layers" => m.layers = parse(key, value)?,
            "attn_dim" => m.attn_dim = parse(key, value)?,
            "mlp_hidden" => m.mlp_hidden = parse(key, value)?,
            "variant" => m.variant = parse_with(key, value, Variant::from_str)?,
            "fusion" => m.fusion = parse_with(key, value, FusionMode::from_str)?,
            "direction" => m.direction = parse_with(key, value, Direction::from_str)?,
            "task" => m.task = parse_with(key, value, Task::from_str)?,
            "lr" => t.lr = parse(key, value)?,
            "epochs" => t.epochs = parse(key, value)?,
            "batch_size" => t.batch_size = parse(key, value)?,
            "lambda_reg" => t.lambda_reg = parse(key, value)?,
            "rescale_beta" => t.rescale_beta = parse_bool(key, value)?,
            "beta_stop_gradient" => t.beta_stop_gradient = parse_bool(key, value)?,
            "curriculum" => t.curriculum = parse_bool(key, value)?,
            "patience" => t.patience = parse(key, value)?,
            "n" => s.n = parse(key, value)?,
            "edge_prob" => s.edge_prob = parse(key, value)?,
            "seed_rate" => s.seed_rate = parse(key, value)?,
            "triangles_per_seed" => s.triangles_per_seed = parse(key, value)?,
            "seed_fanout" => s.seed_fanout = parse(key, value)?,
            "base_rate" => s.base_rate = parse(key, value)?,
            "signal" => s.signal = parse(key, value)?,
            "marker_shift" => s.marker_shift = parse(key, value)?,
            "feature_signal" => s.feature_signal = parse(key, value)?,
            "train_frac" => s.train_frac = parse(key, value)?,
            "valid_frac" => s.valid_frac = parse(key, value)?,
            other => return Err(CliError::Usage(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// Current value of `key` as written to `config.resolved`.
    pub fn get(&self, key: &str) -> Option<String> {
        let m = &self.model;
        let t = &self.train;
        let s = &self.synth;
        Some(match key {
            "graph" => path_str(&self.graph),
            "features" => path_str(&self.features),
            "labels" => path_str(&self.labels),
            "out" => path_str(&self.out),
            "motifs" => motif_list(&self.motifs),
            "semantics" => self.semantics.as_str().into(),
            "seed" => t.seed.to_string(),
            "seeds" => self.seeds.to_string(),
            "input_mode" => match m.encoder.mode {
                InputMode::Bucketized => "bucketized".into(),
                InputMode::Passthrough => "passthrough".into(),
            },
            "buckets" => m.encoder.buckets.to_string(),
            "embed_dim_profile" => m.encoder.embed_dim_profile.to_string(),
            "embed_dim_behavior" => m.encoder.embed_dim_behavior.to_string(),
            "embed_dim_loan" => m.encoder.embed_dim_loan.to_string(),
            "hidden_dim" => m.hidden_dim.to_string(),
            "layers" => m.layers.to_string(),
            "attn_dim" => m.attn_dim.to_string(),
            "mlp_hidden" => m.mlp_hidden.to_string(),
            "variant" => m.variant.as_str().into(),
            "fusion" => match m.fusion {
                FusionMode::Learned => "learned".into(),
                FusionMode::Uniform => "uniform".into(),
            },
            "direction" => match m.direction {
                Direction::In => "in".into(),
                Direction::Out => "out".into(),
                Direction::Both => "both".into(),
            },
            "task" => m.task.as_str().into(),
            "lr" => t.lr.to_string(),
            "epochs" => t.epochs.to_string(),
            "batch_size" => t.batch_size.to_string(),
            "lambda_reg" => t.lambda_reg.to_string(),
            "rescale_beta" => t.rescale_beta.to_string(),
            "beta_stop_gradient" => t.beta_stop_gradient.to_string(),
            "curriculum" => t.curriculum.to_string(),
            "patience" => t.patience.to_string(),
            "n" => s.n.to_string(),
            "edge_prob" => s.edge_prob.to_string(),
            "seed_rate" => s.seed_rate.to_string(),
            "triangles_per_seed" => s.triangles_per_seed.to_string(),
            "seed_fanout" => s.seed_fanout.to_string(),
            "base_rate" => s.base_rate.to_string(),
            "signal" => s.signal.to_string(),
            "marker_shift" => s.marker_shift.to_string(),
            "feature_signal" => s.feature_signal.to_string(),
            "train_frac" => s.train_frac.to_string(),
            "valid_frac" => s.valid_frac.to_string(),
            _ => return None,
        })
    }

    /// Applies a config file: one `key = value` per line, `#` comments.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected key = value, got {line:?}",
                    origin.display(),
                    i + 1
                )));
            };
            self.set(key.trim(), value).map_err(|e| match e {
                CliError::Usage(msg) => CliError::Usage(format!("{}:{}: {msg}", origin.display(), i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text, path)
    }

    /// The fully resolved configuration in file syntax.
    pub fn resolved(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).expect("listed key")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolved_text_round_trips() {
        let mut c = RunConfig::default();
        c.set("motifs", "2,5-7").unwrap();
        c.set("lr", "0.01").unwrap();
        c.set("graph", "g.tsv").unwrap();
        c.set("input_mode", "passthrough").unwrap();
        let mut back = RunConfig::default();
        back.apply_text(&c.resolved(), Path::new("x")).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.motifs, vec![2, 5, 6, 7]);
    }

    #[test]
    fn unknown_key_is_usage_error() {
        let err = RunConfig::default().apply_text("lr = 0.1\nlearning_rate = 2\n", Path::new("c.cfg"));
        match err {
            Err(CliError::Usage(msg)) => assert!(msg.contains("c.cfg:2") && msg.contains("learning_rate")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn motif_lists() {
        assert_eq!(parse_motifs("all").unwrap().len(), 13);
        assert!(parse_motifs("none").unwrap().is_empty());
        assert_eq!(parse_motifs("3, 1").unwrap(), vec![1, 3]);
        assert!(parse_motifs("0").is_err());
        assert!(parse_motifs("12-14").is_err());
    }

    #[test]
    fn every_key_is_settable() {
        let c = RunConfig::default();
        for k in KEYS {
            let mut d = RunConfig::default();
            d.set(k, &c.get(k).unwrap()).unwrap();
            assert_eq!(d, c, "{k}");
        }
    }
}
