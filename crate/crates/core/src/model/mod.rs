//! Multi-view attention network: one GAT stack per view, motif gates, and
//! attentional fusion feeding an MLP head.

mod forward;
pub mod layers;
mod params;
mod snapshot;
mod views;

use serde::{Deserialize, Serialize};

pub use forward::{ForwardPass, GraphInputs, HeadVars, MotifGnn, Objective};
pub use params::{HeadSlots, LayerSlots, Layout, Params, ViewSlots};
pub use snapshot::{Snapshot, SNAPSHOT_VERSION};
pub use views::{ViewEdges, ViewSet};

use crate::encoder::EncoderConfig;
use crate::error::{Error, Result};
use crate::graph::{Direction, Task};

/// Architecture variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Gated motif views with attentional fusion.
    #[default]
    Full,
    /// Motif views fused directly, without the gate or the concatenation.
    NoGate,
    /// Original graph only.
    PlainGat,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "no-gate" => Ok(Variant::NoGate),
            "plain-gat" => Ok(Variant::PlainGat),
            other => Err(Error::Value(format!("variant must be full|no-gate|plain-gat, got {other:?}"))),
        }
    }
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoGate => "no-gate",
            Variant::PlainGat => "plain-gat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMode {
    #[default]
    Learned,
    /// Constant equal weights; α is identical for every node.
    Uniform,
}

impl std::str::FromStr for FusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "learned" => Ok(FusionMode::Learned),
            "uniform" => Ok(FusionMode::Uniform),
            other => Err(Error::Value(format!("fusion must be learned|uniform, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub encoder: EncoderConfig,
    pub hidden_dim: usize,
    pub layers: usize,
    pub attn_dim: usize,
    pub mlp_hidden: usize,
    pub variant: Variant,
    pub fusion: FusionMode,
    /// Neighbors aggregated in the original-graph view.
    pub direction: Direction,
    pub task: Task,
    pub num_classes: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            encoder: EncoderConfig::default(),
            hidden_dim: 64,
            layers: 2,
            attn_dim: 16,
            mlp_hidden: 64,
            variant: Variant::Full,
            fusion: FusionMode::Learned,
            direction: Direction::In,
            task: Task::Binary,
            num_classes: 2,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        for (name, v) in [
            ("hidden_dim", self.hidden_dim),
            ("layers", self.layers),
            ("attn_dim", self.attn_dim),
            ("mlp_hidden", self.mlp_hidden),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.num_classes < 2 {
            return Err(Error::Config(format!("num_classes must be at least 2, got {}", self.num_classes)));
        }
        if self.task == Task::Binary && self.num_classes != 2 {
            return Err(Error::Config("binary task needs num_classes = 2".into()));
        }
        Ok(())
    }
}
