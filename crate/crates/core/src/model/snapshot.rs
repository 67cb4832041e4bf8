use std::path::Path;

use serde::{Deserialize, Serialize};

use super::forward::MotifGnn;
use super::params::Params;
use super::ModelConfig;
use crate::encoder::InputEncoder;
use crate::error::{Error, Result};
use crate::motif::Semantics;
use crate::tensor::Tensor;

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub value: Tensor,
}

/// Self-describing model file: configuration, fitted encoder, view
/// selection and every parameter with its name and shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub version: u32,
    pub config: ModelConfig,
    pub encoder: InputEncoder,
    pub motifs: Vec<usize>,
    pub semantics: Semantics,
    pub params: Vec<NamedTensor>,
}

impl Snapshot {
    pub fn new(model: &MotifGnn, motifs: &[usize], semantics: Semantics, params: &Params) -> Self {
        Self {
            version: SNAPSHOT_VERSION,
            config: model.config().clone(),
            encoder: model.encoder().clone(),
            motifs: motifs.to_vec(),
            semantics,
            params: model
                .layout()
                .names
                .iter()
                .zip(&params.tensors)
                .map(|(name, value)| NamedTensor {
                    name: name.clone(),
                    value: value.clone(),
                })
                .collect(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let snap: Snapshot = serde_json::from_str(&text)?;
        if snap.version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!(
                "unsupported snapshot version {} (expected {SNAPSHOT_VERSION})",
                snap.version
            )));
        }
        Ok(snap)
    }

    /// Rebuilds the model it was saved from.
    pub fn restore(&self) -> Result<(MotifGnn, Params)> {
        let model = MotifGnn::new(self.config.clone(), self.encoder.clone(), self.motifs.len() + 1)?;
        let params = self.params_for(&model)?;
        Ok((model, params))
    }

    /// Parameters checked by name and shape against `model`.
    pub fn params_for(&self, model: &MotifGnn) -> Result<Params> {
        let layout = model.layout();
        if self.params.len() != layout.len() {
            return Err(Error::Snapshot(format!(
                "snapshot holds {} tensors, configuration needs {}",
                self.params.len(),
                layout.len()
            )));
        }
        for (i, p) in self.params.iter().enumerate() {
            if p.name != layout.names[i] {
                return Err(Error::Snapshot(format!(
                    "tensor {i} is {:?}, configuration expects {:?}",
                    p.name, layout.names[i]
                )));
            }
        }
        let params = Params {
            tensors: self.params.iter().map(|p| p.value.clone()).collect(),
        };
        params.check(layout)?;
        Ok(params)
    }
}
