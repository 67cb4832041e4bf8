use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ModelConfig, Variant};
use crate::error::{Error, Result};
use crate::graph::Task;
use crate::tensor::Tensor;

/// Parameter positions of one GAT layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSlots {
    pub w: usize,
    pub w_src: usize,
    pub w_dst: usize,
    pub v: usize,
}

/// Parameter positions of one view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewSlots {
    pub layers: Vec<LayerSlots>,
    /// `(W_g, b_g)`; only motif views of the gated model have one.
    pub gate: Option<(usize, usize)>,
    /// Fusion scoring vector; absent with a single view or uniform fusion.
    pub fuse: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeadSlots {
    pub w1: usize,
    pub b1: usize,
    pub w2: usize,
    pub b2: usize,
}

/// Names, shapes and positions of every parameter for a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub names: Vec<String>,
    pub shapes: Vec<(usize, usize)>,
    /// Included in the L2 penalty (everything except biases).
    pub decay: Vec<bool>,
    pub encoder: Vec<usize>,
    pub views: Vec<ViewSlots>,
    pub head: HeadSlots,
    /// Width of each per-view representation entering fusion.
    pub view_dim: usize,
}

impl Layout {
    /// `encoder_shapes` come from the fitted input encoder; `num_views`
    /// counts the original-graph view.
    pub fn new(
        config: &ModelConfig,
        encoder_shapes: &[(String, (usize, usize))],
        input_dim: usize,
        num_views: usize,
    ) -> Result<Self> {
        config.validate()?;
        if num_views == 0 {
            return Err(Error::Config("at least one view is required".into()));
        }
        if config.variant == Variant::PlainGat && num_views != 1 {
            return Err(Error::Config(format!("plain-gat uses one view, got {num_views}")));
        }
        let mut layout = Layout {
            names: Vec::new(),
            shapes: Vec::new(),
            decay: Vec::new(),
            encoder: Vec::new(),
            views: Vec::new(),
            head: HeadSlots { w1: 0, b1: 0, w2: 0, b2: 0 },
            view_dim: 0,
        };
        for (name, shape) in encoder_shapes {
            let i = layout.push(name.clone(), *shape, true);
            layout.encoder.push(i);
        }
        let d = config.hidden_dim;
        let gated = config.variant == Variant::Full;
        layout.view_dim = if config.variant == Variant::NoGate { d } else { 2 * d };
        let learned_fusion = num_views > 1 && config.fusion == super::FusionMode::Learned;
        for k in 0..num_views {
            let mut layers = Vec::new();
            let mut d_in = input_dim;
            for l in 0..config.layers {
                let p = |s: &str| format!("view{k}.layer{l}.{s}");
                layers.push(LayerSlots {
                    w: layout.push(p("w"), (d_in, d), true),
                    w_src: layout.push(p("w_src"), (d_in, config.attn_dim), true),
                    w_dst: layout.push(p("w_dst"), (d_in, config.attn_dim), true),
                    v: layout.push(p("v"), (config.attn_dim, 1), true),
                });
                d_in = d;
            }
            let gate = (gated && k > 0).then(|| {
                (
                    layout.push(format!("view{k}.gate.w"), (d, d), true),
                    layout.push(format!("view{k}.gate.b"), (1, d), false),
                )
            });
            let fuse = learned_fusion.then(|| layout.push(format!("view{k}.fuse"), (layout.view_dim, 1), true));
            layout.views.push(ViewSlots { layers, gate, fuse });
        }
        let out = match config.task {
            Task::Binary => 1,
            Task::Multiclass => config.num_classes,
        };
        layout.head = HeadSlots {
            w1: layout.push("head.w1".into(), (layout.view_dim, config.mlp_hidden), true),
            b1: layout.push("head.b1".into(), (1, config.mlp_hidden), false),
            w2: layout.push("head.w2".into(), (config.mlp_hidden, out), true),
            b2: layout.push("head.b2".into(), (1, out), false),
        };
        Ok(layout)
    }

    fn push(&mut self, name: String, shape: (usize, usize), decay: bool) -> usize {
        self.names.push(name);
        self.shapes.push(shape);
        self.decay.push(decay);
        self.names.len() - 1
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Total scalar parameter count.
    pub fn scalar_count(&self) -> usize {
        self.shapes.iter().map(|(r, c)| r * c).sum()
    }
}

/// Parameter values in layout order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub tensors: Vec<Tensor>,
}

impl Params {
    /// Glorot-uniform weights, zero biases.
    ///
    /// Bound is `sqrt(6 / (rows + cols))`.
    pub fn init(layout: &Layout, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tensors = layout
            .shapes
            .iter()
            .zip(&layout.decay)
            .map(|(&(r, c), &weight)| {
                if !weight {
                    return Tensor::zeros(r, c);
                }
                let bound = (6.0 / (r + c) as f64).sqrt();
                let data = (0..r * c).map(|_| rng.random_range(-bound..bound)).collect();
                Tensor::from_vec(r, c, data).expect("shape matches data")
            })
            .collect();
        Self { tensors }
    }

    pub fn zeros(layout: &Layout) -> Self {
        Self {
            tensors: layout.shapes.iter().map(|&(r, c)| Tensor::zeros(r, c)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    /// Checks count and shapes against `layout`.
    pub fn check(&self, layout: &Layout) -> Result<()> {
        if self.tensors.len() != layout.len() {
            return Err(Error::Snapshot(format!(
                "expected {} parameter tensors, found {}",
                layout.len(),
                self.tensors.len()
            )));
        }
        for (i, t) in self.tensors.iter().enumerate() {
            if t.shape() != layout.shapes[i] {
                return Err(Error::Snapshot(format!(
                    "parameter {} has shape {:?}, configuration expects {:?}",
                    layout.names[i],
                    t.shape(),
                    layout.shapes[i]
                )));
            }
        }
        Ok(())
    }

    /// `Σ ‖θ‖²` over the decayed tensors.
    pub fn l2(&self, layout: &Layout) -> f64 {
        self.tensors
            .iter()
            .zip(&layout.decay)
            .filter(|(_, &d)| d)
            .map(|(t, _)| t.squared_norm())
            .sum()
    }
}
