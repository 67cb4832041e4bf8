use std::sync::Arc;

use super::layers::{concat_view, fuse, gat_layer, gate, Fusion, LayerVars};
use super::params::{Layout, Params, ViewSlots};
use super::views::{ViewEdges, ViewSet};
use super::{FusionMode, ModelConfig, Variant};
use crate::encoder::{InputEncoder, PreparedInput};
use crate::error::{Error, Result};
use crate::graph::{FeatureTable, Task};
use crate::par;
use crate::tensor::{Segments, Tape, Tensor, Var};

/// Graph-level constants shared by every forward pass.
#[derive(Debug, Clone)]
pub struct GraphInputs {
    pub input: PreparedInput,
    pub views: ViewSet,
}

/// Values produced by one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Final GAT embedding of each view (n×d).
    pub z: Vec<Tensor>,
    /// Fusion weights (n×V).
    pub alpha: Tensor,
    pub fused: Tensor,
    /// Default probability (n×1) or class probabilities (n×C).
    pub output: Tensor,
    /// Per-view, per-layer attention over the view's edges (E×1).
    pub attention: Vec<Vec<Tensor>>,
}

/// Head outputs on the main tape, handed to the training objective.
#[derive(Debug, Clone, Copy)]
pub struct HeadVars {
    pub alpha: Var,
    pub output: Var,
}

/// Builds a scalar loss from the head outputs.
pub type Objective<'a> = &'a (dyn Fn(&mut Tape, HeadVars) -> Result<Var> + Sync);

/// Architecture bound to a fitted input encoder and a view count.
#[derive(Debug, Clone)]
pub struct MotifGnn {
    config: ModelConfig,
    encoder: InputEncoder,
    layout: Layout,
}

struct ViewRun {
    tape: Tape,
    h0: Var,
    z: Var,
    params: Vec<(usize, Var)>,
    attention: Vec<Var>,
}

impl MotifGnn {
    pub fn new(config: ModelConfig, encoder: InputEncoder, num_views: usize) -> Result<Self> {
        let layout = Layout::new(&config, &encoder.param_shapes(), encoder.output_dim(), num_views)?;
        Ok(Self {
            config,
            encoder,
            layout,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn encoder(&self) -> &InputEncoder {
        &self.encoder
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn num_views(&self) -> usize {
        self.layout.views.len()
    }

    pub fn init_params(&self, seed: u64) -> Params {
        Params::init(&self.layout, seed)
    }

    /// Encodes features and checks that `views` matches the architecture.
    pub fn prepare(&self, table: &FeatureTable, views: ViewSet) -> Result<GraphInputs> {
        if views.len() != self.num_views() {
            return Err(Error::Contract(format!(
                "model has {} views, view set has {}",
                self.num_views(),
                views.len()
            )));
        }
        if views.node_count() != table.rows() {
            return Err(Error::Contract(format!(
                "views cover {} nodes, feature table has {}",
                views.node_count(),
                table.rows()
            )));
        }
        Ok(GraphInputs {
            input: self.encoder.prepare(table)?,
            views,
        })
    }

    /// Inference-only forward pass.
    pub fn forward(&self, params: &Params, inputs: &GraphInputs) -> Result<ForwardPass> {
        Ok(self.run(params, inputs, None)?.0)
    }

    /// Forward pass, the objective's value, and its gradient for every
    /// parameter in layout order.
    pub fn gradient(
        &self,
        params: &Params,
        inputs: &GraphInputs,
        objective: Objective<'_>,
    ) -> Result<(ForwardPass, f64, Vec<Tensor>)> {
        let (pass, grad) = self.run(params, inputs, Some(objective))?;
        let (loss, grads) = grad.expect("objective supplied");
        Ok((pass, loss, grads))
    }

    fn run(
        &self,
        params: &Params,
        inputs: &GraphInputs,
        objective: Option<Objective<'_>>,
    ) -> Result<(ForwardPass, Option<(f64, Vec<Tensor>)>)> {
        params.check(&self.layout)?;
        if inputs.views.len() != self.num_views() {
            return Err(Error::Contract(format!(
                "model has {} views, inputs carry {}",
                self.num_views(),
                inputs.views.len()
            )));
        }
        let train = objective.is_some();
        let leaf = |tape: &mut Tape, t: &Tensor| {
            if train {
                tape.param(t.clone())
            } else {
                tape.constant(t.clone())
            }
        };

        let mut input_tape = Tape::new();
        let enc_vars: Vec<Var> = self
            .layout
            .encoder
            .iter()
            .map(|&i| leaf(&mut input_tape, &params.tensors[i]))
            .collect();
        let h0_var = self.encoder.encode(&mut input_tape, &inputs.input, &enc_vars)?;
        let h0 = input_tape.value(h0_var).clone();

        let jobs: Vec<(&ViewSlots, &ViewEdges)> = self
            .layout
            .views
            .iter()
            .enumerate()
            .map(|(k, slots)| (slots, inputs.views.view(k)))
            .collect();
        let runs = par::map(jobs, |(slots, edges)| run_view(params, &h0, slots, edges, train))
            .into_iter()
            .collect::<Result<Vec<ViewRun>>>()?;

        let mut tape = Tape::new();
        let z_vars: Vec<Var> = runs.iter().map(|r| leaf(&mut tape, r.tape.value(r.z))).collect();
        let n = h0.rows();
        let ones = tape.constant(Tensor::ones(n, 1));
        let mut main_params: Vec<(usize, Var)> = Vec::new();
        let mut take = |tape: &mut Tape, i: usize| {
            let v = leaf(tape, &params.tensors[i]);
            main_params.push((i, v));
            v
        };

        let mut reps = Vec::with_capacity(z_vars.len());
        for (k, slots) in self.layout.views.iter().enumerate() {
            let rep = match (self.config.variant, slots.gate) {
                (Variant::NoGate, _) => z_vars[k],
                (_, Some((wg, bg))) => {
                    let (wg, bg) = (take(&mut tape, wg), take(&mut tape, bg));
                    let gated = gate(&mut tape, z_vars[0], z_vars[k], wg, bg, ones)?;
                    concat_view(&mut tape, gated, z_vars[k])?
                }
                (_, None) => concat_view(&mut tape, z_vars[k], z_vars[k])?,
            };
            reps.push(rep);
        }
        let fuse_vars: Vec<Var> = self
            .layout
            .views
            .iter()
            .filter_map(|s| s.fuse)
            .map(|i| take(&mut tape, i))
            .collect();
        let fusion = match self.config.fusion {
            FusionMode::Learned => Fusion::Learned(&fuse_vars),
            FusionMode::Uniform => Fusion::Uniform,
        };
        let (fused, alpha) = fuse(&mut tape, &reps, fusion)?;

        let head = self.layout.head;
        let (w1, b1, w2, b2) = (
            take(&mut tape, head.w1),
            take(&mut tape, head.b1),
            take(&mut tape, head.w2),
            take(&mut tape, head.b2),
        );
        let lin1 = tape.matmul(fused, w1)?;
        let bias1 = tape.matmul(ones, b1)?;
        let pre1 = tape.add(lin1, bias1)?;
        let hidden = tape.tanh(pre1);
        let lin2 = tape.matmul(hidden, w2)?;
        let bias2 = tape.matmul(ones, b2)?;
        let logits = tape.add(lin2, bias2)?;
        let output = match self.config.task {
            Task::Binary => tape.sigmoid(logits),
            Task::Multiclass => {
                let c = tape.value(logits).cols();
                tape.softmax_segments(logits, Arc::new(Segments::rows(n, c)))?
            }
        };

        let pass = ForwardPass {
            z: runs.iter().map(|r| r.tape.value(r.z).clone()).collect(),
            alpha: tape.value(alpha).clone(),
            fused: tape.value(fused).clone(),
            output: tape.value(output).clone(),
            attention: runs
                .iter()
                .map(|r| r.attention.iter().map(|&a| r.tape.value(a).clone()).collect())
                .collect(),
        };
        let Some(objective) = objective else {
            return Ok((pass, None));
        };

        let loss_var = objective(&mut tape, HeadVars { alpha, output })?;
        let loss = tape.value(loss_var).item()?;
        let mut main_grads = tape.backward(loss_var)?;
        let mut grads: Vec<Option<Tensor>> = vec![None; params.len()];
        for (i, v) in main_params {
            merge(&mut grads[i], main_grads.take(v));
        }

        let seeds: Vec<(ViewRun, Tensor)> = runs
            .into_iter()
            .zip(&z_vars)
            .map(|(r, &zv)| {
                let seed = main_grads
                    .take(zv)
                    .unwrap_or_else(|| Tensor::zeros(tape.value(zv).rows(), tape.value(zv).cols()));
                (r, seed)
            })
            .collect();
        let view_grads = par::map(seeds, |(mut run, seed)| {
            let mut g = run.tape.backward_seeded(run.z, seed)?;
            let dh0 = g.take(run.h0);
            let ps: Vec<(usize, Option<Tensor>)> = run.params.iter().map(|&(i, v)| (i, g.take(v))).collect();
            Ok((dh0, ps))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

        let mut dh0: Option<Tensor> = None;
        for (d, ps) in view_grads {
            merge(&mut dh0, d);
            for (i, g) in ps {
                merge(&mut grads[i], g);
            }
        }
        if let Some(dh0) = dh0 {
            let mut g = input_tape.backward_seeded(h0_var, dh0)?;
            for (&i, &v) in self.layout.encoder.iter().zip(&enc_vars) {
                merge(&mut grads[i], g.take(v));
            }
        }
        let grads = grads
            .into_iter()
            .zip(&self.layout.shapes)
            .map(|(g, &(r, c))| g.unwrap_or_else(|| Tensor::zeros(r, c)))
            .collect();
        Ok((pass, Some((loss, grads))))
    }
}

fn merge(slot: &mut Option<Tensor>, g: Option<Tensor>) {
    if let Some(g) = g {
        match slot {
            Some(acc) => acc.add_assign(&g),
            None => *slot = Some(g),
        }
    }
}

fn run_view(params: &Params, h0: &Tensor, slots: &ViewSlots, edges: &ViewEdges, train: bool) -> Result<ViewRun> {
    let mut tape = Tape::new();
    let leaf = |tape: &mut Tape, t: &Tensor| {
        if train {
            tape.param(t.clone())
        } else {
            tape.constant(t.clone())
        }
    };
    let h0_var = leaf(&mut tape, h0);
    let mut h = h0_var;
    let mut vars = Vec::new();
    let mut attention = Vec::new();
    for layer in &slots.layers {
        let p = LayerVars {
            w: leaf(&mut tape, &params.tensors[layer.w]),
            w_src: leaf(&mut tape, &params.tensors[layer.w_src]),
            w_dst: leaf(&mut tape, &params.tensors[layer.w_dst]),
            v: leaf(&mut tape, &params.tensors[layer.v]),
        };
        vars.extend([(layer.w, p.w), (layer.w_src, p.w_src), (layer.w_dst, p.w_dst), (layer.v, p.v)]);
        let (next, att) = gat_layer(&mut tape, h, edges, p)?;
        attention.push(att);
        h = next;
    }
    Ok(ViewRun {
        tape,
        h0: h0_var,
        z: h,
        params: vars,
        attention,
    })
}
