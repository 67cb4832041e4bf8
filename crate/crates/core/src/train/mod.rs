//! Curriculum-weighted training, early stopping and evaluation.

mod adam;
mod curriculum;
mod metrics;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use adam::Adam;
pub use curriculum::{
    curriculum_weights, curriculum_weights_on_tape, softmax_weights, uniform_weights, weighted_bce,
    weighted_loss_on_tape, CurriculumWeights,
};
pub use metrics::{accuracy, attention_report, auc, ks, predict, AttentionSummary};

use crate::error::{Error, Result};
use crate::graph::{LabelSet, Split, Task};
use crate::model::{ForwardPass, GraphInputs, HeadVars, MotifGnn, Params};
use crate::tensor::{Tape, Tensor, Var, LOG_FLOOR};
use crate::Measure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub lambda_reg: f64,
    /// Scale β to mean 1 within each batch.
    pub rescale_beta: bool,
    /// Treat β as a constant during backpropagation.
    pub beta_stop_gradient: bool,
    /// Weight samples by attention deviation; off means uniform weights.
    pub curriculum: bool,
    pub seed: u64,
    pub patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.005,
            epochs: 100,
            batch_size: 256,
            lambda_reg: 5e-4,
            rescale_beta: true,
            beta_stop_gradient: true,
            curriculum: true,
            seed: 42,
            patience: 10,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("lr must be positive, got {}", self.lr)));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        if !(self.lambda_reg >= 0.0 && self.lambda_reg.is_finite()) {
            return Err(Error::Config(format!("lambda_reg must be non-negative, got {}", self.lambda_reg)));
        }
        Ok(())
    }
}

/// Labeled nodes of `split` and their labels.
fn split_rows(labels: &LabelSet, split: Split) -> (Vec<usize>, Vec<usize>) {
    let rows = labels.nodes(split);
    let ys = rows.iter().map(|&u| labels.label(u).expect("split nodes are labeled")).collect();
    (rows, ys)
}

/// Total loss and gradient of one batch: the curriculum-weighted data term
/// plus `λ Σ‖θ‖²`.
pub fn batch_loss_and_grad(
    model: &MotifGnn,
    inputs: &GraphInputs,
    params: &Params,
    batch: &[usize],
    ys: &[usize],
    config: &TrainConfig,
) -> Result<(ForwardPass, f64, Vec<Tensor>)> {
    let batch = Arc::new(batch.to_vec());
    let objective = |tape: &mut Tape, heads: HeadVars| -> Result<Var> {
        let beta = if !config.curriculum {
            tape.constant(Tensor::column(&uniform_weights(batch.len(), config.rescale_beta)))
        } else if config.beta_stop_gradient {
            let w = curriculum_weights(tape.value(heads.alpha), &batch, config.rescale_beta)?;
            tape.constant(Tensor::column(&w.beta))
        } else {
            curriculum_weights_on_tape(tape, heads.alpha, batch.clone(), config.rescale_beta)?
        };
        weighted_loss_on_tape(tape, heads.output, batch.clone(), ys, beta)
    };
    let (pass, data_loss, mut grads) = model.gradient(params, inputs, &objective)?;
    let layout = model.layout();
    let mut loss = data_loss;
    if config.lambda_reg > 0.0 {
        loss += config.lambda_reg * params.l2(layout);
        for (i, g) in grads.iter_mut().enumerate() {
            if layout.decay[i] {
                let p = params.tensors[i].data();
                for (gj, pj) in g.data_mut().iter_mut().zip(p) {
                    *gj += 2.0 * config.lambda_reg * pj;
                }
            }
        }
    }
    Ok((pass, loss, grads))
}

/// Step-level driver; [`train`] wraps it with epochs and early stopping.
pub struct Trainer<'a> {
    model: &'a MotifGnn,
    inputs: &'a GraphInputs,
    labels: &'a LabelSet,
    config: TrainConfig,
    params: Params,
    adam: Adam,
    rng: ChaCha8Rng,
}

impl<'a> Trainer<'a> {
    pub fn new(
        model: &'a MotifGnn,
        inputs: &'a GraphInputs,
        labels: &'a LabelSet,
        config: TrainConfig,
        params: Params,
    ) -> Result<Self> {
        config.validate()?;
        params.check(model.layout())?;
        if labels.node_count() != inputs.views.node_count() {
            return Err(Error::Contract(format!(
                "labels cover {} nodes, graph has {}",
                labels.node_count(),
                inputs.views.node_count()
            )));
        }
        let adam = Adam::new(config.lr, &model.layout().shapes);
        let rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_0f_ba7c4e5);
        Ok(Self {
            model,
            inputs,
            labels,
            config,
            params,
            adam,
            rng,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn into_params(self) -> Params {
        self.params
    }

    /// Training nodes in a fresh random order, cut into batches.
    pub fn shuffled_batches(&mut self) -> Vec<Vec<usize>> {
        let mut nodes = self.labels.nodes(Split::Train);
        nodes.shuffle(&mut self.rng);
        nodes.chunks(self.config.batch_size).map(<[usize]>::to_vec).collect()
    }

    /// One optimizer step on `batch`; returns the batch loss. Parameters are
    /// left untouched when the loss is not finite.
    pub fn step(&mut self, batch: &[usize]) -> Result<f64> {
        let ys: Vec<usize> = batch
            .iter()
            .map(|&u| {
                self.labels
                    .label(u)
                    .ok_or_else(|| Error::Contract(format!("batch node {u} is unlabeled")))
            })
            .collect::<Result<_>>()?;
        let (_, loss, grads) = batch_loss_and_grad(self.model, self.inputs, &self.params, batch, &ys, &self.config)?;
        if !loss.is_finite() || grads.iter().any(|g| g.data().iter().any(|x| !x.is_finite())) {
            return Err(Error::Diverged {
                epoch: 0,
                step: self.adam.steps() as usize + 1,
                loss,
            });
        }
        self.adam.update(&mut self.params.tensors, &grads)?;
        Ok(loss)
    }
}

/// Metrics on one split.
#[derive(Debug, Clone, Serialize)]
pub struct SplitMetrics {
    pub count: usize,
    pub accuracy: Measure,
    pub auc: Measure,
    pub ks: Measure,
    /// Unweighted mean cross-entropy.
    pub loss: Measure,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid: Measure,
}

/// Serialized as `metrics.json`. Headline fields are test-split values.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub task: Task,
    pub seed: u64,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub stopped_early: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<String>,
    pub accuracy: Measure,
    pub auc: Measure,
    pub ks: Measure,
    pub loss: Measure,
    pub splits: BTreeMap<String, SplitMetrics>,
    pub history: Vec<EpochRecord>,
    pub attention: Vec<AttentionSummary>,
}

pub struct TrainOutcome {
    /// Parameters of the best validation epoch.
    pub params: Params,
    pub report: MetricsReport,
}

/// Evaluates a forward pass on one split.
pub fn split_metrics(task: Task, output: &Tensor, labels: &LabelSet, split: Split) -> SplitMetrics {
    let (rows, ys) = split_rows(labels, split);
    let loss = if rows.is_empty() {
        Measure::undefined("empty split")
    } else {
        let total: f64 = rows
            .iter()
            .zip(&ys)
            .map(|(&r, &y)| {
                let row = output.row(r);
                let p = if row.len() == 1 {
                    if y == 1 {
                        row[0]
                    } else {
                        1.0 - row[0]
                    }
                } else {
                    row[y]
                };
                -p.clamp(LOG_FLOOR, 1.0).ln()
            })
            .sum();
        Measure::Defined(total / rows.len() as f64)
    };
    let (auc_m, ks_m) = match task {
        Task::Binary => {
            let scores: Vec<f64> = rows.iter().map(|&r| output.get(r, 0)).collect();
            (auc(&scores, &ys), ks(&scores, &ys))
        }
        Task::Multiclass => (
            Measure::undefined("binary task only"),
            Measure::undefined("binary task only"),
        ),
    };
    SplitMetrics {
        count: rows.len(),
        accuracy: accuracy(output, &rows, &ys),
        auc: auc_m,
        ks: ks_m,
        loss,
    }
}

/// Validation score used for early stopping: AUC for binary tasks,
/// accuracy otherwise.
fn selection_metric(task: Task, output: &Tensor, labels: &LabelSet) -> Measure {
    let m = split_metrics(task, output, labels, Split::Valid);
    match task {
        Task::Binary => m.auc,
        Task::Multiclass => m.accuracy,
    }
}

/// Names used for the fusion-attention summary.
pub fn view_names(ks: &[usize]) -> Vec<String> {
    std::iter::once("original".to_owned())
        .chain(ks.iter().map(|k| format!("motif{k}")))
        .collect()
}

/// Full training run with early stopping on the validation split.
///
/// Divergence stops training and is reported in the metrics; the returned
/// parameters are then the best ones seen before it.
pub fn train(
    model: &MotifGnn,
    inputs: &GraphInputs,
    labels: &LabelSet,
    config: &TrainConfig,
    init: Params,
) -> Result<TrainOutcome> {
    if labels.nodes(Split::Train).is_empty() {
        return Err(Error::Value("train split is empty".into()));
    }
    let task = model.config().task;
    let mut trainer = Trainer::new(model, inputs, labels, config.clone(), init)?;
    let first = model.forward(trainer.params(), inputs)?;
    let mut best_score = selection_metric(task, &first.output, labels).value();
    let mut best_params = trainer.params().clone();
    let mut best_epoch = 0;
    let mut since_best = 0;
    let mut history = Vec::new();
    let mut divergence = None;
    let mut stopped_early = false;
    let mut epochs_run = 0;

    'epochs: for epoch in 1..=config.epochs {
        let mut losses = Vec::new();
        for batch in trainer.shuffled_batches() {
            match trainer.step(&batch) {
                Ok(loss) => losses.push(loss),
                Err(Error::Diverged { step, loss, .. }) => {
                    divergence = Some(format!("loss became {loss} at epoch {epoch}, step {step}"));
                    break 'epochs;
                }
                Err(e) => return Err(e),
            }
        }
        epochs_run = epoch;
        let pass = model.forward(trainer.params(), inputs)?;
        let score = selection_metric(task, &pass.output, labels);
        history.push(EpochRecord {
            epoch,
            train_loss: losses.iter().sum::<f64>() / losses.len().max(1) as f64,
            valid: score.clone(),
        });
        let improved = match (score.value(), best_score) {
            (Some(s), Some(b)) => s > b,
            (Some(_), None) => true,
            // without a usable validation score the latest parameters win
            (None, _) => best_score.is_none(),
        };
        if improved {
            best_score = score.value();
            best_params = trainer.params().clone();
            best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                stopped_early = true;
                break;
            }
        }
    }

    let pass = model.forward(&best_params, inputs)?;
    let splits: BTreeMap<String, SplitMetrics> = [Split::Train, Split::Valid, Split::Test]
        .into_iter()
        .map(|s| (s.as_str().to_owned(), split_metrics(task, &pass.output, labels, s)))
        .collect();
    let test = splits["test"].clone();
    let report = MetricsReport {
        task,
        seed: config.seed,
        epochs_run,
        best_epoch,
        stopped_early,
        divergence,
        accuracy: test.accuracy,
        auc: test.auc,
        ks: test.ks,
        loss: test.loss,
        splits,
        history,
        attention: attention_report(&pass.alpha, &view_names(inputs.views.ks())),
    };
    Ok(TrainOutcome {
        params: best_params,
        report,
    })
}
