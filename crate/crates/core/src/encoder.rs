//! Input module: quantile buckets, per-group one-hot embedding maps, and a
//! raw-feature passthrough for benchmark graphs.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FeatureGroup, FeatureTable};
use crate::tensor::{SparseRows, Tape, Tensor, Var};

/// Per-column equal-frequency cut points fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucketizer {
    buckets: usize,
    cuts: Vec<Vec<f64>>,
}

impl Bucketizer {
    /// Cut `j` of a column is the `floor(j * N / B)`-th smallest training
    /// value. Cuts at or below the column minimum and repeated cuts are
    /// dropped, so skewed or constant columns get fewer effective buckets.
    pub fn fit(values: &Tensor, train_rows: &[usize], buckets: usize) -> Result<Self> {
        if buckets < 2 {
            return Err(Error::Config(format!("buckets must be at least 2, got {buckets}")));
        }
        if train_rows.is_empty() {
            return Err(Error::Contract("bucketizer needs at least one training row".into()));
        }
        let n = train_rows.len();
        let cuts = (0..values.cols())
            .map(|c| {
                let mut col: Vec<f64> = train_rows.iter().map(|&r| values.get(r, c)).collect();
                col.sort_by(f64::total_cmp);
                let min = col[0];
                let mut cuts: Vec<f64> = (1..buckets).map(|j| col[j * n / buckets]).filter(|&x| x > min).collect();
                cuts.dedup();
                cuts
            })
            .collect();
        Ok(Self { buckets, cuts })
    }

    /// Nominal bucket count `B`.
    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn columns(&self) -> usize {
        self.cuts.len()
    }

    pub fn cuts(&self, col: usize) -> &[f64] {
        &self.cuts[col]
    }

    pub fn effective_buckets(&self, col: usize) -> usize {
        self.cuts[col].len() + 1
    }

    /// Number of cuts at or below `x`; always in `0..B`.
    pub fn bucket(&self, col: usize, x: f64) -> usize {
        self.cuts[col].partition_point(|&c| c <= x)
    }
}

/// How raw features become the input embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputMode {
    #[default]
    Bucketized,
    /// One dense linear layer on raw feature rows.
    Passthrough,
}

impl std::str::FromStr for InputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bucketized" => Ok(InputMode::Bucketized),
            "passthrough" => Ok(InputMode::Passthrough),
            other => Err(Error::Value(format!("input mode must be bucketized|passthrough, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub mode: InputMode,
    pub buckets: usize,
    pub embed_dim_profile: usize,
    pub embed_dim_behavior: usize,
    pub embed_dim_loan: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            mode: InputMode::Bucketized,
            buckets: 10,
            embed_dim_profile: 16,
            embed_dim_behavior: 16,
            embed_dim_loan: 16,
        }
    }
}

impl EncoderConfig {
    pub fn dim(&self, group: FeatureGroup) -> usize {
        match group {
            FeatureGroup::Profile => self.embed_dim_profile,
            FeatureGroup::Behavior => self.embed_dim_behavior,
            FeatureGroup::Loan => self.embed_dim_loan,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.buckets < 2 {
            return Err(Error::Config(format!("buckets must be at least 2, got {}", self.buckets)));
        }
        for g in FeatureGroup::ALL {
            if self.dim(g) == 0 {
                return Err(Error::Config(format!("embed_dim_{:?} must be positive", g).to_lowercase()));
            }
        }
        Ok(())
    }
}

/// Columns of one feature group and the width of its embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSlot {
    pub group: FeatureGroup,
    pub columns: Vec<usize>,
    pub dim: usize,
}

/// Fitted input module. Groups without columns are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEncoder {
    mode: InputMode,
    raw_cols: usize,
    bucketizer: Option<Bucketizer>,
    slots: Vec<GroupSlot>,
    output_dim: usize,
}

/// Constant per-graph inputs to [`InputEncoder::encode`].
#[derive(Debug, Clone)]
pub enum PreparedInput {
    OneHot(Vec<Arc<SparseRows>>),
    Dense(Tensor),
}

impl InputEncoder {
    pub fn fit(table: &FeatureTable, train_rows: &[usize], config: &EncoderConfig) -> Result<Self> {
        config.validate()?;
        if table.cols() == 0 {
            return Err(Error::Value("feature table has no columns".into()));
        }
        match config.mode {
            InputMode::Passthrough => {
                let dim = config.embed_dim_profile + config.embed_dim_behavior + config.embed_dim_loan;
                Ok(Self {
                    mode: InputMode::Passthrough,
                    raw_cols: table.cols(),
                    bucketizer: None,
                    slots: Vec::new(),
                    output_dim: dim,
                })
            }
            InputMode::Bucketized => {
                let bucketizer = Bucketizer::fit(table.values(), train_rows, config.buckets)?;
                let slots: Vec<GroupSlot> = FeatureGroup::ALL
                    .into_iter()
                    .map(|group| GroupSlot {
                        group,
                        columns: table.group_columns(group),
                        dim: config.dim(group),
                    })
                    .filter(|s| !s.columns.is_empty())
                    .collect();
                let output_dim = slots.iter().map(|s| s.dim).sum();
                Ok(Self {
                    mode: InputMode::Bucketized,
                    raw_cols: table.cols(),
                    bucketizer: Some(bucketizer),
                    slots,
                    output_dim,
                })
            }
        }
    }

    pub fn mode(&self) -> InputMode {
        self.mode
    }

    pub fn bucketizer(&self) -> Option<&Bucketizer> {
        self.bucketizer.as_ref()
    }

    pub fn slots(&self) -> &[GroupSlot] {
        &self.slots
    }

    /// Width of the input embedding.
    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    /// Named shapes of the embedding maps, in parameter order.
    pub fn param_shapes(&self) -> Vec<(String, (usize, usize))> {
        match &self.bucketizer {
            None => vec![("input_linear".into(), (self.raw_cols, self.output_dim))],
            Some(b) => self
                .slots
                .iter()
                .map(|s| {
                    let name = format!("embed_{}", s.group.prefix().trim_end_matches('_'));
                    (name, (s.columns.len() * b.buckets(), s.dim))
                })
                .collect(),
        }
    }

    fn check_table(&self, table: &FeatureTable) -> Result<()> {
        if table.cols() != self.raw_cols {
            return Err(Error::Value(format!(
                "encoder fitted on {} feature columns, table has {}",
                self.raw_cols,
                table.cols()
            )));
        }
        Ok(())
    }

    /// Hit positions of `node` in each group's one-hot vector.
    fn hits(&self, b: &Bucketizer, slot: &GroupSlot, table: &FeatureTable, node: usize) -> Vec<usize> {
        slot.columns
            .iter()
            .enumerate()
            .map(|(i, &c)| i * b.buckets() + b.bucket(c, table.get(node, c)))
            .collect()
    }

    pub fn prepare(&self, table: &FeatureTable) -> Result<PreparedInput> {
        self.check_table(table)?;
        let Some(b) = &self.bucketizer else {
            return Ok(PreparedInput::Dense(table.values().clone()));
        };
        self.slots
            .iter()
            .map(|slot| {
                let rows = (0..table.rows())
                    .map(|u| self.hits(b, slot, table, u).into_iter().map(|h| (h, 1.0)).collect())
                    .collect();
                SparseRows::new(slot.columns.len() * b.buckets(), rows).map(Arc::new)
            })
            .collect::<Result<Vec<_>>>()
            .map(PreparedInput::OneHot)
    }

    /// Records the input embedding of every node on `tape`.
    pub fn encode(&self, tape: &mut Tape, input: &PreparedInput, weights: &[Var]) -> Result<Var> {
        match input {
            PreparedInput::Dense(x) => {
                let [w] = weights else {
                    return Err(Error::Contract(format!("passthrough needs 1 weight, got {}", weights.len())));
                };
                let x = tape.constant(x.clone());
                tape.matmul(x, *w)
            }
            PreparedInput::OneHot(parts) => {
                if parts.len() != weights.len() {
                    return Err(Error::Contract(format!(
                        "{} feature groups but {} embedding maps",
                        parts.len(),
                        weights.len()
                    )));
                }
                let outs = parts
                    .iter()
                    .zip(weights)
                    .map(|(p, &w)| tape.sparse_matmul(p.clone(), w))
                    .collect::<Result<Vec<_>>>()?;
                if outs.len() == 1 {
                    Ok(outs[0])
                } else {
                    tape.concat_cols(&outs)
                }
            }
        }
    }

    /// Input embedding of a single node, computed directly from the maps.
    pub fn encode_node(&self, table: &FeatureTable, weights: &[Tensor], node: usize) -> Result<Vec<f64>> {
        self.check_table(table)?;
        if node >= table.rows() {
            return Err(Error::Range {
                what: "node",
                value: node,
                expected: format!("< {}", table.rows()),
            });
        }
        let Some(b) = &self.bucketizer else {
            let w = &weights[0];
            let x = Tensor::from_vec(1, table.cols(), table.values().row(node).to_vec())?;
            return Ok(x.matmul(w)?.into_data());
        };
        let mut out = Vec::with_capacity(self.output_dim);
        for (slot, w) in self.slots.iter().zip(weights) {
            let mut acc = vec![0.0; slot.dim];
            for h in self.hits(b, slot, table, node) {
                for (a, x) in acc.iter_mut().zip(w.row(h)) {
                    *a += x;
                }
            }
            out.extend(acc);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(cols: &[(&str, Vec<f64>)]) -> FeatureTable {
        let n = cols[0].1.len();
        let mut data = Vec::new();
        for r in 0..n {
            for (_, c) in cols {
                data.push(c[r]);
            }
        }
        let names = cols.iter().map(|(n, _)| n.to_string()).collect();
        let groups = cols.iter().map(|(n, _)| FeatureGroup::from_column(n).unwrap()).collect();
        FeatureTable::new(Tensor::from_vec(n, cols.len(), data).unwrap(), names, groups).unwrap()
    }

    #[test]
    fn quartiles_of_one_to_hundred() {
        let x = Tensor::column(&(1..=100).map(f64::from).collect::<Vec<_>>());
        let rows: Vec<usize> = (0..100).collect();
        let b = Bucketizer::fit(&x, &rows, 4).unwrap();
        let mut sizes = [0; 4];
        for v in 1..=100 {
            sizes[b.bucket(0, f64::from(v))] += 1;
        }
        assert_eq!(sizes, [25; 4]);
    }

    #[test]
    fn constant_column_has_one_bucket() {
        let x = Tensor::filled(10, 1, 3.0);
        let b = Bucketizer::fit(&x, &(0..10).collect::<Vec<_>>(), 10).unwrap();
        assert_eq!(b.effective_buckets(0), 1);
        assert_eq!(b.bucket(0, 3.0), 0);
        assert_eq!(b.bucket(0, 1e9), 0);
    }

    #[test]
    fn out_of_range_values_clamp() {
        let x = Tensor::column(&(0..20).map(f64::from).collect::<Vec<_>>());
        let b = Bucketizer::fit(&x, &(0..20).collect::<Vec<_>>(), 5).unwrap();
        assert_eq!(b.bucket(0, -100.0), 0);
        assert_eq!(b.bucket(0, 100.0), 4);
    }

    #[test]
    fn too_few_buckets_rejected() {
        let x = Tensor::zeros(3, 1);
        assert!(matches!(Bucketizer::fit(&x, &[0, 1], 1), Err(Error::Config(_))));
    }

    #[test]
    fn single_column_selects_embedding_row() {
        let t = table(&[("loan_a", vec![0.0, 1.0, 2.0, 3.0])]);
        let cfg = EncoderConfig {
            buckets: 4,
            embed_dim_loan: 2,
            ..EncoderConfig::default()
        };
        let enc = InputEncoder::fit(&t, &[0, 1, 2, 3], &cfg).unwrap();
        let w = Tensor::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![7.0, 8.0], vec![3.0, 3.0]]).unwrap();
        assert_eq!(enc.encode_node(&t, &[w], 2).unwrap(), vec![7.0, 8.0]);
    }

    #[test]
    fn tape_encoding_matches_direct() {
        let t = table(&[
            ("profile_a", vec![1.0, 5.0, 2.0, 9.0]),
            ("behavior_b", vec![0.0, 0.0, 1.0, 1.0]),
            ("profile_c", vec![3.0, 1.0, 4.0, 1.0]),
            ("loan_d", vec![2.0, 7.0, 1.0, 8.0]),
        ]);
        let cfg = EncoderConfig {
            buckets: 3,
            embed_dim_profile: 2,
            embed_dim_behavior: 1,
            embed_dim_loan: 3,
            ..EncoderConfig::default()
        };
        let enc = InputEncoder::fit(&t, &[0, 1, 2, 3], &cfg).unwrap();
        assert_eq!(enc.output_dim(), 6);
        let weights: Vec<Tensor> = enc
            .param_shapes()
            .iter()
            .enumerate()
            .map(|(g, (_, (r, c)))| {
                let data = (0..r * c).map(|i| (i as f64 + 1.0) * (g as f64 + 0.5)).collect();
                Tensor::from_vec(*r, *c, data).unwrap()
            })
            .collect();
        let input = enc.prepare(&t).unwrap();
        let mut tape = Tape::new();
        let vars: Vec<Var> = weights.iter().map(|w| tape.param(w.clone())).collect();
        let out = enc.encode(&mut tape, &input, &vars).unwrap();
        for u in 0..4 {
            assert_eq!(tape.value(out).row(u), enc.encode_node(&t, &weights, u).unwrap().as_slice());
        }
    }

    #[test]
    fn zero_maps_give_zero_vector() {
        let t = table(&[("profile_a", vec![1.0, 2.0]), ("loan_b", vec![3.0, 4.0])]);
        let enc = InputEncoder::fit(&t, &[0, 1], &EncoderConfig::default()).unwrap();
        let zeros: Vec<Tensor> = enc.param_shapes().iter().map(|(_, (r, c))| Tensor::zeros(*r, *c)).collect();
        assert_eq!(enc.encode_node(&t, &zeros, 1).unwrap(), vec![0.0; 32]);
    }
}
