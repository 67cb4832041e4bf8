use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor::{Segments, Tape, Tensor, Var, LOG_FLOOR};

/// Per-batch sample weights from fusion-attention deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct CurriculumWeights {
    /// One weight per batch node; sums to 1 (or to the batch size when
    /// rescaled).
    pub beta: Vec<f64>,
    /// Mean attention vector over the batch.
    pub mu: Vec<f64>,
    /// Squared distance of each node's attention from `mu`.
    pub deviation: Vec<f64>,
}

/// `β_u = softmax_u ‖α_u − μ‖²` over the batch, `μ` the batch mean of α.
///
/// With `rescale` the weights are multiplied by the batch size, computed as
/// `e_u / (Σe / b)` so that identical deviations give exactly 1.
pub fn curriculum_weights(alpha: &Tensor, batch: &[usize], rescale: bool) -> Result<CurriculumWeights> {
    if batch.is_empty() {
        return Err(Error::Contract("curriculum weights need a non-empty batch".into()));
    }
    let b = batch.len() as f64;
    let v = alpha.cols();
    let mut mu = vec![0.0; v];
    for &u in batch {
        for (m, a) in mu.iter_mut().zip(alpha.row(u)) {
            *m += a;
        }
    }
    mu.iter_mut().for_each(|m| *m /= b);
    let deviation: Vec<f64> = batch
        .iter()
        .map(|&u| alpha.row(u).iter().zip(&mu).map(|(a, m)| (a - m) * (a - m)).sum())
        .collect();
    Ok(CurriculumWeights {
        beta: softmax_weights(&deviation, rescale),
        mu,
        deviation,
    })
}

/// Softmax of squared deviations, optionally scaled to mean 1.
pub fn softmax_weights(deviation: &[f64], rescale: bool) -> Vec<f64> {
    let max = deviation.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = deviation.iter().map(|d| (d - max).exp()).collect();
    let total: f64 = e.iter().sum();
    let denom = if rescale { total / deviation.len() as f64 } else { total };
    e.iter().map(|x| x / denom).collect()
}

/// Weights that ignore attention: every node `1`, or `1/b` without rescaling.
pub fn uniform_weights(batch_len: usize, rescale: bool) -> Vec<f64> {
    let w = if rescale { 1.0 } else { 1.0 / batch_len as f64 };
    vec![w; batch_len]
}

/// Records the same weights on `tape` as a differentiable function of α.
pub fn curriculum_weights_on_tape(tape: &mut Tape, alpha: Var, batch: Arc<Vec<usize>>, rescale: bool) -> Result<Var> {
    let b = batch.len();
    if b == 0 {
        return Err(Error::Contract("curriculum weights need a non-empty batch".into()));
    }
    let v = tape.value(alpha).cols();
    let rows = tape.gather_rows(alpha, batch)?;
    let avg = tape.constant(Tensor::filled(1, b, 1.0 / b as f64));
    let mu = tape.matmul(avg, rows)?;
    let ones_b = tape.constant(Tensor::ones(b, 1));
    let mu_rows = tape.matmul(ones_b, mu)?;
    let dev = tape.sub(rows, mu_rows)?;
    let sq = tape.mul(dev, dev)?;
    let ones_v = tape.constant(Tensor::ones(v, 1));
    let d = tape.matmul(sq, ones_v)?;
    let beta = tape.softmax_segments(d, Arc::new(Segments::contiguous(vec![0, b])?))?;
    Ok(if rescale { tape.scale(beta, b as f64) } else { beta })
}

/// `−(1/b) Σ β_u [y log ŷ + (1−y) log(1−ŷ)]` with ŷ clamped away from 0 and 1.
pub fn weighted_bce(probs: &[f64], labels: &[usize], beta: &[f64]) -> f64 {
    let b = probs.len() as f64;
    let total: f64 = probs
        .iter()
        .zip(labels)
        .zip(beta)
        .map(|((&p, &y), &w)| {
            let p = p.clamp(LOG_FLOOR, 1.0 - LOG_FLOOR);
            let y = y as f64;
            w * (y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    -total / b
}

/// Tape version of [`weighted_bce`] for rows `batch` of an n×1 probability
/// column, or the multiclass analogue for an n×C probability matrix.
pub fn weighted_loss_on_tape(
    tape: &mut Tape,
    output: Var,
    batch: Arc<Vec<usize>>,
    labels: &[usize],
    beta: Var,
) -> Result<Var> {
    let b = batch.len();
    let classes = tape.value(output).cols();
    let p = tape.gather_rows(output, batch)?;
    let term = if classes == 1 {
        let p = tape.clamp(p, LOG_FLOOR, 1.0 - LOG_FLOOR);
        let y = tape.constant(Tensor::column(&labels.iter().map(|&y| y as f64).collect::<Vec<_>>()));
        let not_y = tape.constant(Tensor::column(&labels.iter().map(|&y| 1.0 - y as f64).collect::<Vec<_>>()));
        let one = tape.constant(Tensor::ones(b, 1));
        let q = tape.sub(one, p)?;
        let lp = tape.log(p);
        let lq = tape.log(q);
        let a = tape.mul(y, lp)?;
        let c = tape.mul(not_y, lq)?;
        tape.add(a, c)?
    } else {
        let mut onehot = Tensor::zeros(b, classes);
        for (r, &y) in labels.iter().enumerate() {
            if y >= classes {
                return Err(Error::Range {
                    what: "class label",
                    value: y,
                    expected: format!("< {classes}"),
                });
            }
            onehot.set(r, y, 1.0);
        }
        let mask = tape.constant(onehot);
        let picked = tape.mul(p, mask)?;
        let ones_c = tape.constant(Tensor::ones(classes, 1));
        let py = tape.matmul(picked, ones_c)?;
        let py = tape.clamp(py, LOG_FLOOR, 1.0);
        tape.log(py)
    };
    let weighted = tape.mul(beta, term)?;
    let total = tape.sum(weighted);
    Ok(tape.scale(total, -1.0 / b as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_attention_is_uniform() {
        let a = Tensor::filled(4, 3, 1.0 / 3.0);
        let w = curriculum_weights(&a, &[0, 1, 2, 3], false).unwrap();
        assert!(w.beta.iter().all(|&b| b == 0.25));
        let r = curriculum_weights(&a, &[0, 1, 2], true).unwrap();
        assert!(r.beta.iter().all(|&b| b == 1.0));
    }

    #[test]
    fn deviations_zero_and_ln3() {
        let beta = softmax_weights(&[0.0, 3f64.ln()], false);
        assert!((beta[0] - 0.25).abs() < 1e-15 && (beta[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn single_node_gets_full_weight() {
        let a = Tensor::from_rows(&[vec![0.2, 0.8]]).unwrap();
        assert_eq!(curriculum_weights(&a, &[0], false).unwrap().beta, vec![1.0]);
    }

    #[test]
    fn empty_batch_rejected() {
        assert!(curriculum_weights(&Tensor::zeros(1, 1), &[], true).is_err());
    }

    #[test]
    fn bce_cases() {
        assert!((weighted_bce(&[0.5], &[1], &[1.0]) - 2f64.ln()).abs() < 1e-15);
        assert!(weighted_bce(&[1.0, 0.0], &[1, 0], &[0.5, 0.5]).abs() < 1e-11);
    }

    #[test]
    fn tape_loss_matches_scalar() {
        let probs = [0.9, 0.3, 0.6];
        let labels = [1, 0, 0];
        let beta = [0.2, 0.5, 0.3];
        let mut tape = Tape::new();
        let out = tape.constant(Tensor::column(&[0.0, probs[0], probs[1], probs[2]]));
        let bv = tape.constant(Tensor::column(&beta));
        let loss = weighted_loss_on_tape(&mut tape, out, Arc::new(vec![1, 2, 3]), &labels, bv).unwrap();
        let expect = weighted_bce(&probs, &labels, &beta);
        assert!((tape.value(loss).item().unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn tape_weights_match_direct() {
        let a = Tensor::from_rows(&[vec![0.1, 0.9], vec![0.6, 0.4], vec![0.3, 0.7]]).unwrap();
        let direct = curriculum_weights(&a, &[2, 0, 1], true).unwrap();
        let mut tape = Tape::new();
        let av = tape.constant(a);
        let bv = curriculum_weights_on_tape(&mut tape, av, Arc::new(vec![2, 0, 1]), true).unwrap();
        for (x, y) in tape.value(bv).data().iter().zip(&direct.beta) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
