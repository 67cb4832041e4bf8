use serde::Serialize;

use crate::tensor::Tensor;
use crate::Measure;

fn check_binary(scores: &[f64], labels: &[usize]) -> Option<Measure> {
    if scores.len() != labels.len() {
        return Some(Measure::undefined("scores and labels differ in length"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Some(Measure::undefined("non-finite score"));
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    if pos == 0 || pos == labels.len() {
        return Some(Measure::undefined("both classes must be present"));
    }
    None
}

/// Mann–Whitney AUC; tied scores count one half.
pub fn auc(scores: &[f64], labels: &[usize]) -> Measure {
    if let Some(m) = check_binary(scores, labels) {
        return m;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // average ranks over tie groups, 1-based
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1 {
                rank_sum_pos += avg;
            }
        }
        i = j + 1;
    }
    let pos = labels.iter().filter(|&&y| y == 1).count() as f64;
    let neg = labels.len() as f64 - pos;
    Measure::Defined((rank_sum_pos - pos * (pos + 1.0) / 2.0) / (pos * neg))
}

/// Kolmogorov–Smirnov statistic: `max |TPR − FPR|` over all thresholds.
pub fn ks(scores: &[f64], labels: &[usize]) -> Measure {
    if let Some(m) = check_binary(scores, labels) {
        return m;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let pos = labels.iter().filter(|&&y| y == 1).count() as f64;
    let neg = labels.len() as f64 - pos;
    let (mut tp, mut fp, mut best) = (0.0, 0.0, 0.0f64);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            i += 1;
        }
        best = best.max((tp / pos - fp / neg).abs());
    }
    Measure::Defined(best)
}

/// Fraction of rows whose predicted class equals the label. Binary
/// predictions are `n×1` probabilities thresholded at 0.5.
pub fn accuracy(probs: &Tensor, rows: &[usize], labels: &[usize]) -> Measure {
    if rows.is_empty() {
        return Measure::undefined("no labeled rows");
    }
    let hits = rows
        .iter()
        .zip(labels)
        .filter(|&(&r, &y)| predict(probs.row(r)) == y)
        .count();
    Measure::Defined(hits as f64 / rows.len() as f64)
}

/// Predicted class of one output row.
pub fn predict(row: &[f64]) -> usize {
    if row.len() == 1 {
        usize::from(row[0] >= 0.5)
    } else {
        let mut best = 0;
        for (c, &p) in row.iter().enumerate() {
            if p > row[best] {
                best = c;
            }
        }
        best
    }
}

/// Distribution of one view's fusion weight over nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttentionSummary {
    pub view: String,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Per-view mean and quartiles of α (n×V) over nodes.
pub fn attention_report(alpha: &Tensor, view_names: &[String]) -> Vec<AttentionSummary> {
    (0..alpha.cols())
        .map(|k| {
            let mut col: Vec<f64> = (0..alpha.rows()).map(|u| alpha.get(u, k)).collect();
            let mean = if col.is_empty() { 0.0 } else { col.iter().sum::<f64>() / col.len() as f64 };
            col.sort_by(f64::total_cmp);
            AttentionSummary {
                view: view_names.get(k).cloned().unwrap_or_else(|| format!("view{k}")),
                mean,
                min: quantile(&col, 0.0),
                q1: quantile(&col, 0.25),
                median: quantile(&col, 0.5),
                q3: quantile(&col, 0.75),
                max: quantile(&col, 1.0),
            }
        })
        .collect()
}

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_cases() {
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1]), Measure::Defined(1.0));
        assert_eq!(auc(&[0.5; 4], &[0, 1, 0, 1]), Measure::Defined(0.5));
        assert_eq!(auc(&[0.1, 0.4, 0.35, 0.8], &[0, 0, 1, 1]), Measure::Defined(0.75));
        assert!(!auc(&[0.1, 0.2], &[1, 1]).is_defined());
    }

    #[test]
    fn ks_cases() {
        assert_eq!(ks(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1]), Measure::Defined(1.0));
        assert_eq!(ks(&[0.3, 0.3, 0.7, 0.7], &[0, 1, 0, 1]), Measure::Defined(0.0));
        assert!(!ks(&[0.1], &[0]).is_defined());
    }

    #[test]
    fn nan_scores_are_undefined() {
        let s = [f64::NAN, 0.2, f64::NAN];
        assert!(!auc(&s, &[0, 1, 1]).is_defined());
        assert!(!ks(&s, &[0, 1, 1]).is_defined());
    }

    #[test]
    fn accuracy_binary_and_multiclass() {
        let p = Tensor::column(&[0.9, 0.2, 0.5]);
        assert_eq!(accuracy(&p, &[0, 1, 2], &[1, 0, 0]), Measure::Defined(2.0 / 3.0));
        let m = Tensor::from_rows(&[vec![0.1, 0.7, 0.2], vec![0.5, 0.3, 0.2]]).unwrap();
        assert_eq!(accuracy(&m, &[0, 1], &[1, 0]), Measure::Defined(1.0));
    }

    #[test]
    fn attention_means_are_column_averages() {
        let a = Tensor::from_rows(&[vec![0.2, 0.8], vec![0.6, 0.4]]).unwrap();
        let r = attention_report(&a, &["original".into(), "m".into()]);
        assert!((r[0].mean - 0.4).abs() < 1e-15 && (r[1].mean - 0.6).abs() < 1e-15);
        assert_eq!(r[0].median, 0.4);
        let single = attention_report(&Tensor::from_rows(&[vec![0.3, 0.7]]).unwrap(), &[]);
        assert_eq!((single[0].mean, single[1].q3), (0.3, 0.7));
    }

    #[test]
    fn uniform_attention_means() {
        let a = Tensor::filled(5, 14, 1.0 / 14.0);
        assert!(attention_report(&a, &[]).iter().all(|s| s.mean == 1.0 / 14.0));
    }
}
