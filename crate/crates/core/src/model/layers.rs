//! Building blocks of the forward pass, each recorded on a tape.

use std::sync::Arc;

use super::views::ViewEdges;
use crate::error::{Error, Result};
use crate::tensor::{Segments, Tape, Tensor, Var};

/// Tape handles for one GAT layer.
#[derive(Debug, Clone, Copy)]
pub struct LayerVars {
    pub w: Var,
    pub w_src: Var,
    pub w_dst: Var,
    pub v: Var,
}

/// One attention layer: `h'_u = tanh(Σ_{v ∈ N(u) ∪ {u}} α_uv · h_v W)` with
/// `α_u· = softmax_v(vᵀ tanh(h_u W_src + h_v W_dst))`.
///
/// Returns the new embeddings and the per-edge attention (E×1, aligned with
/// the view's edge order).
pub fn gat_layer(tape: &mut Tape, h: Var, edges: &ViewEdges, p: LayerVars) -> Result<(Var, Var)> {
    let n = tape.value(h).rows();
    if n != edges.index.num_destinations() {
        return Err(Error::shape(
            "gat_layer",
            tape.value(h).shape(),
            (edges.index.num_destinations(), tape.value(h).cols()),
        ));
    }
    let at_dst = tape.matmul(h, p.w_src)?;
    let at_src = tape.matmul(h, p.w_dst)?;
    let a = tape.gather_rows(at_dst, edges.dst.clone())?;
    let b = tape.gather_rows(at_src, edges.src.clone())?;
    let pre = tape.add(a, b)?;
    let act = tape.tanh(pre);
    let scores = tape.matmul(act, p.v)?;
    let attention = tape.softmax_segments(scores, edges.segments.clone())?;
    let hw = tape.matmul(h, p.w)?;
    let agg = tape.segment_weighted_sum(attention, hw, edges.index.clone())?;
    Ok((tape.tanh(agg), attention))
}

/// Raw attention score `vᵀ tanh(h_u W_src + h_v W_dst)` for destination `u`
/// and source `v`, evaluated directly.
pub fn attention_score(h_u: &[f64], h_v: &[f64], w_src: &Tensor, w_dst: &Tensor, v: &Tensor) -> f64 {
    (0..w_src.cols())
        .map(|j| {
            let pre: f64 = (0..h_u.len())
                .map(|i| h_u[i] * w_src.get(i, j) + h_v[i] * w_dst.get(i, j))
                .sum();
            v.get(j, 0) * pre.tanh()
        })
        .sum()
}

/// Feature-wise gate `z_0 ⊙ σ(z_k W_g + b_g)`; `ones` is an n×1 constant.
pub fn gate(tape: &mut Tape, z0: Var, zk: Var, w_g: Var, b_g: Var, ones: Var) -> Result<Var> {
    let lin = tape.matmul(zk, w_g)?;
    let bias = tape.matmul(ones, b_g)?;
    let pre = tape.add(lin, bias)?;
    let g = tape.sigmoid(pre);
    tape.mul(z0, g)
}

/// `gated ‖ z`, gated part first.
pub fn concat_view(tape: &mut Tape, gated: Var, z: Var) -> Result<Var> {
    tape.concat_cols(&[gated, z])
}

/// How view representations are weighted before summation.
#[derive(Debug, Clone, Copy)]
pub enum Fusion<'a> {
    /// `α_u = softmax_k tanh(h_u^k · w_a^k)`.
    Learned(&'a [Var]),
    /// Every view weighted `1 / V`.
    Uniform,
}

/// Attentional fusion. Returns the fused representation and α (n×V).
pub fn fuse(tape: &mut Tape, reps: &[Var], fusion: Fusion<'_>) -> Result<(Var, Var)> {
    let Some(&first) = reps.first() else {
        return Err(Error::Contract("fusion needs at least one view".into()));
    };
    let n = tape.value(first).rows();
    let views = reps.len();
    let alpha = match fusion {
        _ if views == 1 => tape.constant(Tensor::ones(n, 1)),
        Fusion::Uniform => tape.constant(Tensor::filled(n, views, 1.0 / views as f64)),
        Fusion::Learned(w) => {
            if w.len() != views {
                return Err(Error::Contract(format!("{views} views but {} fusion vectors", w.len())));
            }
            let scores = reps
                .iter()
                .zip(w)
                .map(|(&h, &wa)| {
                    let s = tape.matmul(h, wa)?;
                    Ok(tape.tanh(s))
                })
                .collect::<Result<Vec<_>>>()?;
            let s = tape.concat_cols(&scores)?;
            tape.softmax_segments(s, Arc::new(Segments::rows(n, views)))?
        }
    };
    if views == 1 {
        return Ok((first, alpha));
    }
    let mut acc: Option<Var> = None;
    for (k, &h) in reps.iter().enumerate() {
        let a = tape.slice_cols(alpha, k, k + 1)?;
        let term = tape.mul_col(h, a)?;
        acc = Some(match acc {
            None => term,
            Some(prev) => tape.add(prev, term)?,
        });
    }
    Ok((acc.expect("at least two views"), alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(lists: &[Vec<usize>]) -> ViewEdges {
        ViewEdges::from_neighbors(lists).unwrap()
    }

    #[test]
    fn isolated_node_is_tanh_of_projection() {
        let mut tape = Tape::new();
        let h = tape.constant(Tensor::from_rows(&[vec![0.1, -0.2]]).unwrap());
        let p = LayerVars {
            w: tape.constant(Tensor::identity(2)),
            w_src: tape.constant(Tensor::filled(2, 3, 0.4)),
            w_dst: tape.constant(Tensor::filled(2, 3, -0.1)),
            v: tape.constant(Tensor::filled(3, 1, 2.0)),
        };
        let (out, att) = gat_layer(&mut tape, h, &edges(&[vec![]]), p).unwrap();
        assert_eq!(tape.value(att).data(), &[1.0]);
        assert_eq!(tape.value(out).data(), &[0.1f64.tanh(), (-0.2f64).tanh()]);
    }

    #[test]
    fn identical_neighbors_share_attention() {
        let mut tape = Tape::new();
        let h = tape.constant(Tensor::filled(3, 2, 0.3));
        let p = LayerVars {
            w: tape.constant(Tensor::identity(2)),
            w_src: tape.constant(Tensor::filled(2, 2, 0.7)),
            w_dst: tape.constant(Tensor::filled(2, 2, 0.2)),
            v: tape.constant(Tensor::filled(2, 1, 1.5)),
        };
        let (_, att) = gat_layer(&mut tape, h, &edges(&[vec![1, 2], vec![], vec![]]), p).unwrap();
        for &a in &tape.value(att).data()[..3] {
            assert!((a - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_attention_vector_is_uniform() {
        let mut tape = Tape::new();
        let h = tape.constant(Tensor::from_rows(&[vec![1.0], vec![-2.0], vec![0.5]]).unwrap());
        let p = LayerVars {
            w: tape.constant(Tensor::scalar(1.0)),
            w_src: tape.constant(Tensor::scalar(3.0)),
            w_dst: tape.constant(Tensor::scalar(-1.0)),
            v: tape.constant(Tensor::scalar(0.0)),
        };
        let (_, att) = gat_layer(&mut tape, h, &edges(&[vec![1], vec![0, 2], vec![]]), p).unwrap();
        assert_eq!(tape.value(att).data(), &[0.5, 0.5, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0]);
    }

    #[test]
    fn score_at_origin_is_zero() {
        let w = Tensor::filled(2, 2, 0.9);
        let v = Tensor::filled(2, 1, 0.9);
        assert_eq!(attention_score(&[0.0, 0.0], &[0.0, 0.0], &w, &w, &v), 0.0);
    }

    #[test]
    fn gate_cases() {
        let mut tape = Tape::new();
        let ones = tape.constant(Tensor::ones(1, 1));
        let z0 = tape.constant(Tensor::from_rows(&[vec![2.0, -4.0]]).unwrap());
        let zero = tape.constant(Tensor::zeros(1, 2));
        let wg = tape.constant(Tensor::filled(2, 2, 0.3));
        let bg = tape.constant(Tensor::zeros(1, 2));
        let half = gate(&mut tape, z0, zero, wg, bg, ones).unwrap();
        assert_eq!(tape.value(half).data(), &[1.0, -2.0]);
        let open = tape.constant(Tensor::filled(1, 2, 50.0));
        let wide = gate(&mut tape, z0, zero, wg, open, ones).unwrap();
        assert!(tape.value(wide).max_abs_diff(tape.value(z0)) < 1e-10);
        let shut = gate(&mut tape, zero, z0, wg, bg, ones).unwrap();
        assert_eq!(tape.value(shut).data(), &[0.0, 0.0]);
    }

    #[test]
    fn concat_order() {
        let mut tape = Tape::new();
        let a = tape.constant(Tensor::from_rows(&[vec![1.0, 2.0]]).unwrap());
        let b = tape.constant(Tensor::from_rows(&[vec![3.0, 4.0]]).unwrap());
        let c = concat_view(&mut tape, a, b).unwrap();
        assert_eq!(tape.value(c).data(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn fusion_cases() {
        let mut tape = Tape::new();
        let reps: Vec<Var> = (0..3).map(|_| tape.constant(Tensor::scalar(1.0))).collect();
        let w: Vec<Var> = [1.0, 0.0, -1.0].iter().map(|&x| tape.constant(Tensor::scalar(x))).collect();
        let (_, alpha) = fuse(&mut tape, &reps, Fusion::Learned(&w)).unwrap();
        let s = [1.0f64.tanh(), 0.0, (-1.0f64).tanh()];
        let z: f64 = s.iter().map(|x| x.exp()).sum();
        for (k, a) in tape.value(alpha).data().iter().enumerate() {
            assert!((a - s[k].exp() / z).abs() < 1e-12);
        }

        let (_, uniform) = fuse(&mut tape, &reps, Fusion::Uniform).unwrap();
        assert!(tape.value(uniform).data().iter().all(|&a| a == 1.0 / 3.0));

        let (h, single) = fuse(&mut tape, &reps[..1], Fusion::Learned(&w[..1])).unwrap();
        assert_eq!(tape.value(single).data(), &[1.0]);
        assert_eq!(h, reps[0]);
    }
}
