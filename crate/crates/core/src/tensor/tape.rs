use std::sync::Arc;

use super::{gemm, EdgeIndex, Segments, SparseRows, Tensor, LOG_FLOOR};
use crate::error::{Error, Result};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    SparseMatMul(Arc<SparseRows>, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    Tanh(Var),
    Sigmoid(Var),
    Exp(Var),
    Log(Var),
    Clamp(Var, f64, f64),
    Sum(Var),
    MulCol(Var, Var),
    ConcatCols(Vec<Var>),
    SliceCols(Var, usize),
    GatherRows(Var, Arc<Vec<usize>>),
    SegmentSoftmax(Var, Arc<Segments>),
    SegmentWeightedSum(Var, Var, Arc<EdgeIndex>),
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    requires_grad: bool,
    op: Op,
}

/// Records operations in execution order; inputs always precede outputs.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
    consumed: bool,
}

/// Gradients of the leaves of a tape after [`Tape::backward`].
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    pub fn get(&self, v: Var) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    pub fn take(&mut self, v: Var) -> Option<Tensor> {
        self.grads.get_mut(v.0).and_then(Option::take)
    }
}

#[derive(Clone, Copy)]
enum Broadcast {
    Same,
    LeftScalar,
    RightScalar,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Drops every recorded node so the tape can be reused.
    pub fn reset(&mut self) {
        self.nodes.clear();
        self.consumed = false;
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    /// Trainable leaf.
    pub fn param(&mut self, value: Tensor) -> Var {
        self.push(value, true, Op::Leaf)
    }

    /// Constant leaf; no gradient is accumulated for it.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(value, false, Op::Leaf)
    }

    fn push(&mut self, value: Tensor, requires_grad: bool, op: Op) -> Var {
        self.nodes.push(Node {
            value,
            requires_grad,
            op,
        });
        Var(self.nodes.len() - 1)
    }

    fn any_grad(&self, vars: &[Var]) -> bool {
        vars.iter().any(|v| self.nodes[v.0].requires_grad)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.cols() != bv.rows() {
            return Err(Error::shape("matmul", av.shape(), bv.shape()));
        }
        let mut out = Tensor::zeros(av.rows(), bv.cols());
        gemm(av, false, bv, false, &mut out, false);
        let rg = self.any_grad(&[a, b]);
        Ok(self.push(out, rg, Op::MatMul(a, b)))
    }

    /// `sparse · b` with a constant sparse left operand.
    pub fn sparse_matmul(&mut self, sparse: Arc<SparseRows>, b: Var) -> Result<Var> {
        let bv = self.value(b);
        let (rows, cols) = sparse.shape();
        if cols != bv.rows() {
            return Err(Error::shape("sparse_matmul", (rows, cols), bv.shape()));
        }
        let width = bv.cols();
        let mut out = Tensor::zeros(rows, width);
        for r in 0..rows {
            let dst = out.row_mut(r);
            for (c, w) in sparse.row(r) {
                for (o, x) in dst.iter_mut().zip(bv.row(c)) {
                    *o += w * x;
                }
            }
        }
        let rg = self.any_grad(&[b]);
        Ok(self.push(out, rg, Op::SparseMatMul(sparse, b)))
    }

    fn broadcast(&self, op: &'static str, a: Var, b: Var) -> Result<Broadcast> {
        let (sa, sb) = (self.value(a).shape(), self.value(b).shape());
        if sa == sb {
            Ok(Broadcast::Same)
        } else if sa == (1, 1) {
            Ok(Broadcast::LeftScalar)
        } else if sb == (1, 1) {
            Ok(Broadcast::RightScalar)
        } else {
            Err(Error::shape(op, sa, sb))
        }
    }

    fn binary(&mut self, name: &'static str, a: Var, b: Var, f: impl Fn(f64, f64) -> f64, op: Op) -> Result<Var> {
        let mode = self.broadcast(name, a, b)?;
        let (av, bv) = (self.value(a), self.value(b));
        let out = match mode {
            Broadcast::Same => Tensor {
                rows: av.rows,
                cols: av.cols,
                data: av.data.iter().zip(&bv.data).map(|(&x, &y)| f(x, y)).collect(),
            },
            Broadcast::LeftScalar => {
                let s = av.data[0];
                bv.map(|y| f(s, y))
            }
            Broadcast::RightScalar => {
                let s = bv.data[0];
                av.map(|x| f(x, s))
            }
        };
        let rg = self.any_grad(&[a, b]);
        Ok(self.push(out, rg, op))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary("add", a, b, |x, y| x + y, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary("sub", a, b, |x, y| x - y, Op::Sub(a, b))
    }

    /// Elementwise (Hadamard) product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary("mul", a, b, |x, y| x * y, Op::Mul(a, b))
    }

    pub fn scale(&mut self, a: Var, k: f64) -> Var {
        let out = self.value(a).map(|x| x * k);
        let rg = self.any_grad(&[a]);
        self.push(out, rg, Op::Scale(a, k))
    }

    fn unary(&mut self, a: Var, f: impl Fn(f64) -> f64, op: Op) -> Var {
        let out = self.value(a).map(f);
        let rg = self.any_grad(&[a]);
        self.push(out, rg, op)
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        self.unary(a, f64::tanh, Op::Tanh(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        self.unary(a, sigmoid, Op::Sigmoid(a))
    }

    pub fn exp(&mut self, a: Var) -> Var {
        self.unary(a, f64::exp, Op::Exp(a))
    }

    /// Natural log with inputs clamped to at least [`LOG_FLOOR`].
    pub fn log(&mut self, a: Var) -> Var {
        self.unary(a, |x| x.max(LOG_FLOOR).ln(), Op::Log(a))
    }

    pub fn clamp(&mut self, a: Var, lo: f64, hi: f64) -> Var {
        self.unary(a, |x| x.clamp(lo, hi), Op::Clamp(a, lo, hi))
    }

    /// Sum of all entries, as a 1×1 tensor.
    pub fn sum(&mut self, a: Var) -> Var {
        let out = Tensor::scalar(self.value(a).sum());
        let rg = self.any_grad(&[a]);
        self.push(out, rg, Op::Sum(a))
    }

    /// Scales row `i` of `x` by `col[i]` (`col` is n×1).
    pub fn mul_col(&mut self, x: Var, col: Var) -> Result<Var> {
        let (xv, cv) = (self.value(x), self.value(col));
        if cv.cols() != 1 || cv.rows() != xv.rows() {
            return Err(Error::shape("mul_col", xv.shape(), cv.shape()));
        }
        let mut out = xv.clone();
        for r in 0..out.rows() {
            let s = cv.data[r];
            out.row_mut(r).iter_mut().for_each(|v| *v *= s);
        }
        let rg = self.any_grad(&[x, col]);
        Ok(self.push(out, rg, Op::MulCol(x, col)))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        let Some(&first) = parts.first() else {
            return Err(Error::Contract("concat_cols needs at least one operand".into()));
        };
        let rows = self.value(first).rows();
        let mut cols = 0;
        for &p in parts {
            let pv = self.value(p);
            if pv.rows() != rows {
                return Err(Error::shape("concat_cols", self.value(first).shape(), pv.shape()));
            }
            cols += pv.cols();
        }
        let mut out = Tensor::zeros(rows, cols);
        for r in 0..rows {
            let mut c0 = 0;
            for &p in parts {
                let src = self.nodes[p.0].value.row(r);
                out.row_mut(r)[c0..c0 + src.len()].copy_from_slice(src);
                c0 += src.len();
            }
        }
        let rg = self.any_grad(parts);
        Ok(self.push(out, rg, Op::ConcatCols(parts.to_vec())))
    }

    /// Columns `start..end` of `a`.
    pub fn slice_cols(&mut self, a: Var, start: usize, end: usize) -> Result<Var> {
        let av = self.value(a);
        if start > end || end > av.cols() {
            return Err(Error::shape("slice_cols", av.shape(), (start, end)));
        }
        let mut out = Tensor::zeros(av.rows(), end - start);
        for r in 0..av.rows() {
            out.row_mut(r).copy_from_slice(&av.row(r)[start..end]);
        }
        let rg = self.any_grad(&[a]);
        Ok(self.push(out, rg, Op::SliceCols(a, start)))
    }

    /// Row `i` of the output is row `index[i]` of `a`.
    pub fn gather_rows(&mut self, a: Var, index: Arc<Vec<usize>>) -> Result<Var> {
        let av = self.value(a);
        if let Some(&bad) = index.iter().find(|&&i| i >= av.rows()) {
            return Err(Error::Range {
                what: "gather row",
                value: bad,
                expected: format!("< {}", av.rows()),
            });
        }
        let mut out = Tensor::zeros(index.len(), av.cols());
        for (r, &i) in index.iter().enumerate() {
            out.row_mut(r).copy_from_slice(av.row(i));
        }
        let rg = self.any_grad(&[a]);
        Ok(self.push(out, rg, Op::GatherRows(a, index)))
    }

    /// Softmax over each segment of the flattened entries of `a`.
    pub fn softmax_segments(&mut self, a: Var, segments: Arc<Segments>) -> Result<Var> {
        let av = self.value(a);
        if segments.len() != av.len() {
            return Err(Error::shape("softmax_segments", av.shape(), (segments.len(), 1)));
        }
        let mut out = Tensor::zeros(av.rows(), av.cols());
        segments.softmax(av.data(), out.data_mut());
        let rg = self.any_grad(&[a]);
        Ok(self.push(out, rg, Op::SegmentSoftmax(a, segments)))
    }

    /// `out[d] = Σ_{e into d} weights[e] · values[src(e)]`; `weights` is E×1.
    pub fn segment_weighted_sum(&mut self, weights: Var, values: Var, edges: Arc<EdgeIndex>) -> Result<Var> {
        let (wv, vv) = (self.value(weights), self.value(values));
        if wv.shape() != (edges.num_edges(), 1) {
            return Err(Error::shape("segment_weighted_sum", wv.shape(), (edges.num_edges(), 1)));
        }
        if vv.rows() != edges.num_sources() {
            return Err(Error::shape("segment_weighted_sum", vv.shape(), (edges.num_sources(), vv.cols())));
        }
        let mut out = Tensor::zeros(edges.num_destinations(), vv.cols());
        for d in 0..edges.num_destinations() {
            let dst = &mut out.data[d * vv.cols..(d + 1) * vv.cols];
            for e in edges.edge_range(d) {
                let w = wv.data[e];
                for (o, x) in dst.iter_mut().zip(vv.row(edges.sources()[e])) {
                    *o += w * x;
                }
            }
        }
        let rg = self.any_grad(&[weights, values]);
        Ok(self.push(out, rg, Op::SegmentWeightedSum(weights, values, edges)))
    }

    /// Backpropagates from a scalar loss.
    pub fn backward(&mut self, loss: Var) -> Result<Gradients> {
        let shape = self.value(loss).shape();
        if shape != (1, 1) {
            return Err(Error::Contract(format!("backward needs a 1x1 loss, got {shape:?}")));
        }
        self.backward_seeded(loss, Tensor::scalar(1.0))
    }

    /// Backpropagates an upstream gradient `seed` (same shape as `output`).
    pub fn backward_seeded(&mut self, output: Var, seed: Tensor) -> Result<Gradients> {
        if self.consumed {
            return Err(Error::Contract("backward already ran on this tape; reset it first".into()));
        }
        if self.nodes.is_empty() {
            return Err(Error::Contract("backward on an empty tape".into()));
        }
        if seed.shape() != self.value(output).shape() {
            return Err(Error::shape("backward seed", self.value(output).shape(), seed.shape()));
        }
        self.consumed = true;
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[output.0] = Some(seed);
        for idx in (0..=output.0).rev() {
            let node = &self.nodes[idx];
            if !node.requires_grad || matches!(node.op, Op::Leaf) {
                continue;
            }
            let Some(g) = grads[idx].take() else { continue };
            self.propagate(idx, &g, &mut grads);
        }
        // Keep only leaf gradients.
        for (idx, node) in self.nodes.iter().enumerate() {
            if !matches!(node.op, Op::Leaf) || !node.requires_grad {
                grads[idx] = None;
            }
        }
        Ok(Gradients { grads })
    }

    fn accumulate(&self, grads: &mut [Option<Tensor>], v: Var, g: Tensor) {
        if !self.nodes[v.0].requires_grad {
            return;
        }
        match &mut grads[v.0] {
            Some(existing) => existing.add_assign(&g),
            slot @ None => *slot = Some(g),
        }
    }

    fn accumulate_with(&self, grads: &mut [Option<Tensor>], v: Var, f: impl FnOnce(&mut Tensor)) {
        if !self.nodes[v.0].requires_grad {
            return;
        }
        let shape = self.nodes[v.0].value.shape();
        let slot = grads[v.0].get_or_insert_with(|| Tensor::zeros(shape.0, shape.1));
        f(slot);
    }

    fn binary_grads(&self, grads: &mut [Option<Tensor>], a: Var, b: Var, g: &Tensor, da: impl Fn(f64, f64, f64) -> f64, db: impl Fn(f64, f64, f64) -> f64) {
        let (av, bv) = (self.value(a), self.value(b));
        let (sa, sb) = (av.shape(), bv.shape());
        let pick = |t: &Tensor, i: usize| if t.len() == 1 { t.data[0] } else { t.data[i] };
        let n = g.len();
        let ga: Vec<f64> = (0..n).map(|i| da(g.data[i], pick(av, i), pick(bv, i))).collect();
        let gb: Vec<f64> = (0..n).map(|i| db(g.data[i], pick(av, i), pick(bv, i))).collect();
        let reduce = |shape: (usize, usize), v: Vec<f64>| {
            if shape == (1, 1) && g.shape() != (1, 1) {
                Tensor::scalar(v.iter().sum())
            } else {
                Tensor {
                    rows: shape.0,
                    cols: shape.1,
                    data: v,
                }
            }
        };
        self.accumulate(grads, a, reduce(sa, ga));
        self.accumulate(grads, b, reduce(sb, gb));
    }

    fn propagate(&self, idx: usize, g: &Tensor, grads: &mut [Option<Tensor>]) {
        let out = &self.nodes[idx].value;
        match &self.nodes[idx].op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                self.accumulate_with(grads, *a, |ga| gemm(g, false, bv, true, ga, true));
                self.accumulate_with(grads, *b, |gb| gemm(av, true, g, false, gb, true));
            }
            Op::SparseMatMul(sparse, b) => {
                self.accumulate_with(grads, *b, |gb| {
                    let width = g.cols();
                    for r in 0..sparse.shape().0 {
                        let gr = g.row(r);
                        for (c, w) in sparse.row(r) {
                            for (o, x) in gb.row_mut(c).iter_mut().zip(gr) {
                                *o += w * x;
                            }
                        }
                    }
                    debug_assert_eq!(gb.cols(), width);
                });
            }
            Op::Add(a, b) => self.binary_grads(grads, *a, *b, g, |g, _, _| g, |g, _, _| g),
            Op::Sub(a, b) => self.binary_grads(grads, *a, *b, g, |g, _, _| g, |g, _, _| -g),
            Op::Mul(a, b) => self.binary_grads(grads, *a, *b, g, |g, _, y| g * y, |g, x, _| g * x),
            Op::Scale(a, k) => self.accumulate(grads, *a, g.map(|x| x * k)),
            Op::Tanh(a) => self.accumulate(grads, *a, zip_map(g, out, |g, y| g * (1.0 - y * y))),
            Op::Sigmoid(a) => self.accumulate(grads, *a, zip_map(g, out, |g, y| g * y * (1.0 - y))),
            Op::Exp(a) => self.accumulate(grads, *a, zip_map(g, out, |g, y| g * y)),
            Op::Log(a) => {
                let x = self.value(*a);
                let d = zip_map(g, x, |g, x| if x >= LOG_FLOOR { g / x } else { 0.0 });
                self.accumulate(grads, *a, d);
            }
            Op::Clamp(a, lo, hi) => {
                let x = self.value(*a);
                let d = zip_map(g, x, |g, x| if x >= *lo && x <= *hi { g } else { 0.0 });
                self.accumulate(grads, *a, d);
            }
            Op::Sum(a) => {
                let s = self.value(*a).shape();
                self.accumulate(grads, *a, Tensor::filled(s.0, s.1, g.data[0]));
            }
            Op::MulCol(x, col) => {
                let (xv, cv) = (self.value(*x), self.value(*col));
                self.accumulate_with(grads, *x, |gx| {
                    for r in 0..xv.rows() {
                        let s = cv.data[r];
                        for (o, gg) in gx.row_mut(r).iter_mut().zip(g.row(r)) {
                            *o += s * gg;
                        }
                    }
                });
                self.accumulate_with(grads, *col, |gc| {
                    for r in 0..xv.rows() {
                        gc.data[r] += xv.row(r).iter().zip(g.row(r)).map(|(a, b)| a * b).sum::<f64>();
                    }
                });
            }
            Op::ConcatCols(parts) => {
                let mut c0 = 0;
                for &p in parts {
                    let w = self.value(p).cols();
                    self.accumulate_with(grads, p, |gp| {
                        for r in 0..g.rows() {
                            for (o, x) in gp.row_mut(r).iter_mut().zip(&g.row(r)[c0..c0 + w]) {
                                *o += x;
                            }
                        }
                    });
                    c0 += w;
                }
            }
            Op::SliceCols(a, start) => {
                let w = g.cols();
                self.accumulate_with(grads, *a, |ga| {
                    for r in 0..g.rows() {
                        for (o, x) in ga.row_mut(r)[*start..*start + w].iter_mut().zip(g.row(r)) {
                            *o += x;
                        }
                    }
                });
            }
            Op::GatherRows(a, index) => {
                self.accumulate_with(grads, *a, |ga| {
                    for (r, &i) in index.iter().enumerate() {
                        for (o, x) in ga.row_mut(i).iter_mut().zip(g.row(r)) {
                            *o += x;
                        }
                    }
                });
            }
            Op::SegmentSoftmax(a, segments) => {
                let mut d = Tensor::zeros(out.rows(), out.cols());
                for s in 0..segments.num_segments() {
                    let seg = segments.segment(s);
                    let dot: f64 = seg.iter().map(|&i| out.data[i] * g.data[i]).sum();
                    for &i in seg {
                        d.data[i] = out.data[i] * (g.data[i] - dot);
                    }
                }
                self.accumulate(grads, *a, d);
            }
            Op::SegmentWeightedSum(w, vals, edges) => {
                let (wv, vv) = (self.value(*w), self.value(*vals));
                self.accumulate_with(grads, *w, |gw| {
                    for (e, (&src, &dst)) in edges.sources().iter().zip(edges.destinations()).enumerate() {
                        gw.data[e] += vv.row(src).iter().zip(g.row(dst)).map(|(a, b)| a * b).sum::<f64>();
                    }
                });
                self.accumulate_with(grads, *vals, |gv| {
                    for (e, (&src, &dst)) in edges.sources().iter().zip(edges.destinations()).enumerate() {
                        let weight = wv.data[e];
                        let cols = gv.cols();
                        let grow = &g.data[dst * cols..(dst + 1) * cols];
                        for (o, x) in gv.row_mut(src).iter_mut().zip(grow) {
                            *o += weight * x;
                        }
                    }
                });
            }
        }
    }
}

fn zip_map(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
    Tensor {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_and_tanh_at_zero() {
        let mut t = Tape::new();
        let x = t.constant(Tensor::scalar(0.0));
        let s = t.sigmoid(x);
        let h = t.tanh(x);
        assert_eq!(t.value(s).data(), &[0.5]);
        assert_eq!(t.value(h).data(), &[0.0]);
    }

    #[test]
    fn sum_gradient_is_ones() {
        let mut t = Tape::new();
        let w = t.param(Tensor::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0]]).unwrap());
        let l = t.sum(w);
        let g = t.backward(l).unwrap();
        assert_eq!(g.get(w).unwrap(), &Tensor::ones(2, 2));
    }

    #[test]
    fn square_gradient_is_twice_input() {
        let mut t = Tape::new();
        let data = Tensor::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0]]).unwrap();
        let w = t.param(data.clone());
        let sq = t.mul(w, w).unwrap();
        let l = t.sum(sq);
        let g = t.backward(l).unwrap();
        assert_eq!(g.get(w).unwrap(), &data.map(|x| 2.0 * x));
    }

    #[test]
    fn backward_rejects_non_scalar_and_repeat() {
        let mut t = Tape::new();
        let w = t.param(Tensor::ones(2, 2));
        assert!(matches!(t.backward(w), Err(Error::Contract(_))));
        let l = t.sum(w);
        t.backward(l).unwrap();
        assert!(matches!(t.backward(l), Err(Error::Contract(_))));
        t.reset();
        assert!(t.is_empty());
    }

    #[test]
    fn log_is_clamped() {
        let mut t = Tape::new();
        let x = t.param(Tensor::column(&[0.0, -1.0, 1.0]));
        let y = t.log(x);
        assert_eq!(t.value(y).data()[0], LOG_FLOOR.ln());
        assert_eq!(t.value(y).data()[2], 0.0);
        let l = t.sum(y);
        let g = t.backward(l).unwrap();
        assert_eq!(g.get(x).unwrap().data(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn scalar_broadcast_reduces_gradient() {
        let mut t = Tape::new();
        let s = t.param(Tensor::scalar(2.0));
        let m = t.param(Tensor::ones(2, 3));
        let p = t.mul(s, m).unwrap();
        let l = t.sum(p);
        let g = t.backward(l).unwrap();
        assert_eq!(g.get(s).unwrap().data(), &[6.0]);
        assert_eq!(g.get(m).unwrap(), &Tensor::filled(2, 3, 2.0));
    }

    #[test]
    fn shape_errors_name_both_shapes() {
        let mut t = Tape::new();
        let a = t.constant(Tensor::zeros(2, 3));
        let b = t.constant(Tensor::zeros(2, 2));
        let msg = t.add(a, b).unwrap_err().to_string();
        assert!(msg.contains("(2, 3)") && msg.contains("(2, 2)"), "{msg}");
    }
}
