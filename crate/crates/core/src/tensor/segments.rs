use crate::error::{Error, Result};

/// Partition of flat entry positions into groups.
///
/// `members[offsets[s]..offsets[s + 1]]` are the entry positions of group `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segments {
    offsets: Vec<usize>,
    members: Vec<usize>,
    len: usize,
}

impl Segments {
    /// Groups entries by an explicit id per entry. Entries keep their relative
    /// order inside each group.
    pub fn from_ids(ids: &[usize]) -> Self {
        let num = ids.iter().max().map_or(0, |&m| m + 1);
        let mut counts = vec![0usize; num + 1];
        for &id in ids {
            counts[id + 1] += 1;
        }
        for s in 0..num {
            counts[s + 1] += counts[s];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut members = vec![0; ids.len()];
        for (pos, &id) in ids.iter().enumerate() {
            members[cursor[id]] = pos;
            cursor[id] += 1;
        }
        Self {
            offsets,
            members,
            len: ids.len(),
        }
    }

    /// Contiguous groups `[offsets[s], offsets[s+1])`.
    pub fn contiguous(offsets: Vec<usize>) -> Result<Self> {
        if offsets.first() != Some(&0) || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Contract("segment offsets must start at 0 and be non-decreasing".into()));
        }
        let len = *offsets.last().unwrap();
        Ok(Self {
            offsets,
            members: (0..len).collect(),
            len,
        })
    }

    /// `rows` groups of `width` consecutive entries (row-wise grouping of a
    /// row-major matrix).
    pub fn rows(rows: usize, width: usize) -> Self {
        Self {
            offsets: (0..=rows).map(|r| r * width).collect(),
            members: (0..rows * width).collect(),
            len: rows * width,
        }
    }

    pub fn num_segments(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of entries covered.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn segment(&self, s: usize) -> &[usize] {
        &self.members[self.offsets[s]..self.offsets[s + 1]]
    }

    pub(crate) fn softmax(&self, x: &[f64], out: &mut [f64]) {
        for s in 0..self.num_segments() {
            let seg = self.segment(s);
            if seg.is_empty() {
                continue;
            }
            let max = seg.iter().map(|&i| x[i]).fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for &i in seg {
                let e = (x[i] - max).exp();
                out[i] = e;
                total += e;
            }
            for &i in seg {
                out[i] /= total;
            }
        }
    }
}

/// Destination-major edge list: the incoming entries of destination `d` are
/// `sources[offsets[d]..offsets[d + 1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeIndex {
    num_sources: usize,
    offsets: Vec<usize>,
    sources: Vec<usize>,
    destinations: Vec<usize>,
    segments: Segments,
}

impl EdgeIndex {
    pub fn new(num_sources: usize, offsets: Vec<usize>, sources: Vec<usize>) -> Result<Self> {
        if offsets.last() != Some(&sources.len()) {
            return Err(Error::Contract("edge offsets do not cover the source list".into()));
        }
        if let Some(&bad) = sources.iter().find(|&&s| s >= num_sources) {
            return Err(Error::Range {
                what: "edge source",
                value: bad,
                expected: format!("< {num_sources}"),
            });
        }
        let segments = Segments::contiguous(offsets.clone())?;
        let mut destinations = Vec::with_capacity(sources.len());
        for d in 0..offsets.len() - 1 {
            destinations.extend(std::iter::repeat_n(d, offsets[d + 1] - offsets[d]));
        }
        Ok(Self {
            num_sources,
            offsets,
            sources,
            destinations,
            segments,
        })
    }

    /// Builds from per-destination source lists.
    pub fn from_lists(num_sources: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut sources = Vec::new();
        for l in lists {
            sources.extend_from_slice(l);
            offsets.push(sources.len());
        }
        Self::new(num_sources, offsets, sources)
    }

    pub fn num_sources(&self) -> usize {
        self.num_sources
    }

    pub fn num_destinations(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    /// Destination of each edge, aligned with [`Self::sources`].
    pub fn destinations(&self) -> &[usize] {
        &self.destinations
    }

    pub fn incoming(&self, d: usize) -> &[usize] {
        &self.sources[self.offsets[d]..self.offsets[d + 1]]
    }

    pub fn edge_range(&self, d: usize) -> std::ops::Range<usize> {
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn segments(&self) -> &Segments {
        &self.segments
    }
}

/// Constant sparse matrix in CSR form, used as the left operand of
/// [`Tape::sparse_matmul`](super::Tape::sparse_matmul).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRows {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseRows {
    pub fn new(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut offsets = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in &rows {
            for &(c, v) in r {
                if c >= cols {
                    return Err(Error::Range {
                        what: "sparse column",
                        value: c,
                        expected: format!("< {cols}"),
                    });
                }
                indices.push(c);
                values.push(v);
            }
            offsets.push(indices.len());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            offsets,
            indices,
            values,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.offsets[r]..self.offsets[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn to_dense(&self) -> super::Tensor {
        let mut t = super::Tensor::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                let cur = t.get(r, c);
                t.set(r, c, cur + v);
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_ids_groups_stably() {
        let s = Segments::from_ids(&[2, 0, 2, 1, 0]);
        assert_eq!(s.num_segments(), 3);
        assert_eq!(s.segment(0), &[1, 4]);
        assert_eq!(s.segment(1), &[3]);
        assert_eq!(s.segment(2), &[0, 2]);
    }

    #[test]
    fn softmax_singleton_and_pair() {
        let s = Segments::from_ids(&[0, 1, 1]);
        let mut out = vec![0.0; 3];
        s.softmax(&[7.0, 0.3, 0.3], &mut out);
        assert_eq!(out, vec![1.0, 0.5, 0.5]);
    }

    #[test]
    fn edge_index_rejects_out_of_range_source() {
        assert!(EdgeIndex::from_lists(2, &[vec![0, 2]]).is_err());
        let e = EdgeIndex::from_lists(3, &[vec![0, 2], vec![], vec![1]]).unwrap();
        assert_eq!(e.destinations(), &[0, 0, 2]);
        assert_eq!(e.incoming(2), &[1]);
    }
}
