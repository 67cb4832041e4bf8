use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DirectedGraph;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Feature family; each family gets its own embedding map in the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Profile,
    Behavior,
    Loan,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 3] = [FeatureGroup::Profile, FeatureGroup::Behavior, FeatureGroup::Loan];

    pub fn prefix(self) -> &'static str {
        match self {
            FeatureGroup::Profile => "profile_",
            FeatureGroup::Behavior => "behavior_",
            FeatureGroup::Loan => "loan_",
        }
    }

    pub fn from_column(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| name.starts_with(g.prefix()))
    }
}

/// Raw numeric features aligned with graph node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    values: Tensor,
    names: Vec<String>,
    groups: Vec<FeatureGroup>,
    imputed_rows: usize,
}

impl FeatureTable {
    pub fn new(values: Tensor, names: Vec<String>, groups: Vec<FeatureGroup>) -> Result<Self> {
        if names.len() != values.cols() || groups.len() != values.cols() {
            return Err(Error::Value(format!(
                "feature table has {} columns but {} names and {} group tags",
                values.cols(),
                names.len(),
                groups.len()
            )));
        }
        Ok(Self {
            values,
            names,
            groups,
            imputed_rows: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    pub fn values(&self) -> &Tensor {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.groups
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values.get(row, col)
    }

    /// Column indices belonging to `group`, in file order.
    pub fn group_columns(&self, group: FeatureGroup) -> Vec<usize> {
        (0..self.cols()).filter(|&c| self.groups[c] == group).collect()
    }

    /// Graph nodes that had no row in the source file.
    pub fn imputed_rows(&self) -> usize {
        self.imputed_rows
    }

    /// Reads a feature CSV whose first column is `id` and whose remaining
    /// columns are prefixed `profile_`, `behavior_` or `loan_`.
    ///
    /// Graph nodes missing from the file get per-column medians. Rows for ids
    /// that are not graph nodes are ignored.
    pub fn load(path: impl AsRef<Path>, graph: &DirectedGraph) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, path, graph)
    }

    pub fn from_reader<R: std::io::Read>(reader: R, origin: &Path, graph: &DirectedGraph) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let format_err = |msg: String| Error::Format {
            path: origin.to_path_buf(),
            msg,
        };
        let header = rdr.headers().map_err(|e| format_err(e.to_string()))?.clone();
        if header.get(0).map(str::trim) != Some("id") {
            return Err(format_err("first column must be \"id\"".into()));
        }
        let names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_owned()).collect();
        let groups = names
            .iter()
            .map(|name| {
                FeatureGroup::from_column(name)
                    .ok_or_else(|| format_err(format!("column {name:?} lacks a profile_/behavior_/loan_ prefix")))
            })
            .collect::<Result<Vec<_>>>()?;

        let n = graph.node_count();
        let d = names.len();
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; n];
        for (r, record) in rdr.records().enumerate() {
            let line = r + 2;
            let record = record.map_err(|e| Error::Parse {
                path: origin.to_path_buf(),
                line,
                msg: e.to_string(),
            })?;
            if record.len() != d + 1 {
                return Err(Error::Parse {
                    path: origin.to_path_buf(),
                    line,
                    msg: format!("expected {} cells, got {}", d + 1, record.len()),
                });
            }
            let id = record[0].trim();
            let mut vals = Vec::with_capacity(d);
            for (c, cell) in record.iter().skip(1).enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                    path: origin.to_path_buf(),
                    line,
                    msg: format!("column {} ({}): non-numeric value {cell:?}", c + 2, names[c]),
                })?;
                vals.push(v);
            }
            if let Some(u) = graph.index_of(id) {
                if rows[u].is_some() {
                    return Err(Error::Parse {
                        path: origin.to_path_buf(),
                        line,
                        msg: format!("duplicate row for node {id:?}"),
                    });
                }
                rows[u] = Some(vals);
            }
        }

        let medians: Vec<f64> = (0..d)
            .map(|c| {
                let mut col: Vec<f64> = rows.iter().flatten().map(|r| r[c]).collect();
                median(&mut col)
            })
            .collect();
        let mut values = Tensor::zeros(n, d);
        let mut imputed = 0;
        for (u, row) in rows.into_iter().enumerate() {
            match row {
                Some(r) => values.row_mut(u).copy_from_slice(&r),
                None => {
                    imputed += 1;
                    values.row_mut(u).copy_from_slice(&medians);
                }
            }
        }
        let mut table = Self::new(values, names, groups)?;
        table.imputed_rows = imputed;
        Ok(table)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W, ids: &[String]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Value(e.to_string());
        let mut header = vec!["id".to_owned()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for (u, id) in ids.iter().enumerate() {
            let mut rec = vec![id.clone()];
            rec.extend(self.values.row(u).iter().map(|v| format!("{v}")));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Value(e.to_string()))?;
        Ok(())
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;

    fn graph(n: usize) -> DirectedGraph {
        let ids = (0..n).map(|i| format!("n{i}")).collect();
        DirectedGraph::from_edges(ids, &[]).unwrap().0
    }

    fn load(text: &str, g: &DirectedGraph) -> Result<FeatureTable> {
        FeatureTable::from_reader(text.as_bytes(), Path::new("f.csv"), g)
    }

    #[test]
    fn header_assigns_groups() {
        let g = graph(3);
        let t = load("id,profile_age,loan_amt\nn0,1,2\nn1,3,4\nn2,5,6\n", &g).unwrap();
        assert_eq!(t.shape(), (3, 2));
        assert_eq!(t.groups(), &[FeatureGroup::Profile, FeatureGroup::Loan]);
        assert_eq!(t.imputed_rows(), 0);
    }

    #[test]
    fn missing_row_gets_median() {
        let g = graph(4);
        let t = load("id,profile_a\nn0,1\nn1,10\nn2,3\n", &g).unwrap();
        assert_eq!(t.imputed_rows(), 1);
        assert_eq!(t.get(3, 0), 3.0);
    }

    #[test]
    fn unknown_prefix_rejected() {
        let err = load("id,weird\nn0,1\n", &graph(1)).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }

    #[test]
    fn non_numeric_reports_row_and_column() {
        let err = load("id,profile_a,behavior_b\nn0,1,2\nn1,3,x\n", &graph(2)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":3:") && msg.contains("column 3"), "{msg}");
    }
}
