use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::DirectedGraph;
use crate::error::{Error, Result};

/// Counts of edges dropped while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LoadStats {
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Reads a `src<TAB>dst` edge file. `#` lines and blank lines are ignored.
pub fn load_graph(path: impl AsRef<Path>) -> Result<(DirectedGraph, LoadStats)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edges(&text, path)
}

/// Parses edge-file text; `origin` is only used in error messages.
pub fn parse_edges(text: &str, origin: &Path) -> Result<(DirectedGraph, LoadStats)> {
    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut intern = |id: &str| -> usize {
        if let Some(&i) = index.get(id) {
            return i;
        }
        ids.push(id.to_owned());
        index.insert(id.to_owned(), ids.len() - 1);
        ids.len() - 1
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(src), Some(dst), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: lineno + 1,
                msg: format!("expected \"src<TAB>dst\", got {line:?}"),
            });
        };
        if src.is_empty() || dst.is_empty() {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: lineno + 1,
                msg: "empty node id".into(),
            });
        }
        let s = intern(src);
        let t = intern(dst);
        edges.push((s, t));
    }
    if ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    DirectedGraph::from_edges(ids, &edges)
}

/// Writes `src<TAB>dst` lines using the graph's external ids.
pub fn write_edge_list<W: Write>(
    mut out: W,
    ids: &[String],
    edges: impl IntoIterator<Item = (usize, usize)>,
) -> std::io::Result<()> {
    for (s, t) in edges {
        writeln!(out, "{}\t{}", ids[s], ids[t])?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<(DirectedGraph, LoadStats)> {
        parse_edges(text, Path::new("test.tsv"))
    }

    #[test]
    fn two_edges_three_nodes() {
        let (g, stats) = parse("a\tb\nb\tc").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert_eq!(stats, LoadStats::default());
        assert_eq!(g.index_of("c"), Some(2));
    }

    #[test]
    fn self_loop_dropped() {
        let (g, stats) = parse("a\ta\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
        assert_eq!(stats.self_loops, 1);
    }

    #[test]
    fn duplicate_counted() {
        let (g, stats) = parse("# header\na\tb\na\tb\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(stats.duplicates, 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse("a\tb\nc d\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn empty_file_is_error() {
        assert!(matches!(parse("# nothing\n\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn reserialize_roundtrip() {
        let (g, _) = parse("x\ty\ny\tz\nz\tx\nq\tx\n").unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, g.ids(), g.edges()).unwrap();
        let (g2, _) = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        let named = |g: &DirectedGraph| {
            let mut e: Vec<(String, String)> = g.edges().map(|(s, t)| (g.id(s).to_owned(), g.id(t).to_owned())).collect();
            e.sort();
            e
        };
        assert_eq!(named(&g), named(&g2));
    }
}
