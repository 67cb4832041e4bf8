use serde::Serialize;

use crate::error::{Error, Result};

/// Off-diagonal cells of a 3-node adjacency matrix, one bit each, in code
/// bit order.
pub const CELLS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Conventional M-A-N names with one prototype edge list each.
const NAMED: [(&str, &[(usize, usize)]); 13] = [
    ("021D", &[(1, 0), (1, 2)]),
    ("021U", &[(0, 1), (2, 1)]),
    ("021C", &[(0, 1), (1, 2)]),
    ("111D", &[(0, 2), (2, 0), (1, 2)]),
    ("111U", &[(0, 2), (2, 0), (2, 1)]),
    ("030T", &[(0, 1), (2, 1), (0, 2)]),
    ("030C", &[(1, 0), (2, 1), (0, 2)]),
    ("201", &[(0, 1), (1, 0), (0, 2), (2, 0)]),
    ("120D", &[(1, 2), (1, 0), (0, 2), (2, 0)]),
    ("120U", &[(0, 1), (2, 1), (0, 2), (2, 0)]),
    ("120C", &[(0, 1), (1, 2), (0, 2), (2, 0)]),
    ("210", &[(0, 1), (1, 2), (2, 1), (0, 2), (2, 0)]),
    ("300", &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]),
];

/// 6-bit code of a labeled 3-node digraph.
pub fn code_of(edges: &[(usize, usize)]) -> u8 {
    edges.iter().fold(0u8, |code, &e| {
        let bit = CELLS.iter().position(|&c| c == e).expect("edge between distinct nodes 0..3");
        code | (1 << bit)
    })
}

/// Edges encoded by `code`.
pub fn edges_of(code: u8) -> Vec<(usize, usize)> {
    CELLS
        .iter()
        .enumerate()
        .filter(|(bit, _)| code & (1 << bit) != 0)
        .map(|(_, &c)| c)
        .collect()
}

fn relabel(code: u8, perm: [usize; 3]) -> u8 {
    let moved: Vec<(usize, usize)> = edges_of(code).into_iter().map(|(i, j)| (perm[i], perm[j])).collect();
    code_of(&moved)
}

/// Minimum code over all six relabelings.
pub fn canonical_code(code: u8) -> u8 {
    PERMUTATIONS.iter().map(|&p| relabel(code, p)).min().unwrap()
}

/// Number of node pairs joined by at least one edge.
fn linked_pairs(code: u8) -> usize {
    [(0, 1), (0, 2), (1, 2)]
        .iter()
        .filter(|&&(i, j)| {
            let fwd = CELLS.iter().position(|&c| c == (i, j)).unwrap();
            let back = CELLS.iter().position(|&c| c == (j, i)).unwrap();
            code & ((1 << fwd) | (1 << back)) != 0
        })
        .count()
}

/// A connected directed 3-node motif up to isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriadClass {
    /// 1-based position in the catalog.
    pub index: usize,
    pub canonical_code: u8,
    pub name: &'static str,
    pub edge_count: u32,
    /// The undirected skeleton is a triangle.
    pub contains_triangle: bool,
    /// Edges of the canonical representative.
    pub edges: Vec<(usize, usize)>,
}

/// The 13 weakly connected directed triads, sorted by canonical code.
#[derive(Debug, Clone)]
pub struct MotifCatalog {
    classes: Vec<TriadClass>,
    /// Class index (1-based) for every labeled code; 0 for disconnected codes.
    lookup: [u8; 64],
}

impl MotifCatalog {
    /// Enumerates all 64 labeled digraphs on three nodes and groups the weakly
    /// connected ones by canonical code.
    pub fn build() -> Self {
        let mut codes: Vec<u8> = (0u8..64)
            .filter(|&c| linked_pairs(c) >= 2)
            .map(canonical_code)
            .collect();
        codes.sort_unstable();
        codes.dedup();
        let classes: Vec<TriadClass> = codes
            .iter()
            .enumerate()
            .map(|(i, &code)| TriadClass {
                index: i + 1,
                canonical_code: code,
                name: NAMED
                    .iter()
                    .find(|(_, e)| canonical_code(code_of(e)) == code)
                    .map_or("?", |(n, _)| n),
                edge_count: code.count_ones(),
                contains_triangle: linked_pairs(code) == 3,
                edges: edges_of(code),
            })
            .collect();
        let mut lookup = [0u8; 64];
        for c in 0u8..64 {
            if linked_pairs(c) >= 2 {
                let canon = canonical_code(c);
                lookup[c as usize] = (codes.iter().position(|&x| x == canon).unwrap() + 1) as u8;
            }
        }
        Self { classes, lookup }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[TriadClass] {
        &self.classes
    }

    /// Class `k` (1-based).
    pub fn class(&self, k: usize) -> Result<&TriadClass> {
        if k == 0 || k > self.classes.len() {
            return Err(Error::Range {
                what: "motif index",
                value: k,
                expected: format!("1..={}", self.classes.len()),
            });
        }
        Ok(&self.classes[k - 1])
    }

    /// Class index (1-based) of a labeled code, or `None` if disconnected.
    #[inline]
    pub fn classify_code(&self, code: u8) -> Option<usize> {
        match self.lookup[code as usize & 63] {
            0 => None,
            k => Some(k as usize),
        }
    }

    pub fn by_name(&self, name: &str) -> Option<&TriadClass> {
        self.classes.iter().find(|c| c.name == name)
    }
}

impl Default for MotifCatalog {
    fn default() -> Self {
        Self::build()
    }
}
