//! Undirected multigraphs over an indexed edge list, trails, and the
//! plain-text edge-list format.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::edgeset::{EdgeId, EdgeSet};
use crate::error::{Error, Result};

/// Largest edge count accepted by any solver.
pub const MAX_EDGES: usize = 30;

/// An undirected multigraph. Edge identity is the position in `edges`;
/// parallel edges and self-loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    incidence: Vec<EdgeSet>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.len() > MAX_EDGES {
            return Err(Error::out_of_range(
                "m",
                edges.len(),
                format!("m <= {MAX_EDGES}"),
            ));
        }
        for &(a, b) in &edges {
            for x in [a, b] {
                if x >= vertex_count {
                    return Err(Error::out_of_range(
                        "vertex",
                        x,
                        format!("0 <= vertex < {vertex_count}"),
                    ));
                }
            }
        }
        let incidence = (0..edges.len())
            .map(|e| {
                let (a, b) = edges[e];
                edges
                    .iter()
                    .enumerate()
                    .filter(|&(f, &(c, d))| f != e && (c == a || c == b || d == a || d == b))
                    .map(|(f, _)| f)
                    .collect()
            })
            .collect();
        Ok(Graph {
            vertex_count,
            edges,
            incidence,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (usize, usize) {
        self.edges[e]
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::full(self.edges.len())
    }

    /// Every other edge sharing at least one endpoint with `e`.
    pub fn incident_edges(&self, e: EdgeId) -> EdgeSet {
        self.incidence[e]
    }

    /// Both traversals of every edge, edge-major.
    pub fn dir_edges(&self) -> impl Iterator<Item = DirEdge> + '_ {
        (0..self.edges.len()).flat_map(|e| [DirEdge::forward(e), DirEdge::backward(e)])
    }

    pub fn tail(&self, d: DirEdge) -> usize {
        let (a, b) = self.edges[d.edge()];
        if d.is_forward() {
            a
        } else {
            b
        }
    }

    pub fn head(&self, d: DirEdge) -> usize {
        let (a, b) = self.edges[d.edge()];
        if d.is_forward() {
            b
        } else {
            a
        }
    }

    /// Whether two traversals walk the same edge between the same vertices.
    /// The two traversals of a self-loop coincide.
    pub fn same_traversal(&self, a: DirEdge, b: DirEdge) -> bool {
        a.edge() == b.edge() && self.tail(a) == self.tail(b)
    }

    /// Parse the edge-list text format: a header `n m`, then `m` lines `u v`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| {
            let l = l.strip_suffix('\r').unwrap_or(l);
            (i + 1, l)
        });
        let (hline, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let [n, m] = parse_pair(hline, header, "header")?;
        if m > MAX_EDGES {
            return Err(Error::Parse {
                line: hline,
                message: format!("edge count {m} exceeds the cap of {MAX_EDGES}"),
            });
        }
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, text) = lines.next().ok_or_else(|| Error::Parse {
                line: hline + edges.len() + 1,
                message: format!("expected {m} edge lines, found {}", edges.len()),
            })?;
            let [u, v] = parse_pair(line, text, "edge")?;
            for x in [u, v] {
                if x >= n {
                    return Err(Error::Parse {
                        line,
                        message: format!("vertex {x} out of range"),
                    });
                }
            }
            edges.push((u, v));
        }
        for (line, rest) in lines {
            if !rest.trim().is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "unexpected content after the last edge".into(),
                });
            }
        }
        Graph::new(n, edges)
    }

    /// Canonical LF-terminated edge-list text.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_edge_list().as_bytes())?;
        Ok(())
    }
}

fn parse_pair(line: usize, text: &str, what: &str) -> Result<[usize; 2]> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::Parse {
            line,
            message: format!(
                "malformed {what}: expected two integers, found {} tokens",
                toks.len()
            ),
        });
    }
    let mut out = [0; 2];
    for (slot, tok) in out.iter_mut().zip(&toks) {
        *slot = tok.parse().map_err(|_| Error::Parse {
            line,
            message: format!("non-integer token {tok:?}"),
        })?;
    }
    Ok(out)
}

/// A graph with `m` edges drawn independently and uniformly from the
/// `n(n+1)/2` unordered vertex pairs (self-loops included).
pub fn random_graph(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::out_of_range("n", n, "n >= 1"));
    }
    if m > MAX_EDGES {
        return Err(Error::out_of_range(
            "m",
            m,
            format!("0 <= m <= {MAX_EDGES}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = n * (n + 1) / 2;
    let edges = (0..m)
        .map(|_| unrank_pair(rng.gen_range(0..pairs), n))
        .collect();
    Graph::new(n, edges)
}

fn unrank_pair(mut r: usize, n: usize) -> (usize, usize) {
    for a in 0..n {
        let row = n - a;
        if r < row {
            return (a, a + r);
        }
        r -= row;
    }
    unreachable!("rank out of range")
}

/// One traversal of an edge. `forward` walks `(a, b)` from `a` to `b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DirEdge(u8);

impl DirEdge {
    pub fn new(edge: EdgeId, forward: bool) -> Self {
        debug_assert!(edge < 128);
        DirEdge((edge as u8) << 1 | u8::from(!forward))
    }

    pub fn forward(edge: EdgeId) -> Self {
        DirEdge::new(edge, true)
    }

    pub fn backward(edge: EdgeId) -> Self {
        DirEdge::new(edge, false)
    }

    pub fn from_id(id: u8) -> Self {
        DirEdge(id)
    }

    /// Dense id `2 * edge + (0 forward | 1 backward)`.
    pub fn id(self) -> u8 {
        self.0
    }

    pub fn edge(self) -> EdgeId {
        (self.0 >> 1) as usize
    }

    pub fn is_forward(self) -> bool {
        self.0 & 1 == 0
    }

    #[must_use]
    pub fn reversed(self) -> Self {
        DirEdge(self.0 ^ 1)
    }
}

impl fmt::Debug for DirEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            self.edge(),
            if self.is_forward() { "+" } else { "-" }
        )
    }
}

impl fmt::Display for DirEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// An ordered edge sequence; a valid trail walks every edge once.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trail(pub Vec<EdgeId>);

impl Trail {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn first(&self) -> Option<EdgeId> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<EdgeId> {
        self.0.last().copied()
    }
}

impl From<Vec<EdgeId>> for Trail {
    fn from(v: Vec<EdgeId>) -> Self {
        Trail(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TrailViolation {
    #[error("edge index {edge} at position {position} is not an edge of the graph")]
    BadIndex { position: usize, edge: EdgeId },
    #[error("duplicate edge {edge} at position {position}")]
    DuplicateEdge { position: usize, edge: EdgeId },
    #[error("edges {prev} and {next} share no vertex at position {position}")]
    Disconnected {
        position: usize,
        prev: EdgeId,
        next: EdgeId,
    },
}

/// Check that `t` is an edge-simple walk in `g`.
///
/// Both orientations of the first edge are tried; after that the walk is
/// forced, each edge leaving from the other end of the one it attaches to.
pub fn validate_trail(g: &Graph, t: &Trail) -> Result<(), TrailViolation> {
    let m = g.edge_count();
    let mut seen = EdgeSet::EMPTY;
    for (position, &edge) in t.0.iter().enumerate() {
        if edge >= m {
            return Err(TrailViolation::BadIndex { position, edge });
        }
        if seen.contains(edge) {
            return Err(TrailViolation::DuplicateEdge { position, edge });
        }
        seen = seen.with(edge);
    }
    let Some(&first) = t.0.first() else {
        return Ok(());
    };
    let (a, b) = g.endpoints(first);
    let mut best_failure: Option<TrailViolation> = None;
    for start_head in [b, a] {
        match walk_from(g, &t.0, start_head) {
            Ok(()) => return Ok(()),
            Err(v) => {
                let further = match (&best_failure, &v) {
                    (
                        Some(TrailViolation::Disconnected { position: p0, .. }),
                        TrailViolation::Disconnected { position: p1, .. },
                    ) => p1 > p0,
                    (None, _) => true,
                    _ => false,
                };
                if further {
                    best_failure = Some(v);
                }
            }
        }
    }
    Err(best_failure.expect("at least one orientation was tried"))
}

fn walk_from(g: &Graph, edges: &[EdgeId], mut head: usize) -> Result<(), TrailViolation> {
    for (i, pair) in edges.windows(2).enumerate() {
        let (c, d) = g.endpoints(pair[1]);
        head = if c == head {
            d
        } else if d == head {
            c
        } else {
            return Err(TrailViolation::Disconnected {
                position: i + 1,
                prev: pair[0],
                next: pair[1],
            });
        };
    }
    Ok(())
}
