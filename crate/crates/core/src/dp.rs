//! Classical engines: the memoized `L(S, v, u)` recurrence, the fixed-size
//! layer precomputation, and an exact-set subset DP for the whole graph.
//!
//! Table keys use edge *traversals* ([`DirEdge`]) for the two end edges. Two
//! trails that end on the same edge but leave it through different vertices
//! extend differently, so a key on bare edge indices cannot be split and
//! recombined soundly. Edge-level values are the maximum over traversals
//! ([`get_len_edges`]).

use std::io::{Read, Write};

use rustc_hash::FxHashMap;

use crate::edgeset::{binomial, EdgeId, EdgeSet};
use crate::error::{Error, Result};
use crate::graph::{DirEdge, Graph, Trail};
use crate::oracle::OracleResult;

/// A trail length, or `None` when no trail satisfies the constraints.
/// `None` orders below every length.
pub type Len = Option<u32>;

/// Default `alpha`, the fraction shaved off the quarter-size layer.
pub const DEFAULT_ALPHA: f64 = 0.055;

/// Default cap on precomputed table entries.
pub const DEFAULT_MEMORY_BUDGET: u128 = 1 << 28;

/// Largest edge count for [`full_dp_longest_trail`].
pub const FULL_DP_MAX_EDGES: usize = 20;

/// Length of two trails glued at a shared pivot edge, counted once.
pub fn combine(a: Len, b: Len) -> Len {
    Some(a? + b? - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpEntry {
    pub length: Len,
    /// End traversal of the trail before `u` was appended.
    pub pred: Option<DirEdge>,
}

fn key(set: EdgeSet, v: DirEdge, u: DirEdge) -> u64 {
    (set.bits() as u64) << 16 | (v.id() as u64) << 8 | u.id() as u64
}

fn unkey(k: u64) -> (EdgeSet, DirEdge, DirEdge) {
    (
        EdgeSet::from_bits((k >> 16) as u32),
        DirEdge::from_id((k >> 8) as u8),
        DirEdge::from_id(k as u8),
    )
}

/// Memo of `L(S, v, u)` with predecessor witnesses.
#[derive(Clone, Debug, Default)]
pub struct DpTable {
    entries: FxHashMap<u64, DpEntry>,
}

impl DpTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, set: EdgeSet, v: DirEdge, u: DirEdge) -> Option<DpEntry> {
        self.entries.get(&key(set, v, u)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((EdgeSet, DirEdge, DirEdge), DpEntry)> + '_ {
        self.entries.iter().map(|(&k, &e)| (unkey(k), e))
    }

    fn insert(&mut self, set: EdgeSet, v: DirEdge, u: DirEdge, entry: DpEntry) {
        self.entries.insert(key(set, v, u), entry);
    }

    /// Fold `other` into `self`. Shared keys must carry identical entries.
    pub fn merge(&mut self, other: DpTable) -> Result<()> {
        for (k, e) in other.entries {
            match self.entries.get(&k) {
                Some(mine) if *mine != e => {
                    let (set, v, u) = unkey(k);
                    return Err(Error::Witness(format!(
                        "merge conflict at ({set:?}, {v}, {u}): {mine:?} vs {e:?}"
                    )));
                }
                Some(_) => {}
                None => {
                    self.entries.insert(k, e);
                }
            }
        }
        Ok(())
    }

    /// Dump as fixed 16-byte little-endian records, sorted by key:
    /// set (8 bytes), v (u16), u (u16), length (i16, -1 for none),
    /// predecessor (u16, 0xFFFF for none). `v`, `u` and the predecessor are
    /// traversal ids `2 * edge + direction`.
    pub fn write_spill<W: Write>(&self, mut w: W) -> Result<()> {
        let mut keys: Vec<u64> = self.entries.keys().copied().collect();
        keys.sort_unstable();
        for k in keys {
            let e = self.entries[&k];
            let (set, v, u) = unkey(k);
            let mut rec = [0u8; 16];
            rec[..8].copy_from_slice(&(set.bits() as u64).to_le_bytes());
            rec[8..10].copy_from_slice(&(v.id() as u16).to_le_bytes());
            rec[10..12].copy_from_slice(&(u.id() as u16).to_le_bytes());
            let len = e.length.map_or(-1, |l| l as i16);
            rec[12..14].copy_from_slice(&len.to_le_bytes());
            let pred = e.pred.map_or(0xFFFF, |p| p.id() as u16);
            rec[14..16].copy_from_slice(&pred.to_le_bytes());
            w.write_all(&rec)?;
        }
        Ok(())
    }

    pub fn read_spill<R: Read>(mut r: R) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() % 16 != 0 {
            return Err(Error::Io(format!(
                "spill length {} is not a multiple of 16",
                buf.len()
            )));
        }
        let mut table = DpTable::new();
        for rec in buf.chunks_exact(16) {
            let bits = u64::from_le_bytes(rec[..8].try_into().unwrap());
            let v = u16::from_le_bytes([rec[8], rec[9]]);
            let u = u16::from_le_bytes([rec[10], rec[11]]);
            let len = i16::from_le_bytes([rec[12], rec[13]]);
            let pred = u16::from_le_bytes([rec[14], rec[15]]);
            let set = EdgeSet::from_bits(
                u32::try_from(bits)
                    .map_err(|_| Error::Io(format!("edge set {bits:#x} wider than 32 edges")))?,
            );
            let entry = DpEntry {
                length: (len >= 0).then_some(len as u32),
                pred: (pred != 0xFFFF).then(|| DirEdge::from_id(pred as u8)),
            };
            table.insert(
                set,
                DirEdge::from_id(v as u8),
                DirEdge::from_id(u as u8),
                entry,
            );
        }
        Ok(table)
    }
}

/// Cardinality of the classically precomputed layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerSpec {
    pub alpha: f64,
    pub k_pre: usize,
}

impl LayerSpec {
    /// `k_pre = ceil((1 - alpha) * ceil(ceil(m / 2) / 2))`, kept in `1..=m`.
    pub fn for_edges(m: usize, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let quarter = m.div_ceil(2).div_ceil(2);
        let raw = ((1.0 - alpha) * quarter as f64 - 1e-9).ceil() as usize;
        Ok(LayerSpec {
            alpha,
            k_pre: raw.clamp(1, m.max(1)),
        })
    }

    pub fn with_k(alpha: f64, k_pre: usize) -> Self {
        LayerSpec { alpha, k_pre }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::out_of_range("alpha", alpha, "0 < alpha < 1"));
    }
    Ok(())
}

/// `L(set, v, u)`: the longest trail using only edges of `set` that starts
/// with traversal `v` and ends with traversal `u`. Memoizes every value it
/// computes in `table`.
pub fn get_len(g: &Graph, set: EdgeSet, v: DirEdge, u: DirEdge, table: &mut DpTable) -> Len {
    if !set.contains(v.edge()) || !set.contains(u.edge()) {
        return None;
    }
    if let Some(e) = table.get(set, v, u) {
        return e.length;
    }
    let entry = if v.edge() == u.edge() {
        // Edge-simple: a trail that starts and ends on one edge is that edge.
        DpEntry {
            length: g.same_traversal(v, u).then_some(1),
            pred: None,
        }
    } else {
        let rest = set.without(u.edge());
        let tail = g.tail(u);
        let mut best = DpEntry {
            length: None,
            pred: None,
        };
        for y_edge in g.incident_edges(u.edge()).intersection(rest) {
            let (a, b) = g.endpoints(y_edge);
            let arrivals = [
                (b, DirEdge::forward(y_edge)),
                (a, DirEdge::backward(y_edge)),
            ];
            for (head, y) in arrivals.into_iter().take(if a == b { 1 } else { 2 }) {
                if head != tail {
                    continue;
                }
                let cand = get_len(g, rest, v, y, table).map(|l| l + 1);
                if cand > best.length {
                    best = DpEntry {
                        length: cand,
                        pred: Some(y),
                    };
                }
            }
        }
        best
    };
    table.insert(set, v, u, entry);
    entry.length
}

/// Edge-level `L`: the best over both traversals of each end edge.
pub fn get_len_edges(g: &Graph, set: EdgeSet, v: EdgeId, u: EdgeId, table: &mut DpTable) -> Len {
    let mut best = None;
    for vd in [DirEdge::forward(v), DirEdge::backward(v)] {
        for ud in [DirEdge::forward(u), DirEdge::backward(u)] {
            best = best.max(get_len(g, set, vd, ud, table));
        }
    }
    best
}

/// Upper bound on the entries [`precompute_layer`] stores.
pub fn layer_entry_estimate(m: usize, k_pre: usize) -> u128 {
    (1..=k_pre.min(m))
        .map(|k| binomial(m as u64, k as u64).saturating_mul(4 * (k * k) as u128))
        .fold(0u128, u128::saturating_add)
}

/// Fill a table with `L(S, v, u)` for every `S` with `|S| <= k_pre` and
/// every pair of traversals of edges in `S`.
pub fn precompute_layer(g: &Graph, spec: LayerSpec, memory_budget: u128) -> Result<DpTable> {
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::out_of_range("m", m, "m >= 1"));
    }
    if spec.k_pre == 0 || spec.k_pre > m {
        return Err(Error::out_of_range(
            "k_pre",
            spec.k_pre,
            format!("1 <= k_pre <= {m}"),
        ));
    }
    let estimate = layer_entry_estimate(m, spec.k_pre);
    if estimate > memory_budget {
        return Err(Error::MemoryBudget {
            estimate,
            budget: memory_budget,
        });
    }
    let mut table = DpTable::new();
    table.entries.reserve(estimate as usize);
    // Ascending sizes, so each recursion step lands on a finished entry.
    for k in 1..=spec.k_pre {
        for set in g.all_edges().subsets_of_size(k) {
            let dirs: Vec<DirEdge> = set
                .iter()
                .flat_map(|e| [DirEdge::forward(e), DirEdge::backward(e)])
                .collect();
            for &v in &dirs {
                for &u in &dirs {
                    get_len(g, set, v, u, &mut table);
                }
            }
        }
    }
    Ok(table)
}

/// Recover the trail behind a table entry by walking predecessors.
pub fn reconstruct_path(table: &DpTable, set: EdgeSet, v: DirEdge, u: DirEdge) -> Result<Trail> {
    let mut rev = Vec::new();
    let (mut s, mut end) = (set, u);
    loop {
        let entry = table
            .get(s, v, end)
            .ok_or(Error::MissingEntry { set: s, v, u: end })?;
        if entry.length.is_none() {
            return Err(Error::MissingEntry { set: s, v, u: end });
        }
        rev.push(end.edge());
        match entry.pred {
            Some(p) => {
                s = s.without(end.edge());
                end = p;
            }
            None => break,
        }
    }
    rev.reverse();
    Ok(Trail(rev))
}

/// Exact longest trail by dynamic programming over exact edge sets:
/// `reach[S]` holds the traversals that can end a trail using exactly `S`.
pub fn full_dp_longest_trail(g: &Graph) -> Result<OracleResult> {
    let m = g.edge_count();
    if m > FULL_DP_MAX_EDGES {
        return Err(Error::out_of_range(
            "m",
            m,
            format!("full DP needs m <= {FULL_DP_MAX_EDGES}"),
        ));
    }
    if m == 0 {
        return Ok(OracleResult {
            length: 0,
            trail: Trail::default(),
        });
    }
    // Traversals leaving each vertex; a self-loop contributes one.
    let mut leaving: Vec<Vec<DirEdge>> = vec![Vec::new(); g.vertex_count()];
    for e in 0..m {
        let (a, b) = g.endpoints(e);
        leaving[a].push(DirEdge::forward(e));
        if a != b {
            leaving[b].push(DirEdge::backward(e));
        }
    }
    let heads: Vec<usize> = (0..2 * m)
        .map(|id| g.head(DirEdge::from_id(id as u8)))
        .collect();

    let mut reach = vec![0u64; 1 << m];
    for e in 0..m {
        reach[1 << e] = 0b11 << (2 * e);
    }
    let mut best_set = 0usize;
    for s in 1..reach.len() {
        let mut ends = reach[s];
        if ends == 0 {
            continue;
        }
        if (s.count_ones()) > best_set.count_ones() {
            best_set = s;
        }
        while ends != 0 {
            let id = ends.trailing_zeros() as usize;
            ends &= ends - 1;
            for &d in &leaving[heads[id]] {
                let bit = 1usize << d.edge();
                if s & bit == 0 {
                    reach[s | bit] |= 1 << d.id();
                }
            }
        }
    }

    // Walk back from any reachable end of the best set.
    let mut s = best_set;
    let mut end = reach[s].trailing_zeros() as usize;
    let mut rev = vec![end >> 1];
    while s.count_ones() > 1 {
        let tail = g.tail(DirEdge::from_id(end as u8));
        s &= !(1 << (end >> 1));
        let mut cands = reach[s];
        let prev = loop {
            let id = cands.trailing_zeros() as usize;
            debug_assert!(id < 64, "reachable set without a predecessor");
            if heads[id] == tail {
                break id;
            }
            cands &= cands - 1;
        };
        rev.push(prev >> 1);
        end = prev;
    }
    rev.reverse();
    Ok(OracleResult {
        length: rev.len(),
        trail: Trail(rev),
    })
}
