//! The hybrid longest-trail algorithm: a classical table for small edge sets,
//! then nested maximum finding over subset splits for the large ones.
//!
//! A subproblem `(S, v, u)` above the table layer is solved by maximizing
//! `combine(L(S', v, y), L((S \ S') + y, y, u))` over first halves `S'` of
//! size `h = floor(|S| / 2)` (clamped to `2..|S|`) that contain `v`, and
//! pivot traversals `y` of edges in `S'`. Both halves recurse until they fit
//! the table.
//!
//! Subproblem results are memoized for speed. Each memo entry carries the
//! queries its subtree charged, relative to its own level, and a cache hit
//! replays them, so the ledger matches a run that recomputes every subtree.
//! In stochastic mode each subproblem draws from its own stream derived from
//! the seed and the subproblem key, which makes results independent of
//! evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::dp::{
    check_alpha, combine, precompute_layer, reconstruct_path, DpTable, LayerSpec, Len,
    DEFAULT_ALPHA, DEFAULT_MEMORY_BUDGET,
};
use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};
use crate::graph::{DirEdge, Graph, Trail};
use crate::qmax::{
    qmax_exhaustive, DurrHoyer, QueryLedger, Run, ValueOracle, DEFAULT_BUDGET_CONSTANT,
};

pub const HYBRID_DET_MAX_EDGES: usize = 20;
pub const HYBRID_STOCH_MAX_EDGES: usize = 16;

/// Deepest recursion level tracked per subproblem.
const MAX_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exhaustive scans: exact, with `N` queries per search.
    #[serde(rename = "det")]
    Deterministic,
    /// Boosted Dürr–Høyer simulation: bounded one-sided error.
    #[serde(rename = "stoch")]
    Stochastic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridConfig {
    pub alpha: f64,
    pub mode: Mode,
    /// Runs per boosted search; `None` means `2m`.
    pub repeats_per_level: Option<usize>,
    pub seed: u64,
    pub budget_constant: f64,
    pub memory_budget: u128,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            alpha: DEFAULT_ALPHA,
            mode: Mode::Deterministic,
            repeats_per_level: None,
            seed: 0,
            budget_constant: DEFAULT_BUDGET_CONSTANT,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl HybridConfig {
    pub fn deterministic() -> Self {
        Self::default()
    }

    pub fn stochastic(seed: u64) -> Self {
        HybridConfig {
            mode: Mode::Stochastic,
            seed,
            ..Self::default()
        }
    }

    pub fn repeats_for(&self, m: usize) -> usize {
        self.repeats_per_level.unwrap_or(2 * m)
    }
}

/// How a subproblem's value was obtained; reassembles into the trail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitWitness {
    /// First and last traversal coincide: the one-edge trail.
    Single { edge: DirEdge },
    /// Answered by the precomputed table.
    Leaf {
        set: EdgeSet,
        v: DirEdge,
        u: DirEdge,
    },
    /// Glued from `(subset, v, pivot)` and `((set \ subset) + pivot, pivot, u)`.
    Node {
        set: EdgeSet,
        v: DirEdge,
        u: DirEdge,
        subset: EdgeSet,
        pivot: DirEdge,
        left: Box<SplitWitness>,
        right: Box<SplitWitness>,
    },
}

impl SplitWitness {
    pub fn depth(&self) -> usize {
        match self {
            SplitWitness::Single { .. } | SplitWitness::Leaf { .. } => 0,
            SplitWitness::Node { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub length: usize,
    pub trail: Trail,
    pub ledger: QueryLedger,
    pub classical_entries: usize,
    /// False if a search on the winning witness path ran out of budget
    /// before confirming its maximum. Always true in deterministic mode.
    pub success_nominal: bool,
    pub witness: Option<SplitWitness>,
    pub k_pre: usize,
    /// Largest edge-set size answered from the table.
    pub leaf_size: usize,
}

type RelQueries = [u64; MAX_DEPTH];

#[derive(Clone, Copy, Debug)]
struct Node {
    value: Len,
    choice: Option<(EdgeSet, DirEdge)>,
    /// Interned queries of this subtree; index 0 is the subproblem's own level.
    queries: u32,
    nominal: bool,
}

impl Node {
    fn terminal(value: Len) -> Self {
        Node {
            value,
            choice: None,
            queries: 0,
            nominal: true,
        }
    }
}

fn add_nested(dst: &mut RelQueries, child: &RelQueries, times: u64) {
    if child[0] == 0 {
        // Only table and single-edge answers charge nothing at their own level.
        return;
    }
    assert_eq!(
        child[MAX_DEPTH - 1],
        0,
        "recursion deeper than {MAX_DEPTH} levels"
    );
    for i in 0..MAX_DEPTH - 1 {
        dst[i + 1] = dst[i + 1].saturating_add(child[i].saturating_mul(times));
    }
}

fn key(set: EdgeSet, v: DirEdge, u: DirEdge) -> u64 {
    (set.bits() as u64) << 16 | (v.id() as u64) << 8 | u.id() as u64
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Subproblem cache. Each edge set owns a dense block indexed by the ranks
/// of `v` and `u` among its traversals, so the pivots of one first half hit
/// neighbouring slots. Query arrays repeat across subproblems of the same
/// shape and are stored once.
struct Memo {
    /// Block start per edge set, `usize::MAX` if unallocated.
    blocks: Vec<usize>,
    slots: Vec<Option<Node>>,
    arrays: Vec<RelQueries>,
    array_ids: FxHashMap<RelQueries, u32>,
}

impl Memo {
    fn new(m: usize) -> Self {
        let zero = [0; MAX_DEPTH];
        Memo {
            blocks: vec![usize::MAX; 1 << m],
            slots: Vec::new(),
            arrays: vec![zero],
            array_ids: FxHashMap::from_iter([(zero, 0)]),
        }
    }

    fn intern(&mut self, q: RelQueries) -> u32 {
        let next = self.arrays.len() as u32;
        let id = *self.array_ids.entry(q).or_insert(next);
        if id == next {
            self.arrays.push(q);
        }
        id
    }

    fn slot(&mut self, set: EdgeSet, v: DirEdge, u: DirEdge) -> usize {
        let width = 2 * set.len();
        let block = &mut self.blocks[set.bits() as usize];
        if *block == usize::MAX {
            *block = self.slots.len();
            self.slots.resize(*block + width * width, None);
        }
        *block + rank(set, v) * width + rank(set, u)
    }
}

fn rank(set: EdgeSet, d: DirEdge) -> usize {
    let below = set.bits() & ((1u32 << d.edge()) - 1);
    2 * below.count_ones() as usize + (d.id() & 1) as usize
}

/// First-half size for splitting a set of `s` edges.
pub fn split_size(s: usize) -> usize {
    (s / 2).clamp(2, s - 1)
}

/// Nested split search against a frozen layer table.
pub struct HybridSolver<'a> {
    g: &'a Graph,
    table: &'a DpTable,
    leaf_size: usize,
    mode: Mode,
    repeats: usize,
    seed: u64,
    budget_constant: f64,
    memo: Memo,
}

impl<'a> HybridSolver<'a> {
    /// `table` must answer every `(S, v, u)` with `|S| <= leaf_size`.
    pub fn new(g: &'a Graph, table: &'a DpTable, leaf_size: usize, cfg: &HybridConfig) -> Self {
        assert!(leaf_size >= 2 || g.edge_count() <= leaf_size);
        HybridSolver {
            g,
            table,
            leaf_size,
            mode: cfg.mode,
            repeats: cfg.repeats_for(g.edge_count()).max(1),
            seed: cfg.seed,
            budget_constant: cfg.budget_constant,
            memo: Memo::new(g.edge_count()),
        }
    }

    /// `L(set, v, u)` by nested search, charging its queries to `ledger`
    /// starting at `level`. The witness is `None` iff the value is.
    pub fn solve_recursive(
        &mut self,
        set: EdgeSet,
        v: DirEdge,
        u: DirEdge,
        level: usize,
        ledger: &mut QueryLedger,
    ) -> (Len, Option<SplitWitness>) {
        let node = self.node(set, v, u);
        for (i, &q) in self.memo.arrays[node.queries as usize].iter().enumerate() {
            if q > 0 {
                ledger.charge(level + i, q as u128);
            }
        }
        (node.value, self.witness(set, v, u))
    }

    fn node(&mut self, set: EdgeSet, v: DirEdge, u: DirEdge) -> Node {
        if !set.contains(v.edge()) || !set.contains(u.edge()) {
            return Node::terminal(None);
        }
        if v.edge() == u.edge() {
            return Node::terminal(self.g.same_traversal(v, u).then_some(1));
        }
        let slot = self.memo.slot(set, v, u);
        if let Some(n) = self.memo.slots[slot] {
            return n;
        }
        let node = if set.len() <= self.leaf_size {
            let entry = self
                .table
                .get(set, v, u)
                .unwrap_or_else(|| panic!("layer table lacks ({set:?}, {v}, {u})"));
            Node::terminal(entry.length)
        } else {
            self.search(set, v, u)
        };
        self.memo.slots[slot] = Some(node);
        node
    }

    fn candidates(set: EdgeSet, v: DirEdge, u: DirEdge) -> Vec<(EdgeSet, DirEdge)> {
        let h = split_size(set.len());
        let mut out = Vec::new();
        for rest in set.without(v.edge()).subsets_of_size(h - 1) {
            let first = rest.with(v.edge());
            let holds_u = first.contains(u.edge());
            for y_edge in first {
                // u must survive into the second half, which only the pivot can carry over.
                if holds_u && y_edge != u.edge() {
                    continue;
                }
                out.push((first, DirEdge::forward(y_edge)));
                out.push((first, DirEdge::backward(y_edge)));
            }
        }
        out
    }

    fn halves(
        &mut self,
        set: EdgeSet,
        v: DirEdge,
        u: DirEdge,
        c: (EdgeSet, DirEdge),
    ) -> (Node, Node) {
        let (first, y) = c;
        let second = set.difference(first).with(y.edge());
        (self.node(first, v, y), self.node(second, y, u))
    }

    fn search(&mut self, set: EdgeSet, v: DirEdge, u: DirEdge) -> Node {
        let cands = Self::candidates(set, v, u);
        let mut queries = [0u64; MAX_DEPTH];
        let (value, winner, nominal) = match self.mode {
            Mode::Deterministic => {
                let mut own = QueryLedger::new();
                // Every index is evaluated exactly once, so nested charges
                // are collected as the scan goes.
                let mut oracle = SplitOracle {
                    solver: self,
                    set,
                    v,
                    u,
                    cands: &cands,
                    nested: Some(&mut queries),
                    children: None,
                };
                let out = qmax_exhaustive(&mut oracle, &mut own, 0);
                queries[0] = own.total() as u64;
                (out.value, out.witness_index, true)
            }
            Mode::Stochastic => {
                let budget_constant = self.budget_constant;
                let mut children = Vec::with_capacity(cands.len());
                let dh = DurrHoyer::from_oracle(
                    &mut SplitOracle {
                        solver: self,
                        set,
                        v,
                        u,
                        cands: &cands,
                        nested: None,
                        children: Some(&mut children),
                    },
                    budget_constant,
                );
                let mut rng =
                    ChaCha8Rng::seed_from_u64(splitmix(self.seed ^ splitmix(key(set, v, u))));
                let arrays = &self.memo.arrays;
                let mut best: Option<Run> = None;
                for _ in 0..self.repeats {
                    // Each charged query evaluates the index its stage landed on.
                    let run = dh.run_streaming(&mut rng, |stage| {
                        let (l, r) = children[stage.index];
                        add_nested(&mut queries, &arrays[l as usize], stage.cost);
                        add_nested(&mut queries, &arrays[r as usize], stage.cost);
                    });
                    queries[0] = queries[0].saturating_add(run.queries);
                    if best.as_ref().is_none_or(|b| run.value > b.value) {
                        best = Some(run);
                    }
                }
                let best = best.expect("at least one run");
                (best.value, best.value.map(|_| best.index), best.converged)
            }
        };
        let choice = winner.map(|i| cands[i]);
        let nominal = nominal
            && choice.is_none_or(|c| {
                let (l, r) = self.halves(set, v, u, c);
                l.nominal && r.nominal
            });
        Node {
            value,
            choice,
            queries: self.memo.intern(queries),
            nominal,
        }
    }

    fn witness(&mut self, set: EdgeSet, v: DirEdge, u: DirEdge) -> Option<SplitWitness> {
        let node = self.node(set, v, u);
        node.value?;
        if v.edge() == u.edge() {
            return Some(SplitWitness::Single { edge: v });
        }
        match node.choice {
            None => Some(SplitWitness::Leaf { set, v, u }),
            Some((subset, pivot)) => {
                let second = set.difference(subset).with(pivot.edge());
                let left = self.witness(subset, v, pivot)?;
                let right = self.witness(second, pivot, u)?;
                Some(SplitWitness::Node {
                    set,
                    v,
                    u,
                    subset,
                    pivot,
                    left: Box::new(left),
                    right: Box::new(right),
                })
            }
        }
    }

    fn nominal(&mut self, set: EdgeSet, v: DirEdge, u: DirEdge) -> bool {
        self.node(set, v, u).nominal
    }
}

struct SplitOracle<'s, 'a> {
    solver: &'s mut HybridSolver<'a>,
    set: EdgeSet,
    v: DirEdge,
    u: DirEdge,
    cands: &'s [(EdgeSet, DirEdge)],
    nested: Option<&'s mut RelQueries>,
    /// Interned query ids of both halves, pushed in evaluation order.
    children: Option<&'s mut Vec<(u32, u32)>>,
}

impl ValueOracle for SplitOracle<'_, '_> {
    fn size(&self) -> usize {
        self.cands.len()
    }

    fn evaluate(&mut self, index: usize) -> Len {
        let (l, r) = self
            .solver
            .halves(self.set, self.v, self.u, self.cands[index]);
        if let Some(q) = self.nested.as_deref_mut() {
            let arrays = &self.solver.memo.arrays;
            add_nested(q, &arrays[l.queries as usize], 1);
            add_nested(q, &arrays[r.queries as usize], 1);
        }
        if let Some(c) = self.children.as_deref_mut() {
            c.push((l.queries, r.queries));
        }
        combine(l.value, r.value)
    }
}

/// Table layer size actually used: `k_pre`, raised to 2 so splits shrink.
pub fn leaf_size(m: usize, k_pre: usize) -> usize {
    k_pre.max(2).min(m)
}

/// Solve the longest trail problem with the hybrid algorithm.
pub fn solve_hybrid(g: &Graph, cfg: &HybridConfig) -> Result<SolveResult> {
    let m = g.edge_count();
    check_alpha(cfg.alpha)?;
    let cap = match cfg.mode {
        Mode::Deterministic => HYBRID_DET_MAX_EDGES,
        Mode::Stochastic => HYBRID_STOCH_MAX_EDGES,
    };
    if m > cap {
        return Err(Error::out_of_range(
            "m",
            m,
            format!("m <= {cap} in this mode"),
        ));
    }
    if cfg.repeats_per_level == Some(0) {
        return Err(Error::out_of_range("repeats", 0, "repeats >= 1"));
    }
    if !(cfg.budget_constant.is_finite() && cfg.budget_constant > 0.0) {
        return Err(Error::out_of_range(
            "budget_constant",
            cfg.budget_constant,
            "> 0",
        ));
    }
    let spec = LayerSpec::for_edges(m, cfg.alpha)?;
    if m == 0 {
        // Nothing to search: the empty trail.
        return Ok(SolveResult {
            length: 0,
            trail: Trail(Vec::new()),
            ledger: QueryLedger::new(),
            classical_entries: 0,
            success_nominal: true,
            witness: None,
            k_pre: spec.k_pre,
            leaf_size: 0,
        });
    }
    let leaf = leaf_size(m, spec.k_pre);
    let table = precompute_layer(g, LayerSpec::with_k(cfg.alpha, leaf), cfg.memory_budget)?;

    let mut solver = HybridSolver::new(g, &table, leaf, cfg);
    let all = g.all_edges();
    let mut ledger = QueryLedger::new();
    let mut best: Option<(u32, DirEdge, DirEdge)> = None;
    // The outer scan over end pairs is classical bookkeeping.
    for v in g.dir_edges() {
        for u in g.dir_edges() {
            let node = solver.node(all, v, u);
            for (i, &q) in solver.memo.arrays[node.queries as usize].iter().enumerate() {
                if q > 0 {
                    ledger.charge(i, q as u128);
                }
            }
            if let Some(len) = node.value {
                if best.is_none_or(|(b, _, _)| len > b) {
                    best = Some((len, v, u));
                }
            }
        }
    }
    let (length, trail, witness, nominal) = match best {
        Some((len, v, u)) => {
            let w = solver
                .witness(all, v, u)
                .expect("non-empty value has a witness");
            let trail = reconstruct_from_witness(&w, &table)?;
            (len as usize, trail, Some(w), solver.nominal(all, v, u))
        }
        None => unreachable!("every graph with an edge has a one-edge trail"),
    };
    Ok(SolveResult {
        length,
        trail,
        ledger,
        classical_entries: table.len(),
        success_nominal: nominal,
        witness,
        k_pre: spec.k_pre,
        leaf_size: leaf,
    })
}

/// Reassemble a trail from a witness tree, dropping each pivot's second copy.
pub fn reconstruct_from_witness(w: &SplitWitness, table: &DpTable) -> Result<Trail> {
    match w {
        SplitWitness::Single { edge } => Ok(Trail(vec![edge.edge()])),
        SplitWitness::Leaf { set, v, u } => reconstruct_path(table, *set, *v, *u),
        SplitWitness::Node {
            pivot, left, right, ..
        } => {
            let l = reconstruct_from_witness(left, table)?;
            let r = reconstruct_from_witness(right, table)?;
            if l.last() != Some(pivot.edge()) || r.first() != Some(pivot.edge()) {
                return Err(Error::Witness(format!(
                    "halves {:?} and {:?} do not meet at pivot {pivot}",
                    l.edges(),
                    r.edges()
                )));
            }
            let mut edges = l.0;
            edges.extend_from_slice(&r.0[1..]);
            Ok(Trail(edges))
        }
    }
}
