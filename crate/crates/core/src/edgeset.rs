//! Fixed-width edge subsets and fixed-cardinality subset iteration.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of an edge in its owning [`Graph`](crate::Graph).
pub type EdgeId = usize;

/// A subset of the edges of a graph, stored as a bit vector keyed by edge index.
///
/// Graphs are capped at [`MAX_EDGES`](crate::MAX_EDGES) edges, so one machine word is enough.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeSet(u32);

impl EdgeSet {
    pub const EMPTY: EdgeSet = EdgeSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        EdgeSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// The set `{0, 1, .., m-1}`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= 32);
        if m == 32 {
            EdgeSet(u32::MAX)
        } else {
            EdgeSet((1u32 << m) - 1)
        }
    }

    pub fn singleton(e: EdgeId) -> Self {
        EdgeSet(1 << e)
    }

    pub fn from_edges<I: IntoIterator<Item = EdgeId>>(edges: I) -> Self {
        edges.into_iter().fold(EdgeSet::EMPTY, |s, e| s.with(e))
    }

    pub fn contains(self, e: EdgeId) -> bool {
        e < 32 && self.0 & (1 << e) != 0
    }

    #[must_use]
    pub fn with(self, e: EdgeId) -> Self {
        EdgeSet(self.0 | (1 << e))
    }

    #[must_use]
    pub fn without(self, e: EdgeId) -> Self {
        EdgeSet(self.0 & !(1 << e))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: EdgeSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[must_use]
    pub fn union(self, other: EdgeSet) -> Self {
        EdgeSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersection(self, other: EdgeSet) -> Self {
        EdgeSet(self.0 & other.0)
    }

    #[must_use]
    pub fn difference(self, other: EdgeSet) -> Self {
        EdgeSet(self.0 & !other.0)
    }

    /// Members in increasing order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// All subsets of `self` with exactly `k` members, in increasing order of
    /// their packed rank (lexicographic combinatorial succession).
    pub fn subsets_of_size(self, k: usize) -> SubsetsOfSize {
        SubsetsOfSize::new(self, k)
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        EdgeSet::from_edges(iter)
    }
}

impl IntoIterator for EdgeSet {
    type Item = EdgeId;
    type IntoIter = Members;

    fn into_iter(self) -> Members {
        self.iter()
    }
}

/// Iterator over the members of an [`EdgeSet`].
#[derive(Clone)]
pub struct Members(u32);

impl Iterator for Members {
    type Item = EdgeId;

    fn next(&mut self) -> Option<EdgeId> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// Fixed-popcount subsets of a universe set.
///
/// Runs Gosper's next-combination step over the *rank space* `0..|universe|`
/// and scatters each rank pattern onto the universe's members, so the
/// universe need not be a contiguous prefix.
pub struct SubsetsOfSize {
    members: Vec<EdgeId>,
    current: Option<u64>,
    limit: u64,
}

impl SubsetsOfSize {
    fn new(universe: EdgeSet, k: usize) -> Self {
        let members: Vec<EdgeId> = universe.iter().collect();
        let n = members.len();
        let current = if k > n { None } else { Some((1u64 << k) - 1) };
        SubsetsOfSize {
            members,
            current,
            limit: 1u64 << n,
        }
    }

    fn scatter(&self, pattern: u64) -> EdgeSet {
        let mut bits = 0u32;
        let mut p = pattern;
        while p != 0 {
            let r = p.trailing_zeros() as usize;
            bits |= 1 << self.members[r];
            p &= p - 1;
        }
        EdgeSet(bits)
    }
}

impl Iterator for SubsetsOfSize {
    type Item = EdgeSet;

    fn next(&mut self) -> Option<EdgeSet> {
        let c = self.current?;
        let out = self.scatter(c);
        if c == 0 {
            // k == 0: the empty set is the only subset.
            self.current = None;
        } else {
            let lowest = c & c.wrapping_neg();
            let ripple = c + lowest;
            let next = (((ripple ^ c) >> 2) / lowest) | ripple;
            self.current = (next < self.limit).then_some(next);
        }
        Some(out)
    }
}

/// Binomial coefficient, exact, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}
