//! Exhaustive ground truth. Slow on purpose: depth-first extension of every
//! trail, with only a reachability bound to cut hopeless branches.

use serde::{Deserialize, Serialize};

use crate::dp::Len;
use crate::edgeset::{EdgeId, EdgeSet};
use crate::error::{Error, Result};
use crate::graph::{DirEdge, Graph, Trail};

/// Largest edge count the exhaustive search accepts.
pub const ORACLE_MAX_EDGES: usize = 14;

/// A longest trail and its length. `trail` is empty iff `length == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub length: usize,
    pub trail: Trail,
}

fn check_size(g: &Graph) -> Result<()> {
    if g.edge_count() > ORACLE_MAX_EDGES {
        return Err(Error::out_of_range(
            "m",
            g.edge_count(),
            format!("brute force needs m <= {ORACLE_MAX_EDGES}"),
        ));
    }
    Ok(())
}

/// Number of edges of `avail` reachable from vertex `from` through `avail`.
fn reachable_edges(g: &Graph, avail: EdgeSet, from: usize) -> usize {
    let mut seen_v = vec![false; g.vertex_count()];
    seen_v[from] = true;
    let mut reached = EdgeSet::EMPTY;
    let mut grew = true;
    while grew {
        grew = false;
        for e in avail.difference(reached) {
            let (a, b) = g.endpoints(e);
            if seen_v[a] || seen_v[b] {
                reached = reached.with(e);
                seen_v[a] = true;
                seen_v[b] = true;
                grew = true;
            }
        }
    }
    reached.len()
}

/// The longest edge-simple walk in `g`, by exhaustive search.
pub fn longest_trail_bruteforce(g: &Graph) -> Result<OracleResult> {
    check_size(g)?;
    let m = g.edge_count();
    let mut best: Vec<EdgeId> = Vec::new();
    let mut path = Vec::with_capacity(m);
    'outer: for start in g.dir_edges() {
        path.clear();
        path.push(start.edge());
        let avail = g.all_edges().without(start.edge());
        extend_any(g, avail, g.head(start), &mut path, &mut best);
        if best.len() == m {
            break 'outer;
        }
    }
    Ok(OracleResult {
        length: best.len(),
        trail: Trail(best),
    })
}

fn extend_any(
    g: &Graph,
    avail: EdgeSet,
    head: usize,
    path: &mut Vec<EdgeId>,
    best: &mut Vec<EdgeId>,
) {
    if path.len() > best.len() {
        best.clone_from(path);
    }
    if path.len() + reachable_edges(g, avail, head) <= best.len() {
        return;
    }
    for e in avail {
        let (a, b) = g.endpoints(e);
        let next = if a == head {
            b
        } else if b == head {
            a
        } else {
            continue;
        };
        path.push(e);
        extend_any(g, avail.without(e), next, path, best);
        path.pop();
        if best.len() == g.edge_count() {
            return;
        }
    }
}

/// Longest trail inside `set` whose first traversal is `v` and last is `u`;
/// `None` if there is none.
pub fn constrained_longest_bruteforce_directed(
    g: &Graph,
    set: EdgeSet,
    v: DirEdge,
    u: DirEdge,
) -> Result<Len> {
    check_size(g)?;
    if !set.contains(v.edge()) || !set.contains(u.edge()) {
        return Ok(None);
    }
    let mut best: Len = None;
    extend_to(g, set.without(v.edge()), v, 1, &mut |last, len| {
        if g.same_traversal(last, u) {
            best = best.max(Some(len));
        }
    });
    Ok(best)
}

fn extend_to(
    g: &Graph,
    avail: EdgeSet,
    last: DirEdge,
    len: u32,
    visit: &mut dyn FnMut(DirEdge, u32),
) {
    visit(last, len);
    let head = g.head(last);
    for e in avail {
        let (a, b) = g.endpoints(e);
        for (tail, forward) in [(a, true), (b, false)] {
            if tail != head || (!forward && a == b) {
                continue;
            }
            extend_to(
                g,
                avail.without(e),
                DirEdge::new(e, forward),
                len + 1,
                visit,
            );
        }
    }
}

/// Longest trail inside `set` whose first edge is `v` and last edge is `u`,
/// either traversal direction; `None` if there is none.
pub fn constrained_longest_bruteforce(
    g: &Graph,
    set: EdgeSet,
    v: EdgeId,
    u: EdgeId,
) -> Result<Len> {
    check_size(g)?;
    if v >= g.edge_count() || u >= g.edge_count() {
        return Err(Error::out_of_range("edge", v.max(u), "edge < m"));
    }
    let mut best = None;
    for vd in [DirEdge::forward(v), DirEdge::backward(v)] {
        for ud in [DirEdge::forward(u), DirEdge::backward(u)] {
            best = best.max(constrained_longest_bruteforce_directed(g, set, vd, ud)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_graph, validate_trail};

    fn complete(n: usize) -> Graph {
        let mut edges = vec![];
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::new(n, edges).unwrap()
    }

    #[test]
    fn longest_examples() {
        let tri = complete(3);
        let r = longest_trail_bruteforce(&tri).unwrap();
        assert_eq!(r.length, 3);
        assert_eq!(validate_trail(&tri, &r.trail), Ok(()));

        let path = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(longest_trail_bruteforce(&path).unwrap().length, 2);

        let k4 = complete(4);
        let r = longest_trail_bruteforce(&k4).unwrap();
        assert_eq!(r.length, 5);
        assert_eq!(validate_trail(&k4, &r.trail), Ok(()));

        let star = Graph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(longest_trail_bruteforce(&star).unwrap().length, 2);
    }

    #[test]
    fn empty_graph_has_empty_trail() {
        let g = Graph::new(3, vec![]).unwrap();
        let r = longest_trail_bruteforce(&g).unwrap();
        assert_eq!(
            r,
            OracleResult {
                length: 0,
                trail: Trail(vec![])
            }
        );
    }

    #[test]
    fn size_bound() {
        let g = random_graph(5, 15, 0).unwrap();
        assert!(longest_trail_bruteforce(&g).is_err());
        assert!(constrained_longest_bruteforce(&g, g.all_edges(), 0, 1).is_err());
    }

    #[test]
    fn constrained_examples() {
        let tri = complete(3);
        let s = EdgeSet::from_edges([0, 1]);
        assert_eq!(
            constrained_longest_bruteforce(&tri, s, 0, 1).unwrap(),
            Some(2)
        );
        for v in 0..3 {
            let single = EdgeSet::singleton(v);
            assert_eq!(
                constrained_longest_bruteforce(&tri, single, v, v).unwrap(),
                Some(1)
            );
        }
        let disjoint = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            constrained_longest_bruteforce(&disjoint, disjoint.all_edges(), 0, 1).unwrap(),
            None
        );
        assert_eq!(
            constrained_longest_bruteforce(&tri, EdgeSet::from_edges([1, 2]), 0, 1).unwrap(),
            None
        );
    }

    #[test]
    fn directed_constraint_respects_orientation() {
        // 0-1-2 path: starting 0+ (0 -> 1) can reach 1+ (1 -> 2) but not 1-.
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let s = g.all_edges();
        let f = constrained_longest_bruteforce_directed;
        assert_eq!(
            f(&g, s, DirEdge::forward(0), DirEdge::forward(1)).unwrap(),
            Some(2)
        );
        assert_eq!(
            f(&g, s, DirEdge::forward(0), DirEdge::backward(1)).unwrap(),
            None
        );
        assert_eq!(
            f(&g, s, DirEdge::forward(0), DirEdge::backward(0)).unwrap(),
            None
        );
    }

    #[test]
    fn properties_on_random_graphs() {
        for seed in 0..40 {
            let g = random_graph(2 + (seed as usize % 4), 1 + (seed as usize % 7), seed).unwrap();
            let full = g.all_edges();
            let m = g.edge_count();
            let mut best = 0u32;
            for v in 0..m {
                for u in 0..m {
                    let l = constrained_longest_bruteforce(&g, full, v, u).unwrap();
                    // Reversing a trail swaps its ends.
                    assert_eq!(l, constrained_longest_bruteforce(&g, full, u, v).unwrap());
                    // Dropping an edge never lengthens.
                    for drop in 0..m {
                        let smaller =
                            constrained_longest_bruteforce(&g, full.without(drop), v, u).unwrap();
                        assert!(smaller <= l);
                    }
                    best = best.max(l.unwrap_or(0));
                }
            }
            assert_eq!(
                longest_trail_bruteforce(&g).unwrap().length,
                best as usize,
                "seed {seed}"
            );
        }
    }
}
