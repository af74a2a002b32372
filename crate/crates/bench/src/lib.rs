//! Fixed inputs shared by the benchmarks.

use ltp_core::{random_graph, Graph, Len};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Benchmark graph with `m` edges on 6 vertices.
pub fn graph(m: usize) -> Graph {
    random_graph(6, m, 42 + m as u64).expect("valid size")
}

/// `0..n` in a seeded random order.
pub fn shuffled(n: usize, seed: u64) -> Vec<Len> {
    let mut v: Vec<Len> = (0..n as u32).map(Some).collect();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}
