//! Longest trail (edge-simple longest walk) solvers.
//!
//! * [`oracle`]: exhaustive search, the ground truth.
//! * [`dp`]: the memoized `L(S, v, u)` recurrence, the precomputed layer and
//!   an exact `O*(2^m)` subset DP.
//! * [`qmax`]: simulated Dürr–Høyer maximum finding with query accounting.
//! * [`hybrid`]: classical layer plus nested maximum finding over splits.
//! * [`costs`]: the closed-form cost balance behind the choice of `alpha`.

pub mod costs;
pub mod dp;
pub mod edgeset;
pub mod error;
pub mod graph;
pub mod hybrid;
pub mod oracle;
pub mod qmax;

pub use costs::{theoretical_costs, CostReport};
pub use dp::{
    combine, full_dp_longest_trail, get_len, get_len_edges, precompute_layer, reconstruct_path,
    DpEntry, DpTable, LayerSpec, Len, DEFAULT_ALPHA,
};
pub use edgeset::{EdgeId, EdgeSet};
pub use error::{Error, Result};
pub use graph::{random_graph, validate_trail, DirEdge, Graph, Trail, TrailViolation, MAX_EDGES};
pub use hybrid::{
    reconstruct_from_witness, solve_hybrid, HybridConfig, HybridSolver, Mode, SolveResult,
    SplitWitness,
};
pub use oracle::{
    constrained_longest_bruteforce, constrained_longest_bruteforce_directed,
    longest_trail_bruteforce, OracleResult,
};
pub use qmax::{
    boosted_qmax, grover_stage_cost, qmax_durr_hoyer, qmax_exhaustive, QmaxOutcome, QueryLedger,
    ValueOracle,
};
