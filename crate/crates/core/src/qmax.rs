//! Simulated quantum maximum finding at the query-accounting level.
//!
//! The Dürr–Høyer search is modelled as a threshold walk: sample a random
//! element, then repeatedly jump to a uniformly random element strictly above
//! the current one, paying the idealized Grover cost for each jump. The
//! simulator sees the whole value vector so it can count the elements above
//! the threshold; only the charged queries count as oracle access.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dp::Len;
use crate::error::{Error, Result};

/// Default multiplier for the per-run query budget `c * ceil(sqrt(N))`.
pub const DEFAULT_BUDGET_CONSTANT: f64 = 23.0;

/// Random-access values searched by the maximum finder.
///
/// `evaluate` returns the value only; whoever owns nested work behind an
/// index charges it using the outcome's trace.
pub trait ValueOracle {
    fn size(&self) -> usize;
    fn evaluate(&mut self, index: usize) -> Len;
}

impl ValueOracle for [Len] {
    fn size(&self) -> usize {
        self.len()
    }

    fn evaluate(&mut self, index: usize) -> Len {
        self[index]
    }
}

impl ValueOracle for Vec<Len> {
    fn size(&self) -> usize {
        self.len()
    }

    fn evaluate(&mut self, index: usize) -> Len {
        self[index]
    }
}

/// Oracle queries charged per recursion level.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "LedgerRepr", try_from = "LedgerRepr")]
pub struct QueryLedger {
    per_level: Vec<u128>,
}

#[derive(Serialize, Deserialize)]
struct LedgerRepr {
    total: u128,
    per_level: BTreeMap<String, u128>,
}

impl From<QueryLedger> for LedgerRepr {
    fn from(l: QueryLedger) -> Self {
        LedgerRepr {
            total: l.total(),
            per_level: l
                .per_level
                .iter()
                .enumerate()
                .map(|(i, &q)| (format!("level{i}"), q))
                .collect(),
        }
    }
}

impl TryFrom<LedgerRepr> for QueryLedger {
    type Error = String;

    fn try_from(r: LedgerRepr) -> Result<Self, String> {
        let mut ledger = QueryLedger::default();
        for (label, q) in r.per_level {
            let level: usize = label
                .strip_prefix("level")
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| format!("bad level label {label:?}"))?;
            ledger.charge(level, q);
        }
        if ledger.total() != r.total {
            return Err(format!(
                "total {} != sum of levels {}",
                r.total,
                ledger.total()
            ));
        }
        Ok(ledger)
    }
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, level: usize, queries: u128) {
        if self.per_level.len() <= level {
            self.per_level.resize(level + 1, 0);
        }
        self.per_level[level] += queries;
    }

    pub fn level(&self, level: usize) -> u128 {
        self.per_level.get(level).copied().unwrap_or(0)
    }

    /// Counts indexed by level; trailing levels with no charges may be absent.
    pub fn levels(&self) -> &[u128] {
        &self.per_level
    }

    pub fn total(&self) -> u128 {
        self.per_level.iter().sum()
    }

    pub fn absorb(&mut self, other: &QueryLedger) {
        for (level, &q) in other.per_level.iter().enumerate() {
            self.charge(level, q);
        }
    }
}

/// One jump of the threshold walk: the sampled index and the queries paid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stage {
    pub index: usize,
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QmaxOutcome {
    pub value: Len,
    pub witness_index: Option<usize>,
    pub queries_charged: u128,
    /// Jumps of the winning run (empty for the exhaustive scan).
    pub stages: Vec<Stage>,
    /// Whether the winning run stopped because nothing beat its threshold,
    /// rather than on budget exhaustion.
    pub converged: bool,
}

/// Scan every index: `N` queries, exact maximum, smallest witness.
pub fn qmax_exhaustive<O: ValueOracle + ?Sized>(
    oracle: &mut O,
    ledger: &mut QueryLedger,
    level: usize,
) -> QmaxOutcome {
    let n = oracle.size();
    let mut best: Len = None;
    let mut witness = None;
    for i in 0..n {
        let v = oracle.evaluate(i);
        if v > best {
            best = v;
            witness = Some(i);
        }
    }
    ledger.charge(level, n as u128);
    QmaxOutcome {
        value: best,
        witness_index: witness,
        queries_charged: n as u128,
        stages: Vec::new(),
        converged: true,
    }
}

/// `ceil(pi/4 * sqrt(n / t))`: one Grover search with `t` of `n` marked.
pub fn grover_stage_cost(n: usize, t: usize) -> Result<u64> {
    if t == 0 || t > n {
        return Err(Error::out_of_range("t", t, format!("1 <= t <= {n}")));
    }
    Ok((FRAC_PI_4 * (n as f64 / t as f64).sqrt()).ceil() as u64)
}

fn ceil_sqrt(n: usize) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r < n as u64 {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n as u64 {
        r -= 1;
    }
    r
}

/// Per-run query budget `floor(c * ceil(sqrt(n)))`.
pub fn run_budget(n: usize, budget_constant: f64) -> u64 {
    (budget_constant * ceil_sqrt(n) as f64).floor() as u64
}

/// A frozen value vector prepared for repeated threshold walks.
pub struct DurrHoyer {
    values: Vec<Len>,
    /// Indices by value descending, ties by index.
    order: Vec<usize>,
    /// `greater[key(x)]` = number of values above `x`, when keys are dense.
    greater: Option<Vec<usize>>,
    budget: u64,
}

fn key(v: Len) -> usize {
    v.map_or(0, |l| l as usize + 1)
}

/// One simulated run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub index: usize,
    pub value: Len,
    pub queries: u64,
    pub stages: Vec<Stage>,
    pub converged: bool,
}

impl DurrHoyer {
    pub fn new(values: Vec<Len>, budget_constant: f64) -> Self {
        assert!(!values.is_empty(), "maximum finding over an empty sequence");
        let n = values.len();
        let top = values.iter().map(|&v| key(v)).max().unwrap_or(0);
        let (order, greater) = if top <= 4 * n + 64 {
            // Counting sort; trail lengths are tiny compared to N.
            let mut greater = vec![0usize; top + 1];
            for &v in &values {
                greater[key(v)] += 1;
            }
            let mut above = 0;
            for k in (0..=top).rev() {
                let here = greater[k];
                greater[k] = above;
                above += here;
            }
            let mut next = greater.clone();
            let mut order = vec![0; n];
            for (i, &v) in values.iter().enumerate() {
                order[next[key(v)]] = i;
                next[key(v)] += 1;
            }
            (order, Some(greater))
        } else {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
            (order, None)
        };
        DurrHoyer {
            budget: run_budget(n, budget_constant),
            values,
            order,
            greater,
        }
    }

    pub fn from_oracle<O: ValueOracle + ?Sized>(oracle: &mut O, budget_constant: f64) -> Self {
        let values = (0..oracle.size()).map(|i| oracle.evaluate(i)).collect();
        Self::new(values, budget_constant)
    }

    pub fn values(&self) -> &[Len] {
        &self.values
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    fn above(&self, threshold: Len) -> usize {
        match &self.greater {
            Some(g) => g[key(threshold)],
            None => self.order.partition_point(|&i| self.values[i] > threshold),
        }
    }

    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Run {
        let mut stages = Vec::new();
        let end = self.run_streaming(rng, |s| stages.push(s));
        Run {
            index: end.index,
            value: end.value,
            queries: end.queries,
            stages,
            converged: end.converged,
        }
    }

    /// [`run`](Self::run) without storing the trace: each stage goes to
    /// `visit` as it happens, and the returned run has no stages.
    pub fn run_streaming<R: Rng + ?Sized, F: FnMut(Stage)>(
        &self,
        rng: &mut R,
        mut visit: F,
    ) -> Run {
        let n = self.values.len();
        let mut current = rng.gen_range(0..n);
        let mut queries = 1u64;
        visit(Stage {
            index: current,
            cost: 1,
        });
        let converged = loop {
            let t = self.above(self.values[current]);
            if t == 0 {
                break true;
            }
            let cost = grover_stage_cost(n, t).expect("1 <= t <= n");
            if queries + cost > self.budget {
                break false;
            }
            queries += cost;
            current = self.order[rng.gen_range(0..t)];
            visit(Stage {
                index: current,
                cost,
            });
        };
        Run {
            index: current,
            value: self.values[current],
            queries,
            stages: Vec::new(),
            converged,
        }
    }
}

/// One bounded-error Dürr–Høyer run (maximization).
pub fn qmax_durr_hoyer<O: ValueOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &mut O,
    rng: &mut R,
    ledger: &mut QueryLedger,
    level: usize,
    budget_constant: f64,
) -> QmaxOutcome {
    boosted_qmax(oracle, 1, rng, ledger, level, budget_constant)
}

/// Best of `repeats` independent runs; charges every run's queries.
pub fn boosted_qmax<O: ValueOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &mut O,
    repeats: usize,
    rng: &mut R,
    ledger: &mut QueryLedger,
    level: usize,
    budget_constant: f64,
) -> QmaxOutcome {
    let dh = DurrHoyer::from_oracle(oracle, budget_constant);
    let runs = boosted_runs(&dh, repeats, rng);
    let total: u128 = runs.iter().map(|r| r.queries as u128).sum();
    ledger.charge(level, total);
    let best = best_run(&runs).clone();
    QmaxOutcome {
        value: best.value,
        witness_index: best.value.map(|_| best.index),
        queries_charged: total,
        stages: best.stages,
        converged: best.converged,
    }
}

/// `repeats` walks, each on its own stream branched off `rng`.
pub fn boosted_runs<R: Rng + ?Sized>(dh: &DurrHoyer, repeats: usize, rng: &mut R) -> Vec<Run> {
    assert!(repeats >= 1, "boosting needs at least one run");
    (0..repeats).map(|_| dh.run(rng)).collect()
}

/// The first run holding the largest value.
pub fn best_run(runs: &[Run]) -> &Run {
    let mut best = &runs[0];
    for r in &runs[1..] {
        if r.value > best.value {
            best = r;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn some(v: &[u32]) -> Vec<Len> {
        v.iter().map(|&x| Some(x)).collect()
    }

    #[test]
    fn exhaustive_examples() {
        let mut ledger = QueryLedger::new();
        let out = qmax_exhaustive(&mut some(&[3, 1, 4, 1, 5]), &mut ledger, 0);
        assert_eq!(
            (out.value, out.witness_index, out.queries_charged),
            (Some(5), Some(4), 5)
        );
        let out = qmax_exhaustive(&mut vec![None, None], &mut ledger, 1);
        assert_eq!(
            (out.value, out.witness_index, out.queries_charged),
            (None, None, 2)
        );
        let out = qmax_exhaustive(&mut some(&[7]), &mut ledger, 1);
        assert_eq!(
            (out.value, out.witness_index, out.queries_charged),
            (Some(7), Some(0), 1)
        );
        assert_eq!(ledger.levels(), &[5, 3]);
        assert_eq!(ledger.total(), 8);
    }

    #[test]
    fn exhaustive_ties_take_smallest_index() {
        let mut ledger = QueryLedger::new();
        let out = qmax_exhaustive(&mut some(&[2, 9, 9, 1]), &mut ledger, 0);
        assert_eq!(out.witness_index, Some(1));
    }

    #[test]
    fn grover_costs() {
        assert_eq!(grover_stage_cost(16, 1).unwrap(), 4);
        assert_eq!(grover_stage_cost(16, 16).unwrap(), 1);
        assert_eq!(grover_stage_cost(1024, 1).unwrap(), 26);
        assert!(grover_stage_cost(16, 0).is_err());
        assert!(grover_stage_cost(16, 17).is_err());
    }

    #[test]
    fn budgets() {
        assert_eq!(run_budget(256, 23.0), 368);
        assert_eq!(run_budget(257, 23.0), 23 * 17);
        assert_eq!(run_budget(1, 23.0), 23);
        assert_eq!(ceil_sqrt(15), 4);
        assert_eq!(ceil_sqrt(16), 4);
        assert_eq!(ceil_sqrt(17), 5);
    }

    #[test]
    fn durr_hoyer_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ledger = QueryLedger::new();
        let out = qmax_durr_hoyer(&mut some(&[4]), &mut rng, &mut ledger, 0, 23.0);
        assert_eq!((out.value, out.witness_index), (Some(4), Some(0)));
        assert!(out.queries_charged >= 1);

        let mut ledger = QueryLedger::new();
        let out = qmax_durr_hoyer(&mut some(&[3; 10]), &mut rng, &mut ledger, 0, 23.0);
        assert_eq!(out.value, Some(3));
        assert_eq!(out.queries_charged, 1);
        assert_eq!(ledger.total(), 1);
    }

    #[test]
    fn all_none_stays_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ledger = QueryLedger::new();
        let out = boosted_qmax(&mut vec![None; 6], 4, &mut rng, &mut ledger, 0, 23.0);
        assert_eq!((out.value, out.witness_index), (None, None));
        assert_eq!(out.queries_charged, 4);
    }

    #[test]
    fn one_repeat_matches_single_run() {
        let values = some(&[5, 2, 8, 8, 1, 0, 3]);
        for seed in 0..50 {
            let mut l1 = QueryLedger::new();
            let mut l2 = QueryLedger::new();
            let a = qmax_durr_hoyer(
                &mut values.clone(),
                &mut ChaCha8Rng::seed_from_u64(seed),
                &mut l1,
                0,
                23.0,
            );
            let b = boosted_qmax(
                &mut values.clone(),
                1,
                &mut ChaCha8Rng::seed_from_u64(seed),
                &mut l2,
                0,
                23.0,
            );
            assert_eq!(a, b);
            assert_eq!(l1, l2);
        }
    }

    #[test]
    fn boosting_finds_max_of_a_permutation() {
        let mut hits = 0;
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut values: Vec<Len> = (0..256).map(Some).collect();
            values.shuffle(&mut rng);
            let mut ledger = QueryLedger::new();
            let out = boosted_qmax(&mut values, 8, &mut rng, &mut ledger, 0, 23.0);
            hits += usize::from(out.value == Some(255));
        }
        assert!(hits >= 999, "hits {hits}");
    }

    #[test]
    fn trace_invariants_hold_on_every_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..300 {
            let n = 1 + trial % 60;
            let values: Vec<Len> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        None
                    } else {
                        Some(rng.gen_range(1..20))
                    }
                })
                .collect();
            let truth = values.iter().copied().max().unwrap();
            let dh = DurrHoyer::new(values.clone(), 3.0);
            let run = dh.run(&mut rng);
            // Genuine element, never above the true maximum.
            assert_eq!(run.value, values[run.index]);
            assert!(run.value <= truth);
            // Thresholds strictly increase and the costs add up.
            for w in run.stages.windows(2) {
                assert!(values[w[1].index] > values[w[0].index]);
            }
            assert_eq!(run.stages.iter().map(|s| s.cost).sum::<u64>(), run.queries);
            assert_eq!(run.stages.last().unwrap().index, run.index);
            assert!(run.queries <= dh.budget().max(1));
            if run.converged {
                assert_eq!(run.value, truth);
            }
            let again = dh.run(&mut ChaCha8Rng::seed_from_u64(trial as u64));
            let again2 = dh.run(&mut ChaCha8Rng::seed_from_u64(trial as u64));
            assert_eq!(again, again2);
        }
    }

    #[test]
    fn ledger_json_shape() {
        let mut l = QueryLedger::new();
        l.charge(0, 10);
        l.charge(2, 5);
        let json = serde_json::to_value(&l).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"total": 15, "per_level": {"level0": 10, "level1": 0, "level2": 5}})
        );
        let back: QueryLedger = serde_json::from_value(json).unwrap();
        assert_eq!(back, l);
        let bad = serde_json::json!({"total": 3, "per_level": {"level0": 1}});
        assert!(serde_json::from_value::<QueryLedger>(bad).is_err());
    }
}
