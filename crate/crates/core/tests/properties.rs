use ltp_core::qmax::DurrHoyer;
use ltp_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_graph(max_m: usize) -> impl Strategy<Value = Graph> {
    (1usize..=6, 0usize..=max_m, any::<u64>())
        .prop_map(|(n, m, seed)| random_graph(n, m, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hybrid_det_is_exact(g in small_graph(9)) {
        let truth = full_dp_longest_trail(&g).unwrap();
        let r = solve_hybrid(&g, &HybridConfig::deterministic()).unwrap();
        prop_assert_eq!(r.length, truth.length);
        prop_assert!(validate_trail(&g, &r.trail).is_ok());
        prop_assert_eq!(r.trail.len(), r.length);
        prop_assert!(r.success_nominal);
    }

    #[test]
    fn hybrid_stoch_is_one_sided_and_reproducible(g in small_graph(8), seed in any::<u64>()) {
        let truth = full_dp_longest_trail(&g).unwrap();
        let a = solve_hybrid(&g, &HybridConfig::stochastic(seed)).unwrap();
        prop_assert!(a.length <= truth.length);
        prop_assert!(validate_trail(&g, &a.trail).is_ok());
        prop_assert_eq!(a.trail.len(), a.length);
        let b = solve_hybrid(&g, &HybridConfig::stochastic(seed)).unwrap();
        prop_assert_eq!((a.length, a.trail, a.ledger), (b.length, b.trail, b.ledger));
    }

    #[test]
    fn get_len_is_reversal_symmetric(g in small_graph(7), bits in any::<u32>()) {
        let m = g.edge_count();
        prop_assume!(m > 0);
        let set = EdgeSet::from_edges((0..m).filter(|e| bits >> e & 1 == 1));
        let mut table = DpTable::new();
        for v in g.dir_edges() {
            for u in g.dir_edges() {
                let there = get_len(&g, set, v, u, &mut table);
                let back = get_len(&g, set, u.reversed(), v.reversed(), &mut table);
                prop_assert_eq!(there, back);
                if there.is_some() {
                    let t = reconstruct_path(&table, set, v, u).unwrap();
                    prop_assert!(validate_trail(&g, &t).is_ok());
                    prop_assert_eq!(Some(t.len() as u32), there);
                }
            }
        }
    }

    #[test]
    fn durr_hoyer_runs_respect_budget(values in prop::collection::vec(prop::option::of(0u32..50), 1..300), seed in any::<u64>()) {
        let dh = DurrHoyer::new(values.clone(), 23.0);
        let run = dh.run(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(run.queries <= dh.budget().max(1));
        prop_assert_eq!(run.queries, run.stages.iter().map(|s| s.cost).sum::<u64>());
        prop_assert_eq!(run.value, values[run.index]);
        for w in run.stages.windows(2) {
            prop_assert!(values[w[1].index] > values[w[0].index]);
        }
        if run.converged {
            prop_assert_eq!(run.value, values.iter().copied().max().unwrap());
        }
    }
}
