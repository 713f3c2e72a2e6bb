use std::thread;

use proptest::prelude::*;

use coverbound::classic::{schonheim, Params};
use coverbound::oracle::{exact_cover_number, optimal_covering, is_covering};
use coverbound::pipeline::{emit_table, scan_improvements, BoundStore, RuleSet, TableFormat};

fn tiny_grid() -> Vec<Params> {
    let mut out = Vec::new();
    for t in 1..=2u64 {
        for k in t + 1..=4 {
            for v in k + 1..=7 {
                out.push(Params::new(v, k, t, 1).unwrap());
            }
        }
    }
    out
}

#[test]
fn every_ruleset_is_sound_against_the_oracle() {
    let store = BoundStore::new();
    let rulesets = [RuleSet::full(), RuleSet::restricted(), RuleSet::classical()];
    for key in tiny_grid() {
        let opt = optimal_covering(&key, 1_000_000).expect("tiny instances finish");
        assert!(is_covering(&opt.witness, key.t as usize, key.lambda as usize));
        assert_eq!(opt.witness.num_blocks() as u64, opt.value);
        for rs in &rulesets {
            let rec = store.best_bound(&key, rs).unwrap();
            assert!(rec.value <= opt.value.into(), "{key}: {} via {} > {}", rec.value, rec.rule, opt.value);
        }
    }
}

#[test]
fn scan_is_independent_of_query_order_and_threads() {
    let rs = RuleSet::restricted();
    let reference = emit_table(&scan_improvements(3, 1, 9..=14, &BoundStore::new(), &rs).unwrap(), TableFormat::Csv);

    // warm the memo from the top down before scanning
    let store = BoundStore::new();
    for v in (15..=60).rev() {
        store.best_bound(&Params::new(v, 14, 3, 1).unwrap(), &rs).unwrap();
    }
    let warmed = emit_table(&scan_improvements(3, 1, 9..=14, &store, &rs).unwrap(), TableFormat::Csv);
    assert_eq!(warmed, reference);

    let shared = BoundStore::new();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..4)
            .map(|_| scope.spawn(|| emit_table(&scan_improvements(3, 1, 9..=14, &shared, &rs).unwrap(), TableFormat::Csv)))
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), reference);
        }
    });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_bound_at_least_schonheim(v in 3u64..80, k in 2u64..30, t in 1u64..5, lambda in 1u64..3) {
        prop_assume!(t < k && k < v);
        let key = Params::new(v, k, t, lambda).unwrap();
        let rec = BoundStore::new().best_bound(&key, &RuleSet::full()).unwrap();
        prop_assert!(rec.value >= schonheim(&key));
    }

    #[test]
    fn record_independent_of_store_history(v in 5u64..60, k in 3u64..20, t in 1u64..4, warm in 0u64..10) {
        prop_assume!(t < k && k < v);
        let key = Params::new(v, k, t, 1).unwrap();
        let rs = RuleSet::full();
        let fresh = BoundStore::new().best_bound(&key, &rs).unwrap();
        let store = BoundStore::new();
        store.best_bound(&Params::new(v + warm + 1, k + 1, t, 1).unwrap(), &rs).unwrap();
        prop_assert_eq!(store.best_bound(&key, &rs).unwrap(), fresh);
    }

    #[test]
    fn small_instances_match_oracle_lower_side(v in 4u64..8, k in 2u64..5, lambda in 1u64..3) {
        prop_assume!(k < v);
        let key = Params::new(v, k, 2.min(k - 1), lambda).unwrap();
        if let Some(exact) = exact_cover_number(&key, 500_000) {
            let rec = BoundStore::new().best_bound(&key, &RuleSet::full()).unwrap();
            prop_assert!(rec.value <= exact.into());
        }
    }
}
