//! Best known lower bound for a few parameter sets, with the rule that produced
//! each value and the chain of sub-bounds it was built from.

use coverbound::classic::{schonheim, Params};
use coverbound::pipeline::{BoundStore, RuleSet};

fn main() {
    let store = BoundStore::new();
    let rules = RuleSet::full();
    for (v, k, t) in [(19, 9, 3), (22, 10, 3), (44, 20, 3), (148, 32, 5)] {
        let key = Params::new(v, k, t, 1).expect("valid parameters");
        let chain = store.chain(&key, &rules).expect("valid key");
        let top = chain.last().expect("non-empty chain");
        println!("{key} >= {} via {} (Schönheim {})", top.value, top.rule, schonheim(&key));
        for r in &chain[..chain.len() - 1] {
            println!("    {} >= {} [{}]", r.key, r.value, r.rule);
        }
    }

    // switching the spectral theorems off falls back to the classical bounds
    let key = Params::new(19, 9, 3, 1).expect("valid parameters");
    let classical = store.best_bound(&key, &RuleSet::classical()).expect("valid key");
    println!("{key} without theorems: {} via {}", classical.value, classical.rule);
}
