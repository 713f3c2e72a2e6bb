//! Exact covering numbers for tiny parameters and a direct check of the
//! P + M decomposition on an explicit covering.

use coverbound::classic::{schonheim, Params};
use coverbound::oracle::{decomposition_check, optimal_covering, run_identity_suite, v0_check, DEFAULT_BUDGET};
use coverbound::spectral::build_context;

fn main() {
    for v in 4..=8 {
        let p = Params::new(v, 3, 2, 1).expect("valid");
        let opt = optimal_covering(&p, DEFAULT_BUDGET).expect("small enough");
        println!("{p} = {} (Schönheim {}, {} nodes)", opt.value, schonheim(&p), opt.nodes);
    }

    let fano = Params::new(7, 3, 2, 1).expect("valid");
    let witness = optimal_covering(&fano, DEFAULT_BUDGET).expect("small enough").witness;
    println!("{}", serde_json::to_string(&witness.to_witness(3, 2, 1)).expect("serializes"));
    let ctx = build_context(&fano, 1, schonheim).expect("t < k < v");
    let report = decomposition_check(&witness, &ctx).expect("matching covering");
    println!("decomposition: {} entries, passed: {}", report.entries_checked, report.passed());
    println!("V0 block: {:?}", v0_check(&witness, &ctx).expect("d < a_s"));

    let suite = run_identity_suite(7, 25);
    for (name, tally) in suite.tallies() {
        println!("{name}: {} passed, {} failed", tally.passed, tally.failed);
    }
}
