//! Feed external lower bounds into the pipeline and watch them propagate up the
//! diagonal chain.

use std::io::Write;

use coverbound::classic::Params;
use coverbound::pipeline::{BoundStore, RuleSet};

fn main() {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    writeln!(file, "v,k,t,lambda,value,source").unwrap();
    writeln!(file, "20,9,3,1,19,example").unwrap();
    writeln!(file, "20,9,3,1,18,older").unwrap();

    let mut store = BoundStore::new();
    let n = store.ingest_external(file.path()).expect("well-formed CSV");
    println!("ingested {n} rows");

    let key = Params::new(21, 10, 4, 1).expect("valid");
    for (label, rules) in [
        ("without external data", RuleSet { external: false, ..RuleSet::full() }),
        ("with external data", RuleSet::full()),
    ] {
        let chain = store.chain(&key, &rules).expect("valid key");
        let top = chain.last().expect("non-empty");
        println!("{label}: {key} >= {} via {}", top.value, top.rule);
        println!("    predecessor {} >= {} [{}]", chain[3].key, chain[3].value, chain[3].rule);
    }

    let err = store.ingest_external_reader("v,k,t,lambda,value,source\n5,9,3,1,2,bad\n".as_bytes());
    println!("bad row: {}", err.expect_err("k > v is rejected"));
}
