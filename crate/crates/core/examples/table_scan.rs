//! Scan t = 3 for keys where a spectral theorem beats the classical bounds and
//! print the table in all three formats.
//!
//! `*` marks entries won by the large-d theorem, `!` those won by the small-d one.

use coverbound::pipeline::{emit_table, parse_table, scan_improvements, BoundStore, RuleSet, TableFormat};

fn main() {
    let store = BoundStore::new();
    let entries = scan_improvements(3, 1, 9..=20, &store, &RuleSet::restricted()).expect("scan");
    print!("{}", emit_table(&entries, TableFormat::Text));

    let csv = emit_table(&entries[..3], TableFormat::Csv);
    print!("\n{csv}");
    assert_eq!(parse_table(&csv, TableFormat::Csv).expect("own output parses"), entries[..3]);

    println!("\n{}", emit_table(&entries[..1], TableFormat::Json));
}
