//! Largest n-independent sets in small random multigraphs against the
//! degree-sequence guarantee ⌈Σ f_n(deg u)⌉.

use coverbound::oracle::{caro_tuza_check, Multigraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..6 {
        let g = Multigraph::random(&mut rng, 8, 3);
        let degrees: Vec<u64> = (0..g.vertex_count()).map(|u| g.degree(u)).collect();
        let line: Vec<String> = (1..=4)
            .map(|n| {
                let r = caro_tuza_check(&g, n).expect("at most 10 vertices");
                format!("n={n}: {}>={}", r.max_independent, r.guaranteed)
            })
            .collect();
        println!("degrees {degrees:?}  {}", line.join("  "));
    }
}
