//! Exact covering numbers from blown-up affine geometries: the spectral lower
//! bound and the explicit covering meet at q(q^t−1)/(q−1).

use coverbound::families::{affine_flats, exactth2, Field};
use coverbound::oracle::is_covering;

fn main() {
    let f3 = Field::prime(3).expect("3 is prime");
    let plane = affine_flats(&f3, 2);
    println!("AG(2,3): {} points, {} lines, covering: {}", plane.v(), plane.num_blocks(), is_covering(&plane, 2, 1));

    for (q, m, t) in [(2, 6, 2), (2, 6, 3), (3, 8, 2), (3, 9, 2), (5, 15, 2)] {
        let field = Field::prime(q).expect("prime");
        let r = exactth2(m, t, &field).expect("family hypotheses hold");
        println!(
            "q={q} m={m} t={t}: C(v,{},{t}) = {} for {} <= v <= {} (lower {}, blocks {})",
            r.k, r.exact_value, r.v_min, r.v_max, r.lower_bound, r.upper_bound
        );
        assert!(r.certified());
    }

    // prime powers need an explicit field; GF(4) with w² = w + 1
    let gf4 = Field::from_table_str(
        "4  0 0 0 0  0 1 2 3  0 2 3 1  0 3 1 2   0 1 2 3  1 0 3 2  2 3 0 1  3 2 1 0",
    )
    .expect("valid table");
    let r = exactth2(10, 2, &gf4).expect("family hypotheses hold");
    println!("q=4 m=10 t=2: C(v,{},2) = {} for {} <= v <= {}", r.k, r.exact_value, r.v_min, r.v_max);
}
