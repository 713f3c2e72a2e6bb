//! The t = 5 family v = m²(m−2)+4, k = m(m−1)+2 where the s = 2 bound beats
//! Schönheim by at least m(m−4) − 10.

use coverbound::families::inffam_check;

fn main() {
    println!("{:>3} {:>8} {:>5} {:>14} {:>14} {:>6}", "m", "v", "k", "Schönheim", "spectral", "gain");
    for m in 6..=16 {
        let r = inffam_check(m).expect("m >= 6");
        let gain = &r.theorem_bound - &r.schonheim;
        println!("{:>3} {:>8} {:>5} {:>14} {:>14} {:>6}", m, r.params.v, r.params.k, r.schonheim, r.theorem_bound, gain);
        assert!(r.holds());
    }
}
