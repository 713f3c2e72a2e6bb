//! Multigraphs and the Caro–Tuza guarantee on `n`-independent sets.

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exactmath::{ceil_rat, Rat};

/// Largest multigraph the exhaustive independent-set search accepts.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 10;

/// Undirected loopless multigraph stored as a symmetric multiplicity matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    mult: Vec<u32>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph { n, mult: vec![0; n * n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn multiplicity(&self, x: usize, y: usize) -> u32 {
        self.mult[x * self.n + y]
    }

    pub fn set_multiplicity(&mut self, x: usize, y: usize, mu: u32) {
        assert_ne!(x, y, "loops are not allowed");
        self.mult[x * self.n + y] = mu;
        self.mult[y * self.n + x] = mu;
    }

    pub fn degree(&self, x: usize) -> u64 {
        (0..self.n).map(|y| self.multiplicity(x, y) as u64).sum()
    }

    /// Degree of `x` inside the vertex subset `mask`.
    pub fn induced_degree(&self, x: usize, mask: u32) -> u64 {
        (0..self.n)
            .filter(|&y| mask & (1 << y) != 0)
            .map(|y| self.multiplicity(x, y) as u64)
            .sum()
    }

    pub fn random<R: Rng>(rng: &mut R, n: usize, max_mult: u32) -> Self {
        let mut g = Self::new(n);
        let density: f64 = rng.gen_range(0.1..0.9);
        for x in 0..n {
            for y in x + 1..n {
                if rng.gen_bool(density) {
                    g.set_multiplicity(x, y, rng.gen_range(1..=max_mult));
                }
            }
        }
        g
    }
}

/// `f_n(x) = 1 − x/(2n)` for `x ≤ n` and `(n+1)/(2(x+1))` for `x ≥ n`.
pub fn caro_tuza_weight(n: u64, x: u64) -> Rat {
    assert!(n >= 1);
    if x <= n {
        Rat::new(BigInt::from(2 * n - x), BigInt::from(2 * n))
    } else {
        Rat::new(BigInt::from(n + 1), BigInt::from(2 * (x + 1)))
    }
}

/// Size of a largest `n`-independent set: a vertex subset whose induced
/// maximum degree is below `n`.
pub fn max_n_independent(g: &Multigraph, n: u64) -> Result<usize> {
    if g.n > MAX_EXHAUSTIVE_VERTICES {
        return Err(Error::Budget(format!(
            "{} vertices exceeds the exhaustive limit of {MAX_EXHAUSTIVE_VERTICES}",
            g.n
        )));
    }
    let best = (0u32..1 << g.n)
        .filter(|&mask| {
            (0..g.n)
                .filter(|&x| mask & (1 << x) != 0)
                .all(|x| g.induced_degree(x, mask) < n)
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0);
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaroTuzaReport {
    pub n: u64,
    pub max_independent: usize,
    pub guaranteed: usize,
}

impl CaroTuzaReport {
    pub fn holds(&self) -> bool {
        self.max_independent >= self.guaranteed
    }
}

/// Compare the exhaustive maximum `n`-independent set with `⌈Σ_u f_n(deg u)⌉`.
pub fn caro_tuza_check(g: &Multigraph, n: u64) -> Result<CaroTuzaReport> {
    let max_independent = max_n_independent(g, n)?;
    let sum: Rat = (0..g.n).map(|u| caro_tuza_weight(n, g.degree(u))).sum();
    let guaranteed = ceil_rat(&sum).try_into().expect("bounded by the vertex count");
    Ok(CaroTuzaReport { n, max_independent, guaranteed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weights_agree_at_the_switch() {
        for n in 1..6 {
            // both branches give 1/2 at x = n
            assert_eq!(caro_tuza_weight(n, n), Rat::new(1.into(), 2.into()));
        }
        assert_eq!(caro_tuza_weight(1, 0), Rat::from_integer(1.into()));
        assert_eq!(caro_tuza_weight(1, 3), Rat::new(1.into(), 4.into()));
    }

    #[test]
    fn edgeless_graph() {
        let g = Multigraph::new(6);
        let r = caro_tuza_check(&g, 1).unwrap();
        assert_eq!(r.max_independent, 6);
        assert_eq!(r.guaranteed, 6);
    }

    #[test]
    fn single_edge() {
        let mut g = Multigraph::new(2);
        g.set_multiplicity(0, 1, 1);
        let r = caro_tuza_check(&g, 1).unwrap();
        assert_eq!(r.max_independent, 1);
        assert_eq!(r.guaranteed, 1);
        // with n = 2 both endpoints fit
        assert_eq!(max_n_independent(&g, 2).unwrap(), 2);
    }

    #[test]
    fn too_many_vertices() {
        assert!(matches!(caro_tuza_check(&Multigraph::new(11), 1), Err(Error::Budget(_))));
    }

    #[test]
    fn random_graphs_satisfy_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let n_vertices = rng.gen_range(1..=8);
            let g = Multigraph::random(&mut rng, n_vertices, 3);
            for n in 1..=4 {
                assert!(caro_tuza_check(&g, n).unwrap().holds());
            }
        }
    }
}
