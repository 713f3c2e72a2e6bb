use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// All `r`-subsets of `{0, …, n−1}` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<u32>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < r - cur.len() {
                break;
            }
            cur.push(x as u32);
            rec(x + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= n {
        rec(0, n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

pub(crate) fn mask_of(set: &[u32]) -> u64 {
    set.iter().fold(0u64, |m, &x| m | (1u64 << x))
}

/// An incidence structure: `v` points `0..v` and a multiset of blocks.
///
/// Blocks are stored sorted and duplicate-free; repeated blocks model multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covering {
    v: usize,
    blocks: Vec<Vec<u32>>,
}

impl Covering {
    pub fn new(v: usize, blocks: Vec<Vec<u32>>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            b.sort_unstable();
            b.dedup();
            if b.last().is_some_and(|&x| x as usize >= v) {
                return Err(Error::InvalidParams(format!("block {b:?} leaves the point set 0..{v}")));
            }
            normalized.push(b);
        }
        Ok(Covering { v, blocks: normalized })
    }

    /// Every `k`-subset of a `v`-set as a block.
    pub fn complete(v: usize, k: usize) -> Self {
        Covering { v, blocks: subsets(v, k) }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn min_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// `Some(k)` when every block has size `k`.
    pub fn uniform_block_size(&self) -> Option<usize> {
        let k = self.blocks.first()?.len();
        self.blocks.iter().all(|b| b.len() == k).then_some(k)
    }

    /// `b(X)`: the number of blocks containing `x`.
    pub fn count_containing(&self, x: &[u32]) -> usize {
        self.blocks
            .iter()
            .filter(|b| x.iter().all(|p| b.binary_search(p).is_ok()))
            .count()
    }

    pub(crate) fn block_masks(&self) -> Vec<u64> {
        assert!(self.v <= 64, "mask helpers need v <= 64");
        self.blocks.iter().map(|b| mask_of(b)).collect()
    }

    pub fn to_witness(&self, k: u64, t: u64, lambda: u64) -> Witness {
        Witness {
            v: self.v as u64,
            k,
            t,
            lambda,
            blocks: self.blocks.iter().map(|b| b.iter().map(|&x| x + 1).collect()).collect(),
        }
    }
}

/// Serialized covering with 1-based points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub v: u64,
    pub k: u64,
    pub t: u64,
    pub lambda: u64,
    pub blocks: Vec<Vec<u32>>,
}

impl Witness {
    pub fn to_covering(&self) -> Result<Covering> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&x| x.checked_sub(1).ok_or_else(|| Error::InvalidParams("point 0 in witness".into())))
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Covering::new(self.v as usize, blocks)
    }
}

/// Does every `t`-subset of points lie in at least `lambda` blocks?
///
/// Points with identical block memberships are interchangeable, so the check runs
/// over multisets of membership classes instead of raw `t`-subsets. This keeps
/// blown-up coverings with thousands of points cheap to verify.
pub fn is_covering(c: &Covering, t: usize, lambda: usize) -> bool {
    if t == 0 {
        return c.num_blocks() >= lambda;
    }
    if t > c.v {
        return true;
    }
    let words = c.num_blocks().div_ceil(64).max(1);
    let mut signatures = vec![vec![0u64; words]; c.v];
    for (j, b) in c.blocks.iter().enumerate() {
        for &x in b {
            signatures[x as usize][j / 64] |= 1u64 << (j % 64);
        }
    }
    let mut classes: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for sig in signatures {
        *classes.entry(sig).or_default() += 1;
    }
    let classes: Vec<(Vec<u64>, usize)> = classes.into_iter().collect();

    fn popcount(s: &[u64]) -> usize {
        s.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn rec(classes: &[(Vec<u64>, usize)], start: usize, remaining: usize, acc: &[u64], lambda: usize) -> bool {
        if popcount(acc) < lambda {
            return false;
        }
        if remaining == 0 {
            return true;
        }
        for (i, (sig, size)) in classes.iter().enumerate().skip(start) {
            let mut next = acc.to_vec();
            for (w, s) in next.iter_mut().zip(sig) {
                *w &= s;
            }
            // take between 1 and min(size, remaining) points of class i
            for take in 1..=(*size).min(remaining) {
                if !rec(classes, i + 1, remaining - take, &next, lambda) {
                    return false;
                }
            }
        }
        true
    }

    let mut all = vec![0u64; words];
    for j in 0..c.num_blocks() {
        all[j / 64] |= 1u64 << (j % 64);
    }
    // enough points exist, so each class-multiset of total size t is realizable
    rec(&classes, 0, t, &all, lambda)
}

/// The `s`-incidence matrix: rows are the `s`-subsets in lexicographic order, columns the blocks.
pub fn s_incidence(c: &Covering, s: usize) -> IntMatrix {
    let rows = subsets(c.v, s);
    let masks = c.block_masks();
    let mut m = IntMatrix::zeros(rows.len(), masks.len());
    for (r, x) in rows.iter().enumerate() {
        let xm = mask_of(x);
        for (col, bm) in masks.iter().enumerate() {
            if xm & bm == xm {
                m.set(r, col, 1);
            }
        }
    }
    m
}

/// Checks `(AAᵀ)[X, Y] = b(X ∪ Y)` for every pair of `s`-subsets.
pub fn gram_check(c: &Covering, s: usize) -> bool {
    let rows = subsets(c.v, s);
    let aat = s_incidence(c, s).gram();
    let masks = c.block_masks();
    let b_of = |m: u64| masks.iter().filter(|&&bm| bm & m == m).count() as i64;
    rows.iter().enumerate().all(|(i, x)| {
        rows.iter().enumerate().all(|(j, y)| aat.get(i, j) == b_of(mask_of(x) | mask_of(y)))
    })
}

/// A reproducible random `t`-`(v,k,λ)` covering.
///
/// One time in five this is the complete design (repeated until it reaches `λ`);
/// otherwise a few random `k`-subsets are greedily repaired until every `t`-subset
/// is covered `λ` times.
pub fn random_covering<R: Rng>(rng: &mut R, v: usize, k: usize, t: usize, lambda: usize) -> Covering {
    assert!(t <= k && k <= v && v <= 64);
    let all = subsets(v, k);
    if rng.gen_ratio(1, 5) {
        let per_copy = crate::exactmath::binom((v - t) as u64, (k - t) as u64);
        let per_copy: usize = per_copy.try_into().expect("small");
        let copies = lambda.div_ceil(per_copy);
        let blocks = (0..copies).flat_map(|_| all.iter().cloned()).collect();
        return Covering { v, blocks };
    }
    let tsets: Vec<u64> = subsets(v, t).iter().map(|x| mask_of(x)).collect();
    let all_masks: Vec<u64> = all.iter().map(|b| mask_of(b)).collect();
    let mut counts = vec![0usize; tsets.len()];
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    let add = |idx: usize, counts: &mut Vec<usize>, blocks: &mut Vec<Vec<u32>>| {
        let bm = all_masks[idx];
        for (ti, &tm) in tsets.iter().enumerate() {
            if tm & bm == tm {
                counts[ti] += 1;
            }
        }
        blocks.push(all[idx].clone());
    };
    let seed_blocks = rng.gen_range(0..=tsets.len() / 4 + 1);
    for _ in 0..seed_blocks {
        let idx = rng.gen_range(0..all.len());
        add(idx, &mut counts, &mut blocks);
    }
    while let Some(ti) = counts.iter().position(|&c| c < lambda) {
        let tm = tsets[ti];
        let gain = |bm: u64| {
            tsets
                .iter()
                .zip(&counts)
                .filter(|(&m, &c)| c < lambda && m & bm == m)
                .count()
        };
        let mut candidates: Vec<usize> = (0..all.len()).filter(|&i| all_masks[i] & tm == tm).collect();
        candidates.shuffle(rng);
        let best = candidates
            .into_iter()
            .max_by_key(|&i| gain(all_masks[i]))
            .expect("some block contains every t-subset");
        add(best, &mut counts, &mut blocks);
    }
    Covering { v, blocks }
}
