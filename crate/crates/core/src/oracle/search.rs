//! Exact covering numbers for tiny parameters by depth-first branch and bound.

use super::covering::{mask_of, subsets, Covering};
use crate::classic::{schonheim, Params};
use crate::exactmath::{binom, Nat};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Result of a search: the optimum with a witness, or `None` if the node budget ran out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub value: u64,
    pub witness: Covering,
    pub nodes: u64,
}

struct Search {
    lambda: u32,
    tsets: Vec<u64>,
    /// block indices containing each t-set
    containing: Vec<Vec<u32>>,
    /// t-set indices inside each block
    inside: Vec<Vec<u32>>,
    counts: Vec<u32>,
    point_deficit: Vec<u64>,
    total_deficit: u64,
    per_block: u64,
    per_point: u64,
    v: usize,
    forbidden: Vec<bool>,
    chosen: Vec<u32>,
    nodes: u64,
    budget: u64,
}

enum Outcome {
    Found,
    Infeasible,
    OutOfBudget,
}

impl Search {
    fn add(&mut self, b: usize) {
        for &ti in &self.inside[b] {
            let ti = ti as usize;
            if self.counts[ti] < self.lambda {
                self.total_deficit -= 1;
                let mut m = self.tsets[ti];
                while m != 0 {
                    self.point_deficit[m.trailing_zeros() as usize] -= 1;
                    m &= m - 1;
                }
            }
            self.counts[ti] += 1;
        }
        self.chosen.push(b as u32);
    }

    fn remove(&mut self, b: usize) {
        for &ti in &self.inside[b] {
            let ti = ti as usize;
            self.counts[ti] -= 1;
            if self.counts[ti] < self.lambda {
                self.total_deficit += 1;
                let mut m = self.tsets[ti];
                while m != 0 {
                    self.point_deficit[m.trailing_zeros() as usize] += 1;
                    m &= m - 1;
                }
            }
        }
        self.chosen.pop();
    }

    fn lower_bound(&self) -> u64 {
        let global = self.total_deficit.div_ceil(self.per_block);
        let local = (0..self.v)
            .map(|x| self.point_deficit[x].div_ceil(self.per_point))
            .max()
            .unwrap_or(0);
        global.max(local)
    }

    fn dfs(&mut self, remaining: u64) -> Outcome {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Outcome::OutOfBudget;
        }
        if self.total_deficit == 0 {
            return Outcome::Found;
        }
        if self.lower_bound() > remaining {
            return Outcome::Infeasible;
        }
        // branch on a least-covered t-set
        let (target, _) = self
            .counts
            .iter()
            .enumerate()
            .min_by_key(|&(_, &c)| c)
            .expect("deficit implies t-sets exist");
        let deficit = (self.lambda - self.counts[target]) as u64;
        if deficit > remaining {
            return Outcome::Infeasible;
        }
        let mut candidates: Vec<u32> = self.containing[target]
            .iter()
            .copied()
            .filter(|&b| !self.forbidden[b as usize])
            .collect();
        // try blocks that repair the most deficient t-sets first
        let gain = |b: u32| {
            self.inside[b as usize]
                .iter()
                .filter(|&&ti| self.counts[ti as usize] < self.lambda)
                .count()
        };
        candidates.sort_by_key(|&b| std::cmp::Reverse(gain(b)));

        // Branch i uses candidate i and forbids candidates 0..i in its subtree: any
        // solution has a first candidate (in this order) that it uses.
        let mut outcome = Outcome::Infeasible;
        let mut forbidden_here = Vec::new();
        for b in candidates {
            let b = b as usize;
            self.add(b);
            let r = self.dfs(remaining - 1);
            if matches!(r, Outcome::Found) {
                outcome = Outcome::Found;
                break;
            }
            self.remove(b);
            if matches!(r, Outcome::OutOfBudget) {
                outcome = Outcome::OutOfBudget;
                break;
            }
            self.forbidden[b] = true;
            forbidden_here.push(b);
        }
        for b in forbidden_here {
            self.forbidden[b] = false;
        }
        outcome
    }
}

fn greedy_upper(p: &Params, tsets: &[u64], blocks: &[u64], inside: &[Vec<u32>]) -> Vec<u32> {
    let lambda = p.lambda as u32;
    let mut counts = vec![0u32; tsets.len()];
    let mut chosen = Vec::new();
    while counts.iter().any(|&c| c < lambda) {
        let best = (0..blocks.len())
            .max_by_key(|&b| {
                (
                    inside[b].iter().filter(|&&ti| counts[ti as usize] < lambda).count(),
                    std::cmp::Reverse(b),
                )
            })
            .expect("blocks exist");
        for &ti in &inside[best] {
            counts[ti as usize] += 1;
        }
        chosen.push(best as u32);
    }
    chosen
}

/// Minimum number of blocks in a `t`-`(v,k,λ)` covering together with an optimal
/// covering, or `None` when `budget` search nodes were not enough to decide.
///
/// Building the block/`t`-set incidence lists is charged against the budget up
/// front, so instances whose incidence count `C(v,k)·C(k,t)` exceeds it (or with
/// `v > 64`) are reported as undecided without any work.
pub fn optimal_covering(p: &Params, budget: u64) -> Option<Optimum> {
    p.validate().ok()?;
    if p.v > 64 || binom(p.v, p.k) * binom(p.k, p.t) > Nat::from(budget) {
        return None;
    }
    let v = p.v as usize;
    let (k, t) = (p.k as usize, p.t as usize);
    let tsets: Vec<u64> = subsets(v, t).iter().map(|x| mask_of(x)).collect();
    let block_sets = subsets(v, k);
    let blocks: Vec<u64> = block_sets.iter().map(|b| mask_of(b)).collect();
    let mut containing = vec![Vec::new(); tsets.len()];
    let mut inside = vec![Vec::new(); blocks.len()];
    for (ti, &tm) in tsets.iter().enumerate() {
        for (bi, &bm) in blocks.iter().enumerate() {
            if tm & bm == tm {
                containing[ti].push(bi as u32);
                inside[bi].push(ti as u32);
            }
        }
    }
    let to_covering = |chosen: &[u32]| {
        Covering::new(v, chosen.iter().map(|&b| block_sets[b as usize].clone()).collect())
            .expect("blocks are subsets of the point set")
    };

    let greedy = greedy_upper(p, &tsets, &blocks, &inside);
    let upper = greedy.len() as u64;
    let lower: u64 = schonheim(p).try_into().expect("tiny parameters");

    let per_point = if t == 0 { 1 } else { binom(p.k - 1, p.t - 1).try_into().expect("small") };
    let lambda = p.lambda as u32;
    let mut point_deficit = vec![0u64; v];
    for &tm in &tsets {
        let mut m = tm;
        while m != 0 {
            point_deficit[m.trailing_zeros() as usize] += lambda as u64;
            m &= m - 1;
        }
    }
    let mut search = Search {
        lambda,
        total_deficit: tsets.len() as u64 * lambda as u64,
        counts: vec![0; tsets.len()],
        per_block: binom(p.k, p.t).try_into().expect("small"),
        per_point,
        point_deficit,
        v,
        forbidden: vec![false; blocks.len()],
        chosen: Vec::new(),
        tsets,
        containing,
        inside,
        nodes: 0,
        budget,
    };

    for target in lower..upper {
        match search.dfs(target) {
            Outcome::Found => {
                return Some(Optimum {
                    value: search.chosen.len() as u64,
                    witness: to_covering(&search.chosen),
                    nodes: search.nodes,
                })
            }
            Outcome::Infeasible => {}
            Outcome::OutOfBudget => return None,
        }
    }
    Some(Optimum { value: upper, witness: to_covering(&greedy), nodes: search.nodes })
}

/// `C_λ(v,k,t)` for tiny parameters, `None` if the budget is exhausted.
pub fn exact_cover_number(p: &Params, budget: u64) -> Option<u64> {
    optimal_covering(p, budget).map(|o| o.value)
}
