//! Entry-by-entry verification of the incidence-matrix identities behind the
//! spectral bounds, on explicit coverings.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::covering::{is_covering, mask_of, random_covering, s_incidence, subsets, Covering};
use super::graph::{caro_tuza_check, Multigraph};
use super::matrix::{pd_check, IntMatrix};
use super::search::exact_cover_number;
use crate::classic::{schonheim, Params};
use crate::error::{Error, Result};
use crate::exactmath::binom;
use crate::spectral::{build_context, SpectralContext};

/// Node budget for the exact values used by the subset check inside the suite.
const SUITE_SEARCH_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `b(Z) ≥ b_{|Z|}` for `s ≤ |Z| ≤ 2s`
    SubsetBound,
    /// `AAᵀ = P + M`
    Split,
    /// `(Σ_j a_j Q_jᵀQ_j)[X,Y] = b_{|X∪Y|}`
    WeightedSum,
    /// `(Q_jᵀQ_j)[X,Y] = C(|X∩Y|, j)`
    QGram,
    /// off-diagonal row sums of `M`
    RowSum,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Identity::SubsetBound => "subset bound",
            Identity::Split => "AAᵀ = P + M",
            Identity::WeightedSum => "Σ a_j Q_jᵀQ_j",
            Identity::QGram => "Q_jᵀQ_j entries",
            Identity::RowSum => "row sums of M",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub identity: Identity,
    /// 0-based points of the row index set (or of `Z` for the subset bound)
    pub row: Vec<u32>,
    pub col: Option<Vec<u32>>,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {:?}", self.identity, self.row)?;
        if let Some(col) = &self.col {
            write!(f, " × {col:?}")?;
        }
        write!(f, ": expected {}, got {}", self.expected, self.actual)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub entries_checked: u64,
    pub violation: Option<Violation>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn to_i64(x: &BigInt) -> i64 {
    i64::try_from(x).expect("oracle-sized integers fit in i64")
}

fn binom_i64(n: u64, r: u64) -> i64 {
    i64::try_from(binom(n, r)).expect("oracle-sized integers fit in i64")
}

fn check_shape(c: &Covering, ctx: &SpectralContext) -> Result<()> {
    let p = &ctx.params;
    let fits = c.v() as u64 == p.v
        && c.uniform_block_size() == Some(p.k as usize)
        && is_covering(c, p.t as usize, p.lambda as usize);
    if fits {
        Ok(())
    } else {
        Err(Error::ContextMismatch(format!(
            "covering on {} points with {} blocks is not a covering for {p}",
            c.v(),
            c.num_blocks()
        )))
    }
}

/// Verify every identity of the `P + M` decomposition for one covering and context,
/// stopping at the first violated entry.
pub fn decomposition_check(c: &Covering, ctx: &SpectralContext) -> Result<DecompositionReport> {
    check_shape(c, ctx)?;
    let s = ctx.s as usize;
    let masks = c.block_masks();
    let b_of = |m: u64| masks.iter().filter(|&&bm| bm & m == m).count() as i64;
    let b_i = |i: usize| i64::try_from(ctx.b(i as u64)).expect("small");
    let a: Vec<i64> = ctx.a.iter().map(to_i64).collect();
    let a_s = a[s];
    let b_s = b_i(s);
    let mut checked = 0u64;
    let report = |v: Violation, checked| Ok(DecompositionReport { entries_checked: checked, violation: Some(v) });

    for size in s..=2 * s {
        for z in subsets(c.v(), size) {
            checked += 1;
            let actual = b_of(mask_of(&z));
            if actual < b_i(size) {
                let v = Violation {
                    identity: Identity::SubsetBound,
                    row: z,
                    col: None,
                    expected: format!(">= {}", b_i(size)),
                    actual: actual.to_string(),
                };
                return report(v, checked);
            }
        }
    }

    let rows = subsets(c.v(), s);
    let aat = s_incidence(c, s).gram();
    let ks_minus_one = binom_i64(ctx.params.k, ctx.s) - 1;
    let d = to_i64(&ctx.d);

    for (i, x) in rows.iter().enumerate() {
        let xm = mask_of(x);
        let mut off_row_sum = 0i64;
        for (j, y) in rows.iter().enumerate() {
            checked += 1;
            let ym = mask_of(y);
            let union = (xm | ym).count_ones() as usize;
            let meet = (xm & ym).count_ones() as u64;
            let (p, m) = if i == j {
                (b_s - a_s, a_s + b_of(xm) - b_s)
            } else {
                (b_i(union), b_of(xm | ym) - b_i(union))
            };
            if i != j {
                off_row_sum += m;
            }
            let mismatch = |identity, expected: i64, actual: i64| Violation {
                identity,
                row: x.clone(),
                col: Some(y.clone()),
                expected: expected.to_string(),
                actual: actual.to_string(),
            };
            if aat.get(i, j) != p + m {
                return report(mismatch(Identity::Split, p + m, aat.get(i, j)), checked);
            }
            let q_entries: Vec<i64> = (0..=ctx.s).map(|jj| binom_i64(meet, jj)).collect();
            for (jj, &q) in q_entries.iter().enumerate() {
                // Q_jᵀQ_j[X,Y] counts the j-subsets of X ∩ Y
                let direct = subsets(s, jj)
                    .iter()
                    .filter(|sub| sub.iter().all(|&pos| ym & (1u64 << x[pos as usize]) != 0))
                    .count() as i64;
                if direct != q {
                    return report(mismatch(Identity::QGram, q, direct), checked);
                }
            }
            let weighted: i64 = a.iter().zip(&q_entries).map(|(aj, q)| aj * q).sum();
            if weighted != b_i(union) {
                return report(mismatch(Identity::WeightedSum, b_i(union), weighted), checked);
            }
        }
        let expected = (b_of(xm) - b_s) * ks_minus_one + d;
        if off_row_sum != expected {
            let v = Violation {
                identity: Identity::RowSum,
                row: x.clone(),
                col: None,
                expected: expected.to_string(),
                actual: off_row_sum.to_string(),
            };
            return report(v, checked);
        }
    }
    Ok(DecompositionReport { entries_checked: checked, violation: None })
}

/// Principal submatrices on `𝒱₀ = {X : b(X) = b_s}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct V0Report {
    pub v0_size: usize,
    pub num_blocks: usize,
    /// the `M` block on `𝒱₀` is strictly diagonally dominant
    pub m_dominant: bool,
    /// the `AAᵀ` block on `𝒱₀` is positive definite
    pub gram_pd: bool,
}

impl V0Report {
    pub fn passed(&self) -> bool {
        self.m_dominant && self.gram_pd && self.num_blocks >= self.v0_size
    }
}

/// When `d < a_s`, the `𝒱₀` block of `AAᵀ` must be positive definite, so `|B| ≥ |𝒱₀|`.
pub fn v0_check(c: &Covering, ctx: &SpectralContext) -> Result<V0Report> {
    check_shape(c, ctx)?;
    if ctx.d >= *ctx.a_s() {
        return Err(Error::ContextInapplicable(format!("{}: d >= a_s", ctx.params)));
    }
    let s = ctx.s as usize;
    let rows = subsets(c.v(), s);
    let masks = c.block_masks();
    let b_of = |m: u64| masks.iter().filter(|&&bm| bm & m == m).count() as i64;
    let b_s = i64::try_from(ctx.b_s()).expect("small");
    let a_s = to_i64(ctx.a_s());
    let v0: Vec<usize> = (0..rows.len()).filter(|&i| b_of(mask_of(&rows[i])) == b_s).collect();

    let aat = s_incidence(c, s).gram();
    let mut m = IntMatrix::zeros(v0.len(), v0.len());
    for (ii, &i) in v0.iter().enumerate() {
        for (jj, &j) in v0.iter().enumerate() {
            let union = mask_of(&rows[i]) | mask_of(&rows[j]);
            let value = if i == j {
                a_s
            } else {
                b_of(union) - i64::try_from(ctx.b(union.count_ones() as u64)).expect("small")
            };
            m.set(ii, jj, value);
        }
    }
    Ok(V0Report {
        v0_size: v0.len(),
        num_blocks: c.num_blocks(),
        m_dominant: m.is_diagonally_dominant(),
        gram_pd: pd_check(&aat.principal(&v0))?,
    })
}

/// Pass counts for one identity family across a suite run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SuiteTally {
    pub passed: u64,
    pub failed: u64,
    pub first_failure: Option<String>,
}

impl SuiteTally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub coverings: u64,
    pub gram: SuiteTally,
    pub rank: SuiteTally,
    pub subset_exact: SuiteTally,
    pub decomposition: SuiteTally,
    pub v0_definite: SuiteTally,
    pub caro_tuza: SuiteTally,
}

impl SuiteReport {
    pub fn tallies(&self) -> [(&'static str, &SuiteTally); 6] {
        [
            ("gram", &self.gram),
            ("rank", &self.rank),
            ("subset_exact", &self.subset_exact),
            ("decomposition", &self.decomposition),
            ("v0_definite", &self.v0_definite),
            ("caro_tuza", &self.caro_tuza),
        ]
    }

    pub fn all_passed(&self) -> bool {
        self.tallies().iter().all(|(_, t)| t.failed == 0)
    }
}

/// Run every identity family on `count` seeded random coverings and as many random multigraphs.
pub fn run_identity_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport { seed, ..Default::default() };
    let mut exact_memo: HashMap<Params, Option<u64>> = HashMap::new();

    for _ in 0..count {
        let v = rng.gen_range(4..=10usize);
        let k = rng.gen_range(2..v.min(6));
        let t = rng.gen_range(1..k.min(5));
        let lambda = rng.gen_range(1..=2usize);
        let c = random_covering(&mut rng, v, k, t, lambda);
        let p = Params::new(v as u64, k as u64, t as u64, lambda as u64).expect("valid by construction");
        report.coverings += 1;
        let label = || format!("{p} with {} blocks", c.num_blocks());

        for s in 0..=t.min(2) {
            report.gram.record(super::covering::gram_check(&c, s), || format!("{} (s={s})", label()));
            let aat = s_incidence(&c, s).gram();
            report.rank.record(c.num_blocks() >= aat.rank(), || format!("{} (s={s})", label()));
        }

        let masks = c.block_masks();
        for size in 0..=t {
            let sub = p.derived(size as u64);
            let exact = *exact_memo.entry(sub).or_insert_with(|| exact_cover_number(&sub, SUITE_SEARCH_BUDGET));
            let Some(exact) = exact else { continue };
            for z in subsets(v, size) {
                let zm = mask_of(&z);
                let b = masks.iter().filter(|&&bm| bm & zm == zm).count() as u64;
                report.subset_exact.record(b >= exact, || format!("{} at {z:?}", label()));
            }
        }

        for s in 1..=(t / 2) as u64 {
            let Ok(ctx) = build_context(&p, s, schonheim) else { continue };
            if !ctx.flags.all_hold() {
                continue;
            }
            match decomposition_check(&c, &ctx) {
                Ok(r) => report.decomposition.record(r.passed(), || {
                    format!("{} (s={s}): {}", label(), r.violation.as_ref().expect("failed"))
                }),
                Err(e) => report.decomposition.record(false, || e.to_string()),
            }
            if ctx.d < *ctx.a_s() {
                match v0_check(&c, &ctx) {
                    Ok(r) => report.v0_definite.record(r.passed(), || format!("{} (s={s}): {r:?}", label())),
                    Err(e) => report.v0_definite.record(false, || e.to_string()),
                }
            }
        }

        let n_vertices = rng.gen_range(1..=8);
        let g = Multigraph::random(&mut rng, n_vertices, 3);
        for n in 1..=4 {
            let ok = caro_tuza_check(&g, n).map(|r| r.holds()).unwrap_or(false);
            report.caro_tuza.record(ok, || format!("multigraph on {n_vertices} vertices, n={n}: {g:?}"));
        }
    }
    report
}
