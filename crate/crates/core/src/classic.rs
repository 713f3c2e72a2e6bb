//! Classical covering-number lower bounds: base cases, the Schönheim bound,
//! its one-step recursion and the Mills–Mullin refinement.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{binom, ceil_div, Nat};

/// A parameter set `(v, k, t, λ)` of a covering problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Params {
    pub v: u64,
    pub k: u64,
    pub t: u64,
    pub lambda: u64,
}

impl Params {
    /// Checked constructor: requires `t ≤ k ≤ v`, `k ≥ 1` and `λ ≥ 1`.
    ///
    /// `t = 0` is accepted since `C_λ(v, k, 0) = λ` anchors every recursion.
    pub fn new(v: u64, k: u64, t: u64, lambda: u64) -> Result<Self> {
        let p = Params { v, k, t, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return Err(Error::InvalidParams(format!("{self}: lambda must be at least 1")));
        }
        if self.k == 0 || self.t > self.k || self.k > self.v {
            return Err(Error::InvalidParams(format!("{self}: need t <= k <= v and k >= 1")));
        }
        Ok(())
    }

    /// The derived parameter set `(v−i, k−i, t−i, λ)`.
    pub fn derived(&self, i: u64) -> Params {
        assert!(i <= self.t, "derived({i}) of {self}");
        Params {
            v: self.v - i,
            k: self.k - i,
            t: self.t - i,
            lambda: self.lambda,
        }
    }

    /// The predecessor on the diagonal chain, `(v−1, k−1, t−1)`.
    pub fn predecessor(&self) -> Option<Params> {
        (self.t > 0).then(|| self.derived(1))
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{}({},{},{})", self.lambda, self.v, self.k, self.t)
    }
}

/// Trusted exact covering numbers, keyed by parameter set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExactValueTable {
    entries: BTreeMap<Params, (Nat, String)>,
}

impl ExactValueTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: Params, value: Nat, source: impl Into<String>) {
        self.entries.insert(key, (value, source.into()));
    }

    pub fn get(&self, key: &Params) -> Option<&Nat> {
        self.entries.get(key).map(|(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Params, &Nat, &str)> {
        self.entries.iter().map(|(k, (v, s))| (k, v, s.as_str()))
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut table = Self::new();
        for row in read_bound_rows(reader)? {
            table.insert(row.key, row.value, row.source);
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }
}

/// One parsed record of a `v,k,t,lambda,value,source` CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub key: Params,
    pub value: Nat,
    pub source: String,
}

#[derive(Deserialize)]
struct RawRow {
    v: u64,
    k: u64,
    t: u64,
    lambda: u64,
    value: String,
    source: String,
}

/// Parse a bound CSV. Rows are numbered from 1, excluding the header.
pub fn read_bound_rows(reader: impl Read) -> Result<Vec<BoundRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::MalformedRow { row: 0, reason: e.to_string() })?
        .clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    let expected = ["v", "k", "t", "lambda", "value", "source"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::MalformedRow {
            row: 0,
            reason: format!("expected header {}", expected.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (idx, record) in rdr.deserialize::<RawRow>().enumerate() {
        let row = idx + 1;
        let raw = record.map_err(|e| Error::MalformedRow { row, reason: e.to_string() })?;
        let value: Nat = raw
            .value
            .parse()
            .map_err(|_| Error::MalformedRow { row, reason: format!("bad value {:?}", raw.value) })?;
        let key = Params::new(raw.v, raw.k, raw.t, raw.lambda)
            .map_err(|_| Error::InvalidParameterRow(row))?;
        rows.push(BoundRow { key, value, source: raw.source });
    }
    Ok(rows)
}

/// One application of the recursion `⌈(v/k)·sub_bound⌉`.
pub fn schonheim_step(v: u64, k: u64, sub_bound: &Nat) -> Nat {
    ceil_div(&(sub_bound * v), &Nat::from(k)).expect("k >= 1")
}

/// The values `ℓ_i = L_λ(v−i, k−i, t−i)` for `i = 0..=t`, so `ℓ_t = λ` and `ℓ_0 = L_λ(v,k,t)`.
pub fn schonheim_chain(p: &Params) -> Vec<Nat> {
    let mut chain = vec![Nat::zero(); p.t as usize + 1];
    chain[p.t as usize] = Nat::from(p.lambda);
    for i in (0..p.t).rev() {
        let sub = &chain[i as usize + 1];
        chain[i as usize] = schonheim_step(p.v - i, p.k - i, sub);
    }
    chain
}

/// The Schönheim bound `L_λ(v, k, t)`.
pub fn schonheim(p: &Params) -> Nat {
    schonheim_chain(p).swap_remove(0)
}

/// `C_λ(v,k,0) = λ` and `C_λ(v,k,1) = ⌈λv/k⌉`; nothing for `t ≥ 2`.
pub fn base_bound(p: &Params) -> Option<Nat> {
    match p.t {
        0 => Some(Nat::from(p.lambda)),
        1 => Some(ceil_div(&Nat::from(p.lambda * p.v), &Nat::from(p.k)).expect("k >= 1")),
        _ => None,
    }
}

/// Mills–Mullin in the `r = t = 2` case: `L + 1` when `λ(v−1) ≡ 0 (mod k−1)` and
/// `λv(v−1) ≡ 1 (mod k)`.
///
/// The second congruence is equivalent to `λv(v−1)/(k−1) ≡ −1 (mod k)` because
/// `k − 1 ≡ −1 (mod k)`.
pub fn mills_mullin_special(p: &Params, schonheim_value: &Nat) -> Option<Nat> {
    if p.t != 2 || p.k < 2 {
        return None;
    }
    let lv1 = p.lambda as u128 * (p.v as u128 - 1);
    if !lv1.is_multiple_of(p.k as u128 - 1) {
        return None;
    }
    if (lv1 * p.v as u128) % p.k as u128 != 1 % p.k as u128 {
        return None;
    }
    Some(schonheim_value + 1u32)
}

/// The general Mills–Mullin bound for a given `r ∈ {2..t}`.
///
/// Fires only when `C' = C_λ(v−1,k−1,t−1)` is a known exact value, `v·C' ≢ 0 (mod k)`,
/// and `C' = (C(v−1,r−1)/C(k−1,r−1))·C_λ(v−r,k−r,t−r)` with the right-hand covering
/// number also known exactly (from the table, or `t−r ≤ 1`). Returns `⌈(v·C' + r)/k⌉`.
pub fn mills_mullin_general(p: &Params, r: u64, exact: &ExactValueTable) -> Option<Nat> {
    if r < 2 || r > p.t {
        return None;
    }
    let c_prime = exact.get(&p.derived(1))?;
    let k = Nat::from(p.k);
    if (c_prime * p.v).is_multiple_of(&k) {
        return None;
    }
    let deep = p.derived(r);
    let c_deep = match exact.get(&deep) {
        Some(c) => c.clone(),
        None => base_bound(&deep)?,
    };
    if c_prime * binom(p.k - 1, r - 1) != binom(p.v - 1, r - 1) * c_deep {
        return None;
    }
    Some(ceil_div(&(c_prime * p.v + r), &k).expect("k >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: u64, k: u64, t: u64, lambda: u64) -> Params {
        Params::new(v, k, t, lambda).unwrap()
    }

    fn nat(n: u64) -> Nat {
        Nat::from(n)
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(5, 6, 2, 1).is_err());
        assert!(Params::new(5, 3, 4, 1).is_err());
        assert!(Params::new(5, 3, 2, 0).is_err());
        assert!(Params::new(5, 3, 0, 1).is_ok());
    }

    #[test]
    fn schonheim_examples() {
        // ⌈19/9·⌈18/8·⌈17/7⌉⌉⌉ = ⌈19/9·⌈18·3/8⌉⌉ = ⌈19·7/9⌉
        assert_eq!(schonheim(&p(19, 9, 3, 1)), nat(15));
        for t in 0..=5 {
            assert_eq!(schonheim(&p(9, 9, t, 3)), nat(3));
        }
        let chain = schonheim_chain(&p(148, 32, 5, 1));
        assert_eq!(chain[4], nat(6));
        assert_eq!(chain[3], nat(30));
        assert_eq!(chain[2], nat(146));
    }

    #[test]
    fn schonheim_step_examples() {
        assert_eq!(schonheim_step(22, 10, &nat(7)), nat(16));
        assert_eq!(schonheim_step(44, 20, &nat(7)), nat(16));
        assert_eq!(schonheim_step(30, 7, &nat(0)), nat(0));
    }

    #[test]
    fn base_bound_examples() {
        assert_eq!(base_bound(&p(17, 7, 1, 1)), Some(nat(3)));
        assert_eq!(base_bound(&p(20, 8, 1, 1)), Some(nat(3)));
        assert_eq!(base_bound(&p(20, 8, 0, 4)), Some(nat(4)));
        assert_eq!(base_bound(&p(20, 8, 2, 1)), None);
    }

    #[test]
    fn mills_mullin_special_examples() {
        let q = p(7, 3, 2, 1);
        assert_eq!(mills_mullin_special(&q, &schonheim(&q)), None);
        let q = p(13, 4, 2, 1);
        assert_eq!(mills_mullin_special(&q, &schonheim(&q)), None);
        let q = p(9, 5, 2, 1); // 8 mod 4 = 0, 72 mod 5 = 2
        assert_eq!(mills_mullin_special(&q, &schonheim(&q)), None);
        let q = p(10, 4, 2, 1); // 9 mod 3 = 0, 90 mod 4 = 2
        assert_eq!(mills_mullin_special(&q, &schonheim(&q)), None);
        let q = p(8, 4, 2, 1); // 7 mod 3 != 0
        assert_eq!(mills_mullin_special(&q, &schonheim(&q)), None);
    }

    #[test]
    fn mills_mullin_special_fires() {
        // λ = 2, k = 3, v = 5: 2·4 ≡ 0 (mod 2) and 2·5·4 = 40 ≡ 1 (mod 3)
        let q = p(5, 3, 2, 2);
        let l = schonheim(&q);
        assert_eq!(l, nat(7));
        assert_eq!(mills_mullin_special(&q, &l), Some(nat(8)));
        // never for t != 2
        assert_eq!(mills_mullin_special(&p(5, 3, 3, 2), &l), None);
    }

    #[test]
    fn mills_mullin_general_needs_table() {
        let empty = ExactValueTable::new();
        for v in 4..12 {
            for k in 3..v {
                for t in 2..=k.min(4) {
                    assert_eq!(mills_mullin_general(&p(v, k, t, 1), 2, &empty), None);
                }
            }
        }
    }

    #[test]
    fn mills_mullin_general_divisibility_guard() {
        // C(6,2,1) = 3 and 7·3 = 21 ≡ 0 (mod 3)
        let mut table = ExactValueTable::new();
        table.insert(p(6, 2, 1, 1), nat(3), "exact");
        assert_eq!(mills_mullin_general(&p(7, 3, 2, 1), 2, &table), None);
    }

    #[test]
    fn mills_mullin_general_fires_on_known_case() {
        // v = 5, k = 3, t = 2, λ = 2: C' = C_2(4,2,1) = 4, 5·4 = 20 ≢ 0 (mod 3),
        // ratio identity 4 = (4/2)·2. Bound ⌈(20 + 2)/3⌉ = 8 = L + 1.
        let mut table = ExactValueTable::new();
        table.insert(p(4, 2, 1, 2), nat(4), "exact");
        assert_eq!(mills_mullin_general(&p(5, 3, 2, 2), 2, &table), Some(nat(8)));
        // r outside {2..t}
        assert_eq!(mills_mullin_general(&p(5, 3, 2, 2), 3, &table), None);
        assert_eq!(mills_mullin_general(&p(5, 3, 2, 2), 1, &table), None);
    }

    #[test]
    fn bound_rows_parse_and_reject() {
        let csv = "v,k,t,lambda,value,source\n19,9,3,1,16,lajolla\n";
        let rows = read_bound_rows(csv.as_bytes()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].key, p(19, 9, 3, 1));
        assert_eq!(rows[0].value, nat(16));
        assert_eq!(read_bound_rows("".as_bytes()).unwrap().len(), 0);
        let bad = "v,k,t,lambda,value,source\n19,9,3,1,16,a\n19,nine,3,1,16,b\n";
        assert!(matches!(read_bound_rows(bad.as_bytes()), Err(Error::MalformedRow { row: 2, .. })));
        let invalid = "v,k,t,lambda,value,source\n9,19,3,1,16,a\n";
        assert!(matches!(read_bound_rows(invalid.as_bytes()), Err(Error::InvalidParameterRow(1))));
    }

    fn params_strategy() -> impl Strategy<Value = Params> {
        (1u64..5, 1u64..40, 0u64..6, 1u64..4).prop_map(|(k_extra, v_extra, t, lambda)| {
            let k = t + k_extra;
            Params { v: k + v_extra, k, t, lambda }
        })
    }

    proptest! {
        #[test]
        fn schonheim_dominates_counting_bound(p in params_strategy()) {
            let counting = ceil_div(&(binom(p.v, p.t) * p.lambda), &binom(p.k, p.t)).unwrap();
            prop_assert!(schonheim(&p) >= counting);
        }

        #[test]
        fn schonheim_recursion_consistent(p in params_strategy()) {
            if let Some(pred) = p.predecessor() {
                prop_assert_eq!(schonheim(&p), schonheim_step(p.v, p.k, &schonheim(&pred)));
            }
        }

        #[test]
        fn schonheim_monotone_in_v(p in params_strategy()) {
            let next = Params { v: p.v + 1, ..p };
            prop_assert!(schonheim(&p) <= schonheim(&next));
        }

        #[test]
        fn mills_mullin_special_is_l_plus_one(p in params_strategy()) {
            let l = schonheim(&p);
            if let Some(x) = mills_mullin_special(&p, &l) {
                prop_assert_eq!(p.t, 2);
                prop_assert_eq!(x, l + 1u32);
            }
        }

        #[test]
        fn mills_mullin_general_never_below_schonheim_step(
            v in 5u64..30, k_off in 1u64..10, c in 1u64..60, lambda in 1u64..3
        ) {
            // fabricate a table consistent with the r = 2, t = 2 ratio identity
            let k = (v - 1).min(2 + k_off);
            let key = Params { v, k, t: 2, lambda };
            let mut table = ExactValueTable::new();
            table.insert(key.derived(1), Nat::from(c), "synthetic");
            if let Some(r) = mills_mullin_general(&key, 2, &table) {
                prop_assert!(r >= schonheim_step(v, k, &Nat::from(c)));
            }
        }
    }
}
