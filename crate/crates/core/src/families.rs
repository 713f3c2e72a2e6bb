//! Closed-form infinite families: the `t = 5` improvement family and the affine
//! blow-up family whose covering numbers are known exactly.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use serde::Serialize;

use crate::classic::{schonheim, Params};
use crate::error::{Error, Result};
use crate::exactmath::{decimal, Nat};
use crate::oracle::{is_covering, Covering};
use crate::spectral::{build_context, theorem_main};

/// Outcome of evaluating the `t = 5` family at one `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfFamRecord {
    pub m: u64,
    pub params: Params,
    #[serde(with = "decimal")]
    pub d: BigInt,
    #[serde(with = "decimal")]
    pub theorem_bound: Nat,
    #[serde(with = "decimal")]
    pub schonheim: Nat,
    /// `L + m(m−4) − 10`
    #[serde(with = "decimal")]
    pub promised: Nat,
}

impl InfFamRecord {
    pub fn holds(&self) -> bool {
        self.theorem_bound >= self.promised
    }
}

/// `v = m²(m−2)+4`, `k = m(m−1)+2`, `t = 5`, `λ = 1`.
pub fn inffam_params(m: u64) -> Result<Params> {
    if m < 6 {
        return Err(Error::OutOfFamilyRange(format!("m = {m} < 6")));
    }
    Params::new(m * m * (m - 2) + 4, m * (m - 1) + 2, 5, 1)
}

/// The `s = 2` spectral bound for the family member `m`, next to the Schönheim bound it improves.
pub fn inffam_check(m: u64) -> Result<InfFamRecord> {
    let params = inffam_params(m)?;
    let ctx = build_context(&params, 2, schonheim)?;
    let theorem_bound = theorem_main(&ctx)
        .ok_or_else(|| Error::FamilyInapplicable(format!("main theorem silent at m = {m}")))?;
    let l = schonheim(&params);
    let promised = &l + Nat::from(m * (m - 4)) - 10u32;
    Ok(InfFamRecord { m, params, d: ctx.d, theorem_bound, schonheim: l, promised })
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn is_prime_power(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d)).expect("n >= 2 has a divisor");
    let mut x = n;
    while x.is_multiple_of(p) {
        x /= p;
    }
    x == 1
}

/// A finite field of order `q` given by its addition and multiplication tables.
///
/// Element `0` is the additive and `1` the multiplicative identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    q: u64,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl Field {
    /// Integers mod `q`.
    pub fn prime(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::FieldUnavailable(q));
        }
        let table = |op: fn(u64, u64) -> u64| {
            (0..q).flat_map(|a| (0..q).map(move |b| (op(a, b) % q) as u32)).collect()
        };
        Ok(Field { q, add: table(|a, b| a + b), mul: table(|a, b| a * b) })
    }

    /// The field of order `q`: native when `q` is prime, else the supplied table.
    pub fn resolve(q: u64, table: Option<Field>) -> Result<Self> {
        match table {
            Some(f) if f.q == q => Ok(f),
            Some(f) => Err(Error::InvalidFieldTable(format!("table has order {}, expected {q}", f.q))),
            None => Self::prime(q),
        }
    }

    /// Parse `q`, then the `q×q` multiplication table, then the `q×q` addition table.
    ///
    /// Integers may be separated by whitespace or commas.
    pub fn from_table_str(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidFieldTable(msg);
        let mut nums = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u64>().map_err(|e| bad(format!("{s:?}: {e}"))));
        let q = nums.next().ok_or_else(|| bad("empty table".into()))??;
        if !is_prime_power(q) {
            return Err(bad(format!("order {q} is not a prime power")));
        }
        let n = (q * q) as usize;
        let mut grid = |name: &str| -> Result<Vec<u32>> {
            let g: Vec<u32> = nums.by_ref().take(n).map(|r| r.map(|x| x as u32)).collect::<Result<_>>()?;
            if g.len() != n {
                return Err(bad(format!("{name} table has {} entries, expected {n}", g.len())));
            }
            if let Some(x) = g.iter().find(|&&x| x as u64 >= q) {
                return Err(bad(format!("{name} table entry {x} outside 0..{q}")));
            }
            Ok(g)
        };
        let mul = grid("multiplication")?;
        let add = grid("addition")?;
        if nums.next().is_some() {
            return Err(bad("trailing entries".into()));
        }
        let f = Field { q, add, mul };
        f.validate()?;
        Ok(f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_table_str(&text)
    }

    fn validate(&self) -> Result<()> {
        let q = self.q as u32;
        let els = || 0..q;
        let fail = |what: &str| Err(Error::InvalidFieldTable(what.to_string()));
        for a in els() {
            if self.add(a, 0) != a || self.mul(a, 1) != a || self.mul(a, 0) != 0 {
                return fail("identity elements are not 0 and 1");
            }
            if !els().any(|b| self.add(a, b) == 0) {
                return fail("missing additive inverse");
            }
            if a != 0 && !els().any(|b| self.mul(a, b) == 1) {
                return fail("missing multiplicative inverse");
            }
            for b in els() {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return fail("operations are not commutative");
                }
                for c in els() {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c))
                        || self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c))
                    {
                        return fail("operations are not associative");
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return fail("multiplication does not distribute over addition");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a as u64 * self.q + b as u64) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a as u64 * self.q + b as u64) as usize]
    }
}

/// Point `idx` of `AG(t,q)` as coordinates, most significant first.
fn coords(idx: usize, q: usize, t: usize) -> Vec<u32> {
    let mut x = vec![0u32; t];
    let mut r = idx;
    for c in x.iter_mut().rev() {
        *c = (r % q) as u32;
        r /= q;
    }
    x
}

/// Hyperplanes `a·x = c` of `AG(t,q)`, one normal per scalar class.
///
/// The result is a `t`-`(q^t, q^{t−1}, 1)` covering with `q(q^t−1)/(q−1)` blocks.
pub fn affine_flats(field: &Field, t: u32) -> Covering {
    assert!(t >= 1);
    let q = field.order() as usize;
    let n = q.pow(t);
    let points: Vec<Vec<u32>> = (0..n).map(|i| coords(i, q, t as usize)).collect();
    let normals = (1..n)
        .map(|i| coords(i, q, t as usize))
        .filter(|a| a.iter().find(|&&x| x != 0) == Some(&1));
    let mut blocks = Vec::new();
    for a in normals {
        let mut by_value = vec![Vec::new(); q];
        for (idx, x) in points.iter().enumerate() {
            let dot = a.iter().zip(x).fold(0, |acc, (&ai, &xi)| field.add(acc, field.mul(ai, xi)));
            by_value[dot as usize].push(idx as u32);
        }
        blocks.extend(by_value);
    }
    Covering::new(n, blocks).expect("points lie in 0..q^t")
}

/// Replace every point of the affine covering by `m` copies, then drop the
/// lexicographically last `m·q^t − v` points.
///
/// Copy `j` of affine point `u` becomes point `u·m + j`.
pub fn blowup(field: &Field, t: u32, m: u64, v: u64) -> Result<Covering> {
    let n = field.order().pow(t) * m;
    if v > n {
        return Err(Error::OutOfRange(format!("v = {v} exceeds m·q^t = {n}")));
    }
    let base = affine_flats(field, t);
    let blocks = base
        .blocks()
        .iter()
        .map(|b| {
            b.iter()
                .flat_map(|&u| (0..m).map(move |j| u as u64 * m + j))
                .filter(|&x| x < v)
                .map(|x| x as u32)
                .collect()
        })
        .collect();
    Covering::new(v as usize, blocks)
}

fn affine_hypotheses(m: u64, q: u64, t: u64) -> std::result::Result<(), String> {
    if !is_prime_power(q) {
        return Err(format!("q = {q} is not a prime power"));
    }
    if m < 2 * q + 2 {
        return Err(format!("m = {m} < 2q+2 = {}", 2 * q + 2));
    }
    if t < 2 || t >= m * q.pow(t as u32 - 1) {
        return Err(format!("t = {t} outside 2 ≤ t < m·q^(t−1)"));
    }
    Ok(())
}

fn geometric(q: u64, e: u32) -> u64 {
    (q.pow(e) - 1) / (q - 1)
}

/// Schönheim chain values `ℓ_i = L(v−i, mq^{t−1}−i, t−i)` in closed form.
///
/// The general formula `(q^{t−i+1}−1)/(q−1)` is only valid for `i ≥ 2`; for
/// `i ∈ {0,1}` the value depends on where `v` sits in the window, and those two
/// splits are returned instead.
pub fn exactlem2_ell(v: u64, m: u64, q: u64, t: u64, i: u64) -> Result<Nat> {
    affine_hypotheses(m, q, t).map_err(Error::ClosedFormOutOfRange)?;
    let qt = q.pow(t as u32);
    let (lo, hi) = ((m * qt + 3).checked_sub(2 * q), m * qt);
    if lo.is_none_or(|lo| v < lo) || v > hi {
        return Err(Error::ClosedFormOutOfRange(format!("v = {v} outside the window ending at {hi}")));
    }
    if i >= t {
        return Err(Error::ClosedFormOutOfRange(format!("i = {i} ≥ t = {t}")));
    }
    let upper_half = v + q >= m * qt + 2;
    let value = match i {
        0 if upper_half => q * geometric(q, t as u32),
        0 => q * q * geometric(q, t as u32 - 1),
        1 if upper_half => geometric(q, t as u32),
        1 => q * geometric(q, t as u32 - 1),
        _ => geometric(q, (t - i + 1) as u32),
    };
    Ok(Nat::from(value))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactTh2Record {
    pub m: u64,
    pub q: u64,
    pub t: u64,
    pub k: u64,
    pub z: u64,
    pub v_min: u64,
    pub v_max: u64,
    /// `q(q^t−1)/(q−1)`
    #[serde(with = "decimal")]
    pub exact_value: Nat,
    /// main theorem at `v_min`, `s = 1`, Schönheim inputs
    #[serde(with = "decimal")]
    pub lower_bound: Nat,
    /// blocks in the blown-up covering on `v_min` points
    pub upper_bound: u64,
}

impl ExactTh2Record {
    pub fn certified(&self) -> bool {
        self.lower_bound >= self.exact_value && Nat::from(self.upper_bound) <= self.exact_value
    }
}

/// `C(v, mq^{t−1}, t) = q(q^t−1)/(q−1)` for `v_min ≤ v ≤ mq^t`, certified from
/// both sides at `v_min`.
pub fn exactth2(m: u64, t: u64, field: &Field) -> Result<ExactTh2Record> {
    let q = field.order();
    affine_hypotheses(m, q, t).map_err(Error::FamilyInapplicable)?;
    let qt = q.pow(t as u32);
    let k = m * q.pow(t as u32 - 1);
    let floor_term = (m * (q - 1) * q.pow(t as u32 - 1) / (qt - 1)) as i64 - 2 * q as i64 + 1;
    let z = (q as i64 - 2).min(floor_term);
    let z = u64::try_from(z).map_err(|_| Error::FamilyInapplicable(format!("z = {z} < 0")))?;
    let v_min = m * qt - q + 1 - z;
    let exact_value = Nat::from(q * geometric(q, t as u32));

    let params = Params::new(v_min, k, t, 1)?;
    let ctx = build_context(&params, 1, schonheim)?;
    let lower_bound = theorem_main(&ctx)
        .ok_or_else(|| Error::FamilyInapplicable(format!("main theorem silent at {params}")))?;

    let witness = blowup(field, t as u32, m, v_min)?;
    if !is_covering(&witness, t as usize, 1) {
        return Err(Error::FamilyInapplicable(format!("blow-up is not a covering for {params}")));
    }
    Ok(ExactTh2Record {
        m,
        q,
        t,
        k,
        z,
        v_min,
        v_max: m * qt,
        exact_value,
        lower_bound,
        upper_bound: witness.num_blocks() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(n: u64) -> Nat {
        Nat::from(n)
    }

    #[test]
    fn inffam_first_member() {
        let r = inffam_check(6).unwrap();
        assert_eq!((r.params.v, r.params.k), (148, 32));
        assert_eq!(r.d, BigInt::from(0));
        assert_eq!(r.promised, &r.schonheim + 2u32);
        assert!(r.promised >= nat(3208));
        assert!(r.holds());
        assert!(matches!(inffam_check(5), Err(Error::OutOfFamilyRange(_))));
    }

    #[test]
    fn inffam_large_m_closed_forms() {
        for m in 14..=20u64 {
            let r = inffam_check(m).unwrap();
            let l = m.pow(5) - 4 * m.pow(4) + 20 * m * m - 10 * m - 45;
            assert_eq!(r.schonheim, nat(l));
            assert!(r.theorem_bound >= nat(m.pow(5) - 4 * m.pow(4) + 21 * m * m - 14 * m - 55));
        }
    }

    #[test]
    fn inffam_grid() {
        for m in 6..=30 {
            assert!(inffam_check(m).unwrap().holds(), "m = {m}");
        }
    }

    #[test]
    fn prime_powers() {
        assert!(is_prime(7) && !is_prime(9) && !is_prime(1));
        assert!(is_prime_power(9) && is_prime_power(8) && !is_prime_power(12) && !is_prime_power(1));
    }

    #[test]
    fn affine_small_cases() {
        let c = affine_flats(&Field::prime(2).unwrap(), 2);
        assert_eq!((c.v(), c.num_blocks(), c.uniform_block_size()), (4, 6, Some(2)));
        let c = affine_flats(&Field::prime(3).unwrap(), 2);
        assert_eq!((c.v(), c.num_blocks(), c.uniform_block_size()), (9, 12, Some(3)));
        assert!(is_covering(&c, 2, 1));
    }

    #[test]
    fn affine_grid() {
        for q in [2u64, 3, 5] {
            let f = Field::prime(q).unwrap();
            for t in [2u32, 3] {
                let c = affine_flats(&f, t);
                assert_eq!(c.num_blocks() as u64, q * geometric(q, t));
                assert_eq!(c.uniform_block_size(), Some(q.pow(t - 1) as usize));
                assert!(is_covering(&c, t as usize, 1), "q={q} t={t}");
            }
        }
    }

    #[test]
    fn non_prime_needs_table() {
        assert!(matches!(Field::resolve(4, None), Err(Error::FieldUnavailable(4))));
    }

    // GF(4) = {0, 1, w, w+1} encoded as 0, 1, 2, 3 with w² = w + 1
    const GF4: &str = "4
        0 0 0 0
        0 1 2 3
        0 2 3 1
        0 3 1 2

        0 1 2 3
        1 0 3 2
        2 3 0 1
        3 2 1 0";

    #[test]
    fn table_field_builds_affine_plane() {
        let f = Field::from_table_str(GF4).unwrap();
        let c = affine_flats(&f, 2);
        assert_eq!((c.v(), c.num_blocks()), (16, 20));
        assert!(is_covering(&c, 2, 1));
        let r = exactth2(10, 2, &f).unwrap();
        assert!(r.certified());
    }

    #[test]
    fn broken_tables_are_rejected() {
        assert!(matches!(Field::from_table_str("6 0"), Err(Error::InvalidFieldTable(_))));
        let z4 = GF4.replace("0 3 1 2\n", "0 3 2 1\n");
        assert!(Field::from_table_str(&z4).is_err());
        assert!(Field::from_table_str("4 0 0").is_err());
    }

    #[test]
    fn blowup_examples() {
        let f = Field::prime(2).unwrap();
        let c = blowup(&f, 2, 6, 24).unwrap();
        assert_eq!((c.v(), c.num_blocks(), c.uniform_block_size()), (24, 6, Some(12)));
        assert!(is_covering(&c, 2, 1));
        let cut = blowup(&f, 2, 6, 20).unwrap();
        assert_eq!(cut.num_blocks(), 6);
        assert!(is_covering(&cut, 2, 1));
        assert!(matches!(blowup(&f, 2, 6, 25), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn ell_examples() {
        assert_eq!(exactlem2_ell(72, 8, 3, 2, 1).unwrap(), nat(4));
        assert_eq!(exactlem2_ell(69, 8, 3, 2, 1).unwrap(), nat(3));
        assert!(matches!(exactlem2_ell(60, 8, 3, 2, 1), Err(Error::ClosedFormOutOfRange(_))));
        assert!(matches!(exactlem2_ell(72, 7, 3, 2, 1), Err(Error::ClosedFormOutOfRange(_))));
    }

    #[test]
    fn ell_matches_schonheim_on_grid() {
        for q in [2u64, 3, 5, 7] {
            for t in 2..=4u64 {
                for m in 2 * q + 2..=4 * q {
                    let k = m * q.pow(t as u32 - 1);
                    let top = m * q.pow(t as u32);
                    for v in top + 3 - 2 * q..=top {
                        for i in 0..t {
                            let direct = schonheim(&Params::new(v - i, k - i, t - i, 1).unwrap());
                            assert_eq!(exactlem2_ell(v, m, q, t, i).unwrap(), direct, "q={q} t={t} m={m} v={v} i={i}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exactth2_examples() {
        let r = exactth2(8, 2, &Field::prime(3).unwrap()).unwrap();
        assert_eq!((r.z, r.v_min, r.exact_value.clone()), (1, 69, nat(12)));
        assert!(r.certified());
        for m in [6u64, 7, 9] {
            let r = exactth2(m, 3, &Field::prime(2).unwrap()).unwrap();
            assert_eq!(r.z, 0);
            assert_eq!(r.exact_value, nat(14));
            assert!(r.certified());
        }
        assert!(matches!(exactth2(7, 2, &Field::prime(3).unwrap()), Err(Error::FamilyInapplicable(_))));
    }

    #[test]
    fn corollary_range() {
        for q in [3u64, 5] {
            let f = Field::prime(q).unwrap();
            for m in 3 * q..3 * q + 3 {
                let r = exactth2(m, 2, &f).unwrap();
                assert_eq!(r.z, q - 2);
                assert!(r.certified());
            }
        }
    }
}
