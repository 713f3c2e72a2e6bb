//! Best-known bound evaluation along the diagonal chain, external data,
//! improvement scans and table rendering.
//!
//! Every key `(v, k, t, λ)` is evaluated from the records of its chain
//! `(v−i, k−i, t−i, λ)`, which are memoized per ruleset fingerprint. The
//! fingerprint covers the ruleset and all ingested data, so a record is a pure
//! function of the key and the fingerprint no matter which order queries arrive in.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classic::{
    base_bound, mills_mullin_general, mills_mullin_special, read_bound_rows, schonheim, schonheim_step,
    ExactValueTable, Params,
};
use crate::error::{Error, Result};
use crate::exactmath::{decimal, default_sqrt_scale, Nat};
use crate::spectral::{build_context, theorem_dbig, theorem_main, theorem_smalld, useless_threshold, SmallDCase};

/// Which rules may contribute to a bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub base: bool,
    pub schonheim_step: bool,
    pub mm_special: bool,
    pub mm_general: bool,
    pub theorem_main: bool,
    pub theorem_dbig: bool,
    pub theorem_smalld: bool,
    pub external: bool,
    /// feed external values into the theorems as `b_i`, not only as final values
    pub external_as_bi: bool,
    /// inclusive `s` range, intersected with `1..=⌊t/2⌋`
    pub s_range: Option<(u64, u64)>,
    #[serde(with = "decimal")]
    pub sqrt_scale: Nat,
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::full()
    }
}

impl RuleSet {
    pub fn full() -> Self {
        RuleSet {
            base: true,
            schonheim_step: true,
            mm_special: true,
            mm_general: true,
            theorem_main: true,
            theorem_dbig: true,
            theorem_smalld: true,
            external: true,
            external_as_bi: true,
            s_range: None,
            sqrt_scale: default_sqrt_scale(),
        }
    }

    /// Base, Schönheim step, the `t = 2` Mills–Mullin case and the three theorems.
    pub fn restricted() -> Self {
        RuleSet { mm_general: false, external: false, ..Self::full() }
    }

    /// Everything except the spectral theorems.
    pub fn classical() -> Self {
        RuleSet { theorem_main: false, theorem_dbig: false, theorem_smalld: false, ..Self::full() }
    }

    pub fn any_theorem(&self) -> bool {
        self.theorem_main || self.theorem_dbig || self.theorem_smalld
    }

    /// Values of `s` tried for a key with strength `t`.
    pub fn s_values(&self, t: u64) -> std::ops::RangeInclusive<u64> {
        let (lo, hi) = self.s_range.unwrap_or((1, u64::MAX));
        lo.max(1)..=hi.min(t / 2)
    }
}

/// The rule that produced a bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum Rule {
    /// no enabled rule applies; the value is 0
    Trivial,
    Base,
    SchonheimStep,
    MillsMullinSpecial,
    MillsMullinGeneral { r: u64 },
    External { source: String },
    TheoremMain { s: u64 },
    TheoremDBig { s: u64 },
    TheoremSmallD { s: u64, case: SmallDCase },
}

impl Rule {
    pub fn is_theorem(&self) -> bool {
        matches!(self, Rule::TheoremMain { .. } | Rule::TheoremDBig { .. } | Rule::TheoremSmallD { .. })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Trivial => f.write_str("Trivial"),
            Rule::Base => f.write_str("Base"),
            Rule::SchonheimStep => f.write_str("SchonheimStep"),
            Rule::MillsMullinSpecial => f.write_str("MillsMullinSpecial"),
            Rule::MillsMullinGeneral { r } => write!(f, "MillsMullinGeneral(r={r})"),
            Rule::External { source } => write!(f, "External({source})"),
            Rule::TheoremMain { s } => write!(f, "TheoremMain(s={s})"),
            Rule::TheoremDBig { s } => write!(f, "TheoremDBig(s={s})"),
            Rule::TheoremSmallD { s, case } => write!(f, "TheoremSmallD(s={s}, {case})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Input {
    pub key: Params,
    #[serde(with = "decimal")]
    pub value: Nat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub key: Params,
    #[serde(with = "decimal")]
    pub value: Nat,
    pub rule: Rule,
    pub inputs: Vec<Input>,
}

/// One candidate value for a key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub rule: Rule,
    pub value: Nat,
    pub inputs: Vec<Input>,
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    key: Params,
    #[serde(with = "decimal")]
    value: Nat,
    rule: Rule,
    inputs: Vec<Input>,
    ruleset_fingerprint: String,
}

type MemoKey = (String, Params);

/// Memoized bound records plus ingested external data.
#[derive(Debug, Default)]
pub struct BoundStore {
    memo: RwLock<HashMap<MemoKey, BoundRecord>>,
    external: BTreeMap<Params, (Nat, String)>,
    exact: ExactValueTable,
    cache_path: Option<PathBuf>,
}

struct Eval<'a> {
    rs: &'a RuleSet,
    fp: String,
    /// ruleset used for the `b_i` of the theorems
    bi: Option<Box<Eval<'a>>>,
}

impl BoundStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// A store backed by a line-oriented JSON cache; a missing file starts empty.
    pub fn with_cache(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut memo = HashMap::new();
        match fs::read_to_string(&path) {
            Ok(text) => {
                for line in text.lines().filter(|l| !l.trim().is_empty()) {
                    // unreadable lines are recomputed
                    if let Ok(c) = serde_json::from_str::<CacheLine>(line) {
                        let record = BoundRecord { key: c.key, value: c.value, rule: c.rule, inputs: c.inputs };
                        memo.insert((c.ruleset_fingerprint, c.key), record);
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(Error::io(path, e)),
        }
        Ok(BoundStore { memo: RwLock::new(memo), cache_path: Some(path), ..Self::default() })
    }

    pub fn cache_path(&self) -> Option<&Path> {
        self.cache_path.as_deref()
    }

    /// Write every memoized record to the cache file, if there is one.
    pub fn save_cache(&self) -> Result<()> {
        let Some(path) = &self.cache_path else { return Ok(()) };
        let memo = self.memo.read().expect("memo lock");
        let mut entries: Vec<_> = memo.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = Vec::new();
        for ((fp, key), r) in entries {
            let line = CacheLine {
                key: *key,
                value: r.value.clone(),
                rule: r.rule.clone(),
                inputs: r.inputs.clone(),
                ruleset_fingerprint: fp.clone(),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.push(b'\n');
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&out).map_err(|e| Error::io(path, e))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    /// Load external lower bounds from CSV. Duplicate keys keep the larger value.
    pub fn ingest_external_reader(&mut self, reader: impl std::io::Read) -> Result<usize> {
        let rows = read_bound_rows(reader)?;
        let count = rows.len();
        for row in rows {
            match self.external.get(&row.key) {
                Some((v, _)) if *v >= row.value => {}
                _ => {
                    self.external.insert(row.key, (row.value, row.source));
                }
            }
        }
        Ok(count)
    }

    pub fn ingest_external(&mut self, path: impl AsRef<Path>) -> Result<usize> {
        let path = path.as_ref();
        let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        self.ingest_external_reader(f)
    }

    /// Load exact covering numbers (same CSV layout) for the general Mills–Mullin rule.
    pub fn ingest_exact(&mut self, path: impl AsRef<Path>) -> Result<usize> {
        let table = ExactValueTable::load(path)?;
        let n = table.len();
        for (k, v, src) in table.iter() {
            self.exact.insert(*k, v.clone(), src);
        }
        Ok(n)
    }

    pub fn exact_table_mut(&mut self) -> &mut ExactValueTable {
        &mut self.exact
    }

    pub fn external_value(&self, key: &Params) -> Option<&Nat> {
        self.external.get(key).map(|(v, _)| v)
    }

    /// Hex SHA-256 over the ruleset and every ingested value.
    pub fn fingerprint(&self, rs: &RuleSet) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(rs).expect("ruleset serializes"));
        for (k, (v, src)) in &self.external {
            h.update(format!("e{},{},{},{},{v},{src};", k.v, k.k, k.t, k.lambda));
        }
        for (k, v, src) in self.exact.iter() {
            h.update(format!("x{},{},{},{},{v},{src};", k.v, k.k, k.t, k.lambda));
        }
        hex::encode(h.finalize())
    }

    /// Run `f` with an evaluator for `rs`; theorem inputs skip external data
    /// when `external_as_bi` is off.
    fn with_eval<T>(&self, rs: &RuleSet, f: impl FnOnce(&Eval) -> T) -> T {
        let fp = self.fingerprint(rs);
        if rs.external && !rs.external_as_bi {
            let inner = RuleSet { external: false, ..rs.clone() };
            let bi = Eval { fp: self.fingerprint(&inner), rs: &inner, bi: None };
            f(&Eval { rs, fp, bi: Some(Box::new(bi)) })
        } else {
            f(&Eval { rs, fp, bi: None })
        }
    }

    /// The best bound on `C_λ(v,k,t)` under `rs`, memoizing the whole chain.
    pub fn best_bound(&self, key: &Params, rs: &RuleSet) -> Result<BoundRecord> {
        key.validate()?;
        Ok(self.with_eval(rs, |ev| self.record(key, ev)))
    }

    /// Records for `(v−t, k−t, 0, λ)` up to the key itself.
    pub fn chain(&self, key: &Params, rs: &RuleSet) -> Result<Vec<BoundRecord>> {
        key.validate()?;
        Ok(self.with_eval(rs, |ev| (0..=key.t).rev().map(|i| self.record(&key.derived(i), ev)).collect()))
    }

    /// Every enabled rule's value for `key`, in tie-breaking order.
    pub fn candidates(&self, key: &Params, rs: &RuleSet) -> Result<Vec<Candidate>> {
        key.validate()?;
        Ok(self.with_eval(rs, |ev| self.evaluate(key, ev)))
    }

    fn record(&self, key: &Params, ev: &Eval) -> BoundRecord {
        let memo_key = (ev.fp.clone(), *key);
        if let Some(r) = self.memo.read().expect("memo lock").get(&memo_key) {
            return r.clone();
        }
        let mut best: Option<Candidate> = None;
        for c in self.evaluate(key, ev) {
            if best.as_ref().is_none_or(|b| c.value > b.value) {
                best = Some(c);
            }
        }
        let best = best.unwrap_or(Candidate { rule: Rule::Trivial, value: Nat::from(0u32), inputs: Vec::new() });
        let record = BoundRecord { key: *key, value: best.value, rule: best.rule, inputs: best.inputs };
        self.memo.write().expect("memo lock").insert(memo_key, record.clone());
        record
    }

    fn evaluate(&self, key: &Params, ev: &Eval) -> Vec<Candidate> {
        let rs = ev.rs;
        let mut out = Vec::new();
        let plain = |rule, value| Candidate { rule, value, inputs: Vec::new() };

        if rs.base {
            if let Some(v) = base_bound(key) {
                out.push(plain(Rule::Base, v));
            }
        }
        if key.t >= 1 && rs.schonheim_step {
            let pred = self.record(&key.derived(1), ev);
            let value = schonheim_step(key.v, key.k, &pred.value);
            out.push(Candidate {
                rule: Rule::SchonheimStep,
                value,
                inputs: vec![Input { key: pred.key, value: pred.value }],
            });
        }
        if rs.mm_special {
            if let Some(v) = mills_mullin_special(key, &schonheim(key)) {
                out.push(plain(Rule::MillsMullinSpecial, v));
            }
        }
        if rs.mm_general && key.t >= 2 {
            for r in 2..=key.t {
                if let Some(v) = mills_mullin_general(key, r, &self.exact) {
                    let c_prime = key.derived(1);
                    let inputs = self
                        .exact
                        .get(&c_prime)
                        .map(|c| vec![Input { key: c_prime, value: c.clone() }])
                        .unwrap_or_default();
                    out.push(Candidate { rule: Rule::MillsMullinGeneral { r }, value: v, inputs });
                }
            }
        }
        if rs.external {
            if let Some((v, src)) = self.external.get(key) {
                out.push(plain(Rule::External { source: src.clone() }, v.clone()));
            }
        }
        if rs.any_theorem() && key.t < key.k && key.k < key.v {
            let bi_ev = ev.bi.as_deref().unwrap_or(ev);
            for s in rs.s_values(key.t) {
                let Ok(ctx) = build_context(key, s, |q| self.record(q, bi_ev).value) else { continue };
                let inputs: Vec<Input> = ctx
                    .input_keys()
                    .into_iter()
                    .zip(&ctx.b)
                    .map(|(key, value)| Input { key, value: value.clone() })
                    .collect();
                let with = |rule, value| Candidate { rule, value, inputs: inputs.clone() };
                if rs.theorem_main {
                    if let Some(v) = theorem_main(&ctx) {
                        out.push(with(Rule::TheoremMain { s }, v));
                    }
                }
                if rs.theorem_dbig {
                    if let Some(v) = theorem_dbig(&ctx) {
                        out.push(with(Rule::TheoremDBig { s }, v));
                    }
                }
                if rs.theorem_smalld {
                    if let Some((v, case)) = theorem_smalld(&ctx, &rs.sqrt_scale) {
                        out.push(with(Rule::TheoremSmallD { s, case }, v));
                    }
                }
            }
        }
        out
    }
}

/// Delete a cache file; a missing file is not an error. Returns whether a file was removed.
pub fn clear_cache(path: impl AsRef<Path>) -> Result<bool> {
    let path = path.as_ref();
    match fs::remove_file(path) {
        Ok(()) => Ok(true),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(false),
        Err(e) => Err(Error::io(path, e)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    Plain,
    ItalicDbig,
    BoldSmalld,
}

impl Marker {
    fn suffix(self) -> &'static str {
        match self {
            Marker::Plain => "",
            Marker::ItalicDbig => "*",
            Marker::BoldSmalld => "!",
        }
    }
}

/// A key where a spectral theorem beats every other enabled rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImprovementEntry {
    pub params: Params,
    pub s: u64,
    #[serde(with = "decimal")]
    pub new_bound: Nat,
    /// best value over the non-theorem rules
    #[serde(with = "decimal")]
    pub comparison_bound: Nat,
    pub marker: Marker,
}

/// Classify one key. `None` unless some theorem strictly beats the other rules.
pub fn improvement_at(key: &Params, store: &BoundStore, rs: &RuleSet) -> Result<Option<ImprovementEntry>> {
    let candidates = store.candidates(key, rs)?;
    let comparison = candidates
        .iter()
        .filter(|c| !c.rule.is_theorem())
        .map(|c| c.value.clone())
        .max()
        .unwrap_or_default();

    let mut best: Option<(u64, Nat)> = None;
    for c in &candidates {
        let s = match c.rule {
            Rule::TheoremMain { s } | Rule::TheoremDBig { s } | Rule::TheoremSmallD { s, .. } => s,
            _ => continue,
        };
        if best.as_ref().is_none_or(|(_, v)| c.value > *v) {
            best = Some((s, c.value.clone()));
        }
    }
    let Some((s, new_bound)) = best else { return Ok(None) };
    if new_bound <= comparison {
        return Ok(None);
    }
    let at_s = |pick: fn(&Rule, u64) -> bool| {
        candidates.iter().find(|c| pick(&c.rule, s)).map(|c| c.value.clone())
    };
    let main = at_s(|r, s| matches!(r, Rule::TheoremMain { s: x } if *x == s));
    let dbig = at_s(|r, s| matches!(r, Rule::TheoremDBig { s: x } if *x == s));
    let smalld = at_s(|r, s| matches!(r, Rule::TheoremSmallD { s: x, .. } if *x == s));
    // with main silent, the other rules stand in for it
    let main_cmp = main.unwrap_or_else(|| comparison.clone());
    let marker = if dbig.is_some_and(|v| v > main_cmp) {
        Marker::ItalicDbig
    } else if smalld.is_some_and(|v| v > main_cmp) {
        Marker::BoldSmalld
    } else {
        Marker::Plain
    };
    Ok(Some(ImprovementEntry { params: *key, s, new_bound, comparison_bound: comparison, marker }))
}

/// Largest `v` worth scanning for `k`: the maximum over `s` of the uselessness threshold.
pub fn scan_limit(k: u64, t: u64, lambda: u64, rs: &RuleSet) -> Option<u64> {
    rs.s_values(t)
        .filter(|&s| s < t)
        .map(|s| u64::try_from(useless_threshold(k, t, lambda, s)).unwrap_or(u64::MAX))
        .max()
}

/// Every improvement for `k ∈ k_range` and `k < v ≤ scan_limit`, sorted by `(k, v)`.
pub fn scan_improvements(
    t: u64,
    lambda: u64,
    k_range: std::ops::RangeInclusive<u64>,
    store: &BoundStore,
    rs: &RuleSet,
) -> Result<Vec<ImprovementEntry>> {
    let cells: Vec<Params> = k_range
        .filter(|&k| k > t)
        .flat_map(|k| {
            let top = scan_limit(k, t, lambda, rs).unwrap_or(k);
            (k + 1..=top).map(move |v| Params { v, k, t, lambda })
        })
        .collect();
    let mut entries: Vec<ImprovementEntry> = cells
        .par_iter()
        .map(|key| improvement_at(key, store, rs))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    entries.sort_by_key(|e| (e.params.k, e.params.v, e.params.t, e.params.lambda));
    Ok(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    v: u64,
    k: u64,
    t: u64,
    lambda: u64,
    s: u64,
    new_bound: String,
    comparison_bound: String,
    marker: Marker,
}

/// Render scan entries.
///
/// Text groups by `k` with `*` after dBig entries and `!` after small-`d`
/// entries; rows reached with `s ≠ 1` are labelled `k (s=S):`.
pub fn emit_table(entries: &[ImprovementEntry], format: TableFormat) -> String {
    match format {
        TableFormat::Text => {
            let mut rows: BTreeMap<(u64, u64), Vec<String>> = BTreeMap::new();
            for e in entries {
                rows.entry((e.params.k, e.s)).or_default().push(format!("{}{}", e.params.v, e.marker.suffix()));
            }
            rows.into_iter()
                .map(|((k, s), vs)| {
                    let label = if s == 1 { k.to_string() } else { format!("{k} (s={s})") };
                    format!("{label}: {}\n", vs.join(","))
                })
                .collect()
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if entries.is_empty() {
                w.write_record(["v", "k", "t", "lambda", "s", "new_bound", "comparison_bound", "marker"])
                    .expect("in-memory write");
            }
            for e in entries {
                w.serialize(CsvRow {
                    v: e.params.v,
                    k: e.params.k,
                    t: e.params.t,
                    lambda: e.params.lambda,
                    s: e.s,
                    new_bound: e.new_bound.to_string(),
                    comparison_bound: e.comparison_bound.to_string(),
                    marker: e.marker,
                })
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        TableFormat::Json => serde_json::to_string_pretty(entries).expect("entries serialize") + "\n",
    }
}

/// Parse csv or json output of [`emit_table`].
pub fn parse_table(text: &str, format: TableFormat) -> Result<Vec<ImprovementEntry>> {
    match format {
        TableFormat::Text => Err(Error::MalformedTable("the text format is not parseable".into())),
        TableFormat::Json => Ok(serde_json::from_str(text)?),
        TableFormat::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            let mut out = Vec::new();
            for (i, row) in r.deserialize::<CsvRow>().enumerate() {
                let row = row.map_err(|e| Error::MalformedTable(format!("row {}: {e}", i + 1)))?;
                let num = |s: &str| {
                    s.parse::<Nat>().map_err(|e| Error::MalformedTable(format!("row {}: {e}", i + 1)))
                };
                let params = Params::new(row.v, row.k, row.t, row.lambda)
                    .map_err(|e| Error::MalformedTable(format!("row {}: {e}", i + 1)))?;
                out.push(ImprovementEntry {
                    params,
                    s: row.s,
                    new_bound: num(&row.new_bound)?,
                    comparison_bound: num(&row.comparison_bound)?,
                    marker: row.marker,
                });
            }
            Ok(out)
        }
    }
}
