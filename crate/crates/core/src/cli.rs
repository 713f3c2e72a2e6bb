//! Command-line front end. The binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::classic::Params;
use crate::error::{Error, Result};
use crate::exactmath::Nat;
use crate::families::{exactth2, inffam_check, Field};
use crate::oracle::{optimal_covering, run_identity_suite, DEFAULT_BUDGET};
use crate::pipeline::{clear_cache, emit_table, scan_improvements, BoundStore, RuleSet, TableFormat};

pub const CACHE_ENV: &str = "COVERBOUND_CACHE";

#[derive(Debug, Parser)]
#[command(name = "coverbound", version, about = "Certified lower bounds on covering numbers C_λ(v,k,t)")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Only Base, SchonheimStep, the t=2 Mills–Mullin case and the theorems
    #[arg(long, global = true)]
    pub restricted: bool,
    #[arg(long, global = true)]
    pub no_base: bool,
    #[arg(long, global = true)]
    pub no_step: bool,
    #[arg(long, global = true)]
    pub no_mm_special: bool,
    #[arg(long, global = true)]
    pub no_mm_general: bool,
    #[arg(long, global = true)]
    pub no_main: bool,
    #[arg(long, global = true)]
    pub no_dbig: bool,
    #[arg(long, global = true)]
    pub no_smalld: bool,
    /// Disable every spectral theorem
    #[arg(long, global = true)]
    pub no_theorems: bool,
    #[arg(long, global = true)]
    pub no_external: bool,
    /// Use external values only as final bounds, never as theorem inputs
    #[arg(long, global = true)]
    pub external_final_only: bool,
    #[arg(long, global = true)]
    pub s_min: Option<u64>,
    #[arg(long, global = true)]
    pub s_max: Option<u64>,
    /// Square-root precision denominator for the small-d case (c)
    #[arg(long, global = true)]
    pub sqrt_scale: Option<Nat>,
    /// External lower bounds CSV (v,k,t,lambda,value,source); repeatable
    #[arg(long = "external", global = true, value_name = "CSV")]
    pub externals: Vec<PathBuf>,
    /// Exact covering numbers CSV for the general Mills–Mullin rule; repeatable
    #[arg(long = "exact", global = true, value_name = "CSV")]
    pub exacts: Vec<PathBuf>,
    /// Bound cache file (JSON lines); COVERBOUND_CACHE takes precedence
    #[arg(long, global = true, value_name = "PATH")]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = TableFormat::Text)]
    pub format: TableFormat,
    /// Node budget for the exact search
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best known lower bound for C_λ(v,k,t) with its chain of sub-bounds
    Bound {
        v: u64,
        k: u64,
        t: u64,
        #[arg(default_value_t = 1)]
        lambda: u64,
    },
    /// Keys where a spectral theorem beats every other rule
    Scan {
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long)]
        kmin: u64,
        #[arg(long)]
        kmax: u64,
    },
    /// Verify the infinite families
    #[command(subcommand)]
    Family(FamilyCommand),
    /// Exact values and identity checks on explicit coverings
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Validate an external bounds CSV and report its record count
    Ingest { csv: PathBuf },
    /// Manage the bound cache file
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Debug, Subcommand)]
pub enum FamilyCommand {
    /// The t=5 family v = m²(m−2)+4, k = m(m−1)+2
    Inffam {
        /// A single m or an inclusive range such as 6..20
        #[arg(long, value_parser = parse_range, default_value = "6..20")]
        m: RangeInclusive<u64>,
    },
    /// Exact values C(v, mq^(t−1), t) from blown-up affine geometries
    Affine {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        t: u64,
        /// Field table for prime-power q: order, multiplication table, addition table
        #[arg(long, value_name = "PATH")]
        field_table: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Exact C_λ(v,k,t) by branch and bound
    Exact {
        v: u64,
        k: u64,
        t: u64,
        #[arg(default_value_t = 1)]
        lambda: u64,
        /// Also print an optimal covering as JSON
        #[arg(long)]
        witness: bool,
    },
    /// Run the seeded identity suite
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheCommand {
    /// Delete the cache file
    Clear,
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u64>, String> {
    let num = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|x| x..=x),
    }
}

/// Everything a command needs besides its own arguments.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ruleset: RuleSet,
    pub cache: Option<PathBuf>,
    pub externals: Vec<PathBuf>,
    pub exacts: Vec<PathBuf>,
    pub format: TableFormat,
    pub budget: u64,
}

impl RunConfig {
    pub fn from_args(a: &ConfigArgs, cache_env: Option<PathBuf>) -> Self {
        let mut rs = if a.restricted { RuleSet::restricted() } else { RuleSet::full() };
        let off = |flag: bool, rule: &mut bool| {
            if flag {
                *rule = false;
            }
        };
        off(a.no_base, &mut rs.base);
        off(a.no_step, &mut rs.schonheim_step);
        off(a.no_mm_special, &mut rs.mm_special);
        off(a.no_mm_general, &mut rs.mm_general);
        off(a.no_main || a.no_theorems, &mut rs.theorem_main);
        off(a.no_dbig || a.no_theorems, &mut rs.theorem_dbig);
        off(a.no_smalld || a.no_theorems, &mut rs.theorem_smalld);
        off(a.no_external, &mut rs.external);
        off(a.external_final_only, &mut rs.external_as_bi);
        if a.s_min.is_some() || a.s_max.is_some() {
            rs.s_range = Some((a.s_min.unwrap_or(1), a.s_max.unwrap_or(u64::MAX)));
        }
        if let Some(scale) = &a.sqrt_scale {
            rs.sqrt_scale = scale.clone();
        }
        RunConfig {
            ruleset: rs,
            cache: cache_env.or_else(|| a.cache.clone()),
            externals: a.externals.clone(),
            exacts: a.exacts.clone(),
            format: a.format,
            budget: a.budget,
        }
    }

    pub fn open_store(&self) -> Result<BoundStore> {
        let mut store = match &self.cache {
            Some(path) => BoundStore::with_cache(path)?,
            None => BoundStore::new(),
        };
        for path in &self.externals {
            store.ingest_external(path)?;
        }
        for path in &self.exacts {
            store.ingest_exact(path)?;
        }
        Ok(store)
    }
}

/// Parse `args`, run the command and return the exit code. Reads the cache
/// path override from the environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(args, std::env::var_os(CACHE_ENV).map(PathBuf::from), out, err)
}

/// [`run`] with the cache override passed explicitly.
pub fn run_with_env<I, T>(args: I, cache_env: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let config = RunConfig::from_args(&cli.config, cache_env);
    match dispatch(&cli.command, &config, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out).map_err(io_err)
}

/// Run one command; `Ok(false)` means a verification failed.
pub fn dispatch(command: &Command, config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Bound { v, k, t, lambda } => cmd_bound(Params::new(*v, *k, *t, *lambda)?, config, out),
        Command::Scan { t, lambda, kmin, kmax } => cmd_scan(*t, *lambda, *kmin..=*kmax, config, out),
        Command::Family(f) => cmd_family(f, config, out),
        Command::Oracle(o) => cmd_oracle(o, config, out),
        Command::Ingest { csv } => {
            let n = BoundStore::new().ingest_external(csv)?;
            writeln!(out, "{n} records in {}", csv.display()).map_err(io_err)?;
            Ok(true)
        }
        Command::Cache(CacheCommand::Clear) => {
            let path = config
                .cache
                .as_ref()
                .ok_or_else(|| Error::InvalidParams(format!("no cache configured (use --cache or {CACHE_ENV})")))?;
            let msg = if clear_cache(path)? { "removed" } else { "no cache at" };
            writeln!(out, "{msg} {}", path.display()).map_err(io_err)?;
            Ok(true)
        }
    }
}

pub fn cmd_bound(key: Params, config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let store = config.open_store()?;
    let chain = store.chain(&key, &config.ruleset)?;
    store.save_cache()?;
    let record = chain.last().expect("chain ends at the key");
    match config.format {
        TableFormat::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                record: &'a crate::pipeline::BoundRecord,
                chain: &'a [crate::pipeline::BoundRecord],
            }
            json_line(out, &Report { record, chain: &chain })?;
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["v", "k", "t", "lambda", "value", "rule"]).map_err(csv_err)?;
            for r in &chain {
                let k = r.key;
                w.write_record([k.v, k.k, k.t, k.lambda].map(|x| x.to_string()).into_iter().chain([
                    r.value.to_string(),
                    r.rule.to_string(),
                ]))
                .map_err(csv_err)?;
            }
            out.write_all(&w.into_inner().map_err(|e| csv_err(e.into_error().into()))?).map_err(io_err)?;
        }
        TableFormat::Text => {
            writeln!(out, "{key} >= {}", record.value).map_err(io_err)?;
            writeln!(out, "rule: {}", record.rule).map_err(io_err)?;
            writeln!(out, "chain:").map_err(io_err)?;
            for r in &chain {
                writeln!(out, "  {} >= {}  [{}]", r.key, r.value, r.rule).map_err(io_err)?;
            }
        }
    }
    Ok(true)
}

fn csv_err(e: csv::Error) -> Error {
    Error::MalformedTable(e.to_string())
}

pub fn cmd_scan(
    t: u64,
    lambda: u64,
    k_range: RangeInclusive<u64>,
    config: &RunConfig,
    out: &mut dyn Write,
) -> Result<bool> {
    if k_range.is_empty() {
        return Err(Error::InvalidParams(format!("kmin {} > kmax {}", k_range.start(), k_range.end())));
    }
    if lambda == 0 {
        return Err(Error::InvalidParams("lambda must be at least 1".into()));
    }
    let store = config.open_store()?;
    let entries = scan_improvements(t, lambda, k_range, &store, &config.ruleset)?;
    store.save_cache()?;
    out.write_all(emit_table(&entries, config.format).as_bytes()).map_err(io_err)?;
    Ok(true)
}

pub fn cmd_family(cmd: &FamilyCommand, config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    match cmd {
        FamilyCommand::Inffam { m } => {
            let records = m.clone().map(inffam_check).collect::<Result<Vec<_>>>()?;
            let ok = records.iter().all(|r| r.holds());
            if config.format == TableFormat::Json {
                json_line(out, &records)?;
            } else {
                for r in &records {
                    writeln!(
                        out,
                        "m={} v={} k={} L={} bound={} promised={} {}",
                        r.m,
                        r.params.v,
                        r.params.k,
                        r.schonheim,
                        r.theorem_bound,
                        r.promised,
                        if r.holds() { "pass" } else { "FAIL" }
                    )
                    .map_err(io_err)?;
                }
            }
            Ok(ok)
        }
        FamilyCommand::Affine { q, m, t, field_table } => {
            let table = field_table.as_ref().map(Field::load).transpose()?;
            let field = Field::resolve(*q, table)?;
            let r = exactth2(*m, *t, &field)?;
            if config.format == TableFormat::Json {
                json_line(out, &r)?;
            } else {
                let mark = |b: bool| if b { "pass" } else { "FAIL" };
                writeln!(out, "q={} m={} t={} k={} z={}", r.q, r.m, r.t, r.k, r.z).map_err(io_err)?;
                writeln!(out, "exact value {} on v in [{}, {}]", r.exact_value, r.v_min, r.v_max).map_err(io_err)?;
                writeln!(out, "lower bound at v={}: {} {}", r.v_min, r.lower_bound, mark(r.lower_bound >= r.exact_value))
                    .map_err(io_err)?;
                writeln!(
                    out,
                    "blow-up covering: {} blocks {}",
                    r.upper_bound,
                    mark(Nat::from(r.upper_bound) <= r.exact_value)
                )
                .map_err(io_err)?;
            }
            Ok(r.certified())
        }
    }
}

pub fn cmd_oracle(cmd: &OracleCommand, config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    match cmd {
        OracleCommand::Exact { v, k, t, lambda, witness } => {
            let p = Params::new(*v, *k, *t, *lambda)?;
            match optimal_covering(&p, config.budget) {
                Some(opt) => {
                    writeln!(out, "{}", opt.value).map_err(io_err)?;
                    if *witness {
                        json_line(out, &opt.witness.to_witness(p.k, p.t, p.lambda))?;
                    }
                }
                None => writeln!(out, "unknown (budget)").map_err(io_err)?,
            }
            Ok(true)
        }
        OracleCommand::Verify { seed, count } => {
            let report = run_identity_suite(*seed, *count);
            if config.format == TableFormat::Json {
                json_line(out, &report)?;
            } else {
                writeln!(out, "seed {} over {} coverings", report.seed, report.coverings).map_err(io_err)?;
                for (name, tally) in report.tallies() {
                    let status = if tally.failed == 0 { "pass" } else { "FAIL" };
                    writeln!(out, "{name}: {status} ({} passed, {} failed)", tally.passed, tally.failed)
                        .map_err(io_err)?;
                    if let Some(first) = &tally.first_failure {
                        writeln!(out, "  first failure: {first}").map_err(io_err)?;
                    }
                }
            }
            Ok(report.all_passed())
        }
    }
}
