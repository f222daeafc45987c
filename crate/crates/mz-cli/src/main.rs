//! mz: exact multizeta arithmetic for F_q[t] from the command line.
//!
//! Subcommands: `zeta` (print a value as a series in u = 1/t), `ratio`
//! (continued-fraction rationality test of a quotient), `verify` (check
//! relation families with predicted bracket factors), `search` (scan
//! same-weight pairs for rational ratios), `table` (markdown view of a
//! saved search document), `identities` (power-sum identity suite).
//!
//! Exit codes: 0 all pass / rational; 2 any failure / irrational;
//! 3 inconclusive only; 64 usage or configuration errors.
//! Progress goes to stderr; stdout carries only data.

mod config;

use std::collections::HashMap;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use mz_core::field::FieldSpec;
use mz_core::laurent::{cf_expand, CfVerdict};
use mz_core::multizeta::{default_precision, weight, zeta, zeta_ratio};
use mz_core::polyring::PolyRing;
use mz_core::powersum::identities::{run_suite, IdentityStatus};
use mz_core::powersum::{Composition, PowerSumCtx};
use mz_core::relations::search::{rational_rows, search, SearchParams};
use mz_core::relations::table;
use mz_core::relations::{
    grid_conjecture, grid_f1, grid_f2, grid_f3, grid_f4, grid_main, grid_thm1, grid_thm2,
    grid_thm3, verify, Family, VerifyOpts, VerifyStatus,
};

use config::{load_config, parse_depths, OutputFormat, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "mz",
    version,
    about = "Exact multizeta values for F_q[t]: series, rationality tests, \
             relation verification, and table search",
    arg_required_else_help = true
)]
struct Cli {
    /// Config file (key=value lines or JSON); flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Base field: a prime power "q", or "q:c0,c1,..." with an explicit
    /// reduction polynomial.
    #[arg(long, global = true, value_name = "Q")]
    q: Option<String>,

    /// Absolute u-adic precision (default: each command's floor policy).
    #[arg(long, global = true, value_name = "N")]
    prec: Option<i64>,

    /// Required precision surplus for rationality verdicts.
    #[arg(long, global = true, value_name = "G")]
    guard: Option<i64>,

    /// Output format: text, csv, json, or md.
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    /// Write machine output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Worker threads for parallel scans.
    #[arg(long, global = true, value_name = "K")]
    workers: Option<usize>,

    /// Cap on the number of memoized power-sum series.
    #[arg(long, global = true, value_name = "K")]
    cache_limit: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a multizeta value as a truncated series in u = 1/t.
    Zeta {
        /// Composition, comma-separated: "2,3".
        #[arg(long, value_name = "K1,K2,...")]
        tuple: String,
    },
    /// Test zeta(left)/zeta(right) for rationality by continued fractions.
    Ratio {
        #[arg(long, value_name = "K1,K2,...")]
        left: String,
        #[arg(long, value_name = "K1,K2,...")]
        right: String,
    },
    /// Verify a relation family: one instance via --params, else a small grid.
    Verify {
        /// One of: thm1, thm2, thm3, main, f1, f21, f2, f3, f4, conj.
        #[arg(long, value_name = "NAME")]
        family: String,
        /// Instance parameters, e.g. "k=2,ks=0+1,ls=0" (lists use '+').
        #[arg(long, value_name = "KEY=VAL,...")]
        params: Option<String>,
        /// Grid bound for thm1's n (default 2).
        #[arg(long, value_name = "N")]
        nmax: Option<u32>,
        /// Grid bound for k (defaults: thm1 2, thm2/thm3 3, main 2).
        #[arg(long, value_name = "K")]
        kmax: Option<u32>,
    },
    /// Scan same-weight composition pairs for rational zeta ratios.
    Search {
        /// Maximum composition weight.
        #[arg(long, value_name = "W")]
        wmax: Option<u64>,
        /// Depth pairs, e.g. "2x2" or "2x2,3x2".
        #[arg(long, value_name = "AxB,...")]
        depths: Option<String>,
    },
    /// Render a saved search document (JSON) as a markdown table.
    Table {
        /// JSON document produced by `mz search --format json`.
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// "paper" (rational rows only) or "full" (every scanned pair).
        #[arg(long, default_value = "paper", value_name = "STYLE")]
        style: String,
    },
    /// Run the power-sum identity suite through degree dmax.
    Identities {
        /// Largest degree d to check (default 4).
        #[arg(long, value_name = "D")]
        dmax: Option<u32>,
        /// Work budget in coefficient operations for window sizing.
        #[arg(long, value_name = "OPS")]
        budget: Option<u128>,
    },
}

/// Errors split by exit code: usage/config problems (64) vs runtime
/// failures (2).
enum CliError {
    Usage(String),
    Run(String),
}

impl From<mz_core::Error> for CliError {
    fn from(e: mz_core::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("mz: {msg}");
            64
        }
        Err(CliError::Run(msg)) => {
            eprintln!("mz: {msg}");
            2
        }
    };
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply(&load_config(path).map_err(usage)?);
    }
    let mut flags = Overrides {
        field: cli.q.clone(),
        precision: cli.prec,
        guard: cli.guard,
        output: cli.output.clone(),
        workers: cli.workers,
        cache_limit: cli.cache_limit,
        ..Overrides::default()
    };
    if let Some(f) = &cli.format {
        flags.format = Some(OutputFormat::parse(f).map_err(usage)?);
    }
    if let Cmd::Search { wmax, depths } = &cli.cmd {
        flags.wmax = *wmax;
        if let Some(d) = depths {
            flags.depths = Some(parse_depths(d).map_err(usage)?);
        }
    }
    cfg.apply(&flags);
    cfg.validate().map_err(usage)?;

    // the parallel scans in the core library use the global pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global();

    let spec = FieldSpec::parse(&cfg.field)
        .map_err(|e| usage(format!("field {:?}: {e}", cfg.field)))?;
    let ring = PolyRing::new(spec);
    let ctx = PowerSumCtx::with_cache_limit(ring.clone(), cfg.cache_limit);

    match cli.cmd {
        Cmd::Zeta { tuple } => cmd_zeta(&cfg, &ctx, &tuple),
        Cmd::Ratio { left, right } => cmd_ratio(&cfg, &ctx, &left, &right),
        Cmd::Verify { family, params, nmax, kmax } => {
            cmd_verify(&cfg, &ctx, &family, params.as_deref(), nmax, kmax)
        }
        Cmd::Search { .. } => cmd_search(&cfg, &ctx),
        Cmd::Table { input, style } => cmd_table(&cfg, &input, &style),
        Cmd::Identities { dmax, budget } => cmd_identities(&cfg, &ctx, dmax, budget),
    }
}

/// Write machine output to the configured destination (stdout by default).
fn emit(cfg: &RunConfig, data: &str) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => std::fs::write(path, data)
            .map_err(|e| CliError::Run(format!("{}: {e}", path.display()))),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn parse_tuple(s: &str) -> Result<Composition, CliError> {
    let mut comp = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let k: u64 = part
            .parse()
            .map_err(|_| usage(format!("bad composition part {part:?} in {s:?}")))?;
        if k == 0 {
            return Err(usage("composition parts must be >= 1".to_string()));
        }
        comp.push(k);
    }
    if comp.is_empty() {
        return Err(usage("empty composition".to_string()));
    }
    Ok(comp)
}

fn comp_str(comp: &[u64]) -> String {
    comp.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
}

// ---------------------------------------------------------------------------
// zeta

fn cmd_zeta(cfg: &RunConfig, ctx: &PowerSumCtx, tuple: &str) -> Result<i32, CliError> {
    let comp = parse_tuple(tuple)?;
    let n = cfg.precision.unwrap_or_else(|| default_precision(weight(&comp)));
    let zv = zeta(ctx, &comp, n)?;
    let out = match cfg.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => format!("{}\n", zv.series.render()),
        OutputFormat::Json => {
            let doc = json!({
                "schema": "mz/1",
                "kind": "zeta",
                "q": ctx.ring().q(),
                "tuple": comp,
                "precision": n,
                "terms_summed": zv.terms_summed,
                "series": zv.series.to_json(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
        other => return Err(usage(format!("zeta supports text or json, not {other}"))),
    };
    emit(cfg, &out)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// ratio

fn cmd_ratio(
    cfg: &RunConfig,
    ctx: &PowerSumCtx,
    left: &str,
    right: &str,
) -> Result<i32, CliError> {
    let ring = ctx.ring();
    let l = parse_tuple(left)?;
    let r = parse_tuple(right)?;
    let (wl, wr) = (weight(&l), weight(&r));
    if wl != wr {
        return Err(usage(format!("weights differ: left {wl}, right {wr}")));
    }
    let n = cfg.precision.unwrap_or_else(|| default_precision(wl));
    let ratio = zeta_ratio(ctx, &l, &r, n)?;
    let cf = cf_expand(ring, &ratio, cfg.guard)?;

    let verdict = match cf.verdict {
        CfVerdict::Rational => "rational",
        CfVerdict::Irrational => "irrational",
        CfVerdict::Inconclusive => "inconclusive",
    };
    let factor = cf.reconstructed.as_ref();
    let out = match cfg.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => {
            let mut s = format!(
                "left: ({})\nright: ({})\nprecision: {n}\nverdict: {verdict}\n",
                comp_str(&l),
                comp_str(&r)
            );
            if let Some(f) = factor {
                s.push_str(&format!(
                    "factor_num: {}\nfactor_den: {}\n",
                    ring.fmt_poly(f.num()),
                    ring.fmt_poly(f.den())
                ));
            }
            if let Some(g) = cf.guard_used {
                s.push_str(&format!("guard_used: {g}\n"));
            }
            s.push_str(&format!("quotients: {}\n", cf.quotients.len()));
            s
        }
        OutputFormat::Json => {
            let doc = json!({
                "schema": "mz/1",
                "kind": "ratio",
                "q": ring.q(),
                "left": l,
                "right": r,
                "precision": n,
                "verdict": verdict,
                "factor": factor.map(|f| json!({
                    "num": ring.fmt_poly(f.num()),
                    "den": ring.fmt_poly(f.den()),
                })),
                "quotients": cf.quotients.iter().map(|p| ring.fmt_poly(p)).collect::<Vec<_>>(),
                "guard_used": cf.guard_used,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
        other => return Err(usage(format!("ratio supports text or json, not {other}"))),
    };
    emit(cfg, &out)?;
    Ok(match cf.verdict {
        CfVerdict::Rational => 0,
        CfVerdict::Irrational => 2,
        CfVerdict::Inconclusive => 3,
    })
}

// ---------------------------------------------------------------------------
// verify

/// Parameter string for a family instance, in the syntax --params accepts.
fn family_params(f: &Family) -> String {
    fn list(name: &str, xs: &[u32]) -> String {
        let body = xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("+");
        format!("{name}={body}")
    }
    match f {
        Family::Thm1 { n, k } => format!("n={n},k={k}"),
        Family::Thm2 { k, ks, ls } => {
            format!("k={k},{},{}", list("ks", ks), list("ls", ls))
        }
        Family::Thm3 { k, ks, ls } => {
            format!("k={k},{},{}", list("ks", ks), list("ls", ls))
        }
        Family::Main { k, ks, ls, sel } => format!(
            "k={k},{},{},{}",
            list("ks", ks),
            list("ls", ls),
            list("sel", sel)
        ),
        Family::F1 { ks } => list("ks", ks),
        Family::F21 => String::new(),
        Family::F2 { ks, ls } => format!("{},{}", list("ks", ks), list("ls", ls)),
        Family::F3 { i, j } => format!("i={i},j={j}"),
        Family::F4 { i } => format!("i={i}"),
        Family::Conjecture { a, i, j } => format!("a={a},i={i},j={j}"),
    }
}

fn family_from_params(name: &str, params: &str) -> Result<Family, CliError> {
    let mut scalars: HashMap<String, u64> = HashMap::new();
    let mut lists: HashMap<String, Vec<u32>> = HashMap::new();
    for item in params.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("expected key=value in --params, got {item:?}")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "ks" | "ls" | "sel" => {
                let mut xs = Vec::new();
                if !value.is_empty() {
                    for v in value.split('+') {
                        xs.push(
                            v.trim()
                                .parse::<u32>()
                                .map_err(|_| usage(format!("bad list entry {v:?} for {key}")))?,
                        );
                    }
                }
                lists.insert(key.to_string(), xs);
            }
            "n" | "k" | "i" | "j" | "a" => {
                let v = value
                    .parse::<u64>()
                    .map_err(|_| usage(format!("bad value {value:?} for {key}")))?;
                scalars.insert(key.to_string(), v);
            }
            other => return Err(usage(format!("unknown parameter {other:?}"))),
        }
    }

    let mut scalar = |k: &str| -> Result<u64, CliError> {
        scalars.remove(k).ok_or_else(|| usage(format!("missing parameter {k}=")))
    };
    let mut scalar32 = |k: &str| -> Result<u32, CliError> {
        let v = scalars.remove(k).ok_or_else(|| usage(format!("missing parameter {k}=")))?;
        u32::try_from(v).map_err(|_| usage(format!("parameter {k} too large")))
    };
    let mut list = |k: &str| -> Result<Vec<u32>, CliError> {
        lists.remove(k).ok_or_else(|| usage(format!("missing parameter {k}=")))
    };

    let fam = match name {
        "thm1" => Family::Thm1 { n: scalar32("n")?, k: scalar32("k")? },
        "thm2" => Family::Thm2 { k: scalar32("k")?, ks: list("ks")?, ls: list("ls")? },
        "thm3" => Family::Thm3 { k: scalar32("k")?, ks: list("ks")?, ls: list("ls")? },
        "main" => Family::Main {
            k: scalar32("k")?,
            ks: list("ks")?,
            ls: list("ls")?,
            sel: list("sel")?,
        },
        "f1" => Family::F1 { ks: lists.remove("ks").unwrap_or_default() },
        "f21" => Family::F21,
        "f2" => Family::F2 { ks: list("ks")?, ls: list("ls")? },
        "f3" => Family::F3 { i: scalar32("i")?, j: scalar32("j")? },
        "f4" => Family::F4 { i: scalar32("i")? },
        "conj" | "conjecture" => {
            Family::Conjecture { a: scalar("a")?, i: scalar32("i")?, j: scalar32("j")? }
        }
        other => return Err(usage(format!("unknown family {other:?}"))),
    };
    if let Some(k) = scalars.keys().next() {
        return Err(usage(format!("parameter {k} does not apply to {name}")));
    }
    if let Some(k) = lists.keys().next() {
        return Err(usage(format!("parameter {k} does not apply to {name}")));
    }
    Ok(fam)
}

fn family_grid(
    name: &str,
    q: u64,
    nmax: Option<u32>,
    kmax: Option<u32>,
) -> Result<Vec<Family>, CliError> {
    let fams = match name {
        "thm1" => grid_thm1(nmax.unwrap_or(2), kmax.unwrap_or(2)),
        "thm2" => grid_thm2(q, kmax.unwrap_or(3)),
        "thm3" => grid_thm3(q, kmax.unwrap_or(3)),
        "main" => grid_main(q, kmax.unwrap_or(2)),
        "f1" => grid_f1(q),
        "f21" => vec![Family::F21],
        "f2" => grid_f2(q),
        "f3" => grid_f3(q),
        "f4" => grid_f4(q),
        "conj" | "conjecture" => grid_conjecture(q),
        other => return Err(usage(format!("unknown family {other:?}"))),
    };
    if fams.is_empty() {
        return Err(usage(format!("family {name} has no instances at q={q}")));
    }
    Ok(fams)
}

fn cmd_verify(
    cfg: &RunConfig,
    ctx: &PowerSumCtx,
    family: &str,
    params: Option<&str>,
    nmax: Option<u32>,
    kmax: Option<u32>,
) -> Result<i32, CliError> {
    let ring = ctx.ring();
    let fams = match params {
        Some(p) => vec![family_from_params(family, p)?],
        None => family_grid(family, ring.q(), nmax, kmax)?,
    };

    let opts = VerifyOpts { guard: cfg.guard, ..VerifyOpts::default() };
    let mut lines = String::new();
    let mut rows = Vec::new();
    let mut any_fail = false;
    let mut any_inconclusive = false;

    for fam in &fams {
        let inst = fam.instantiate(ring).map_err(|e| usage(e.to_string()))?;
        let w = inst.left.0 + inst.left.1;
        let n = cfg.precision.unwrap_or_else(|| 400.max(default_precision(w)));
        eprintln!(
            "verify: {} {} at precision {n}",
            fam.name(),
            family_params(fam)
        );
        let rep = verify(ctx, &inst, n, &opts)?;
        match rep.status {
            VerifyStatus::Fail => any_fail = true,
            VerifyStatus::Inconclusive => any_inconclusive = true,
            VerifyStatus::Pass => {}
        }
        let status = match rep.status {
            VerifyStatus::Pass => "pass",
            VerifyStatus::Fail => "fail",
            VerifyStatus::Inconclusive => "inconclusive",
        };
        let cf = match rep.cf_match {
            Some(true) => "match",
            Some(false) => "mismatch",
            None => "skipped",
        };
        let kind = if fam.proved() { "proved" } else { "conjectural" };
        lines.push_str(&format!(
            "family={} params=[{}] left=({}) right=({}) w={} status={} attained={} \
             cf={} term_level={} kind={}\n",
            fam.name(),
            family_params(fam),
            comp_str(&[inst.left.0, inst.left.1]),
            comp_str(&[inst.right.0, inst.right.1]),
            w,
            status,
            rep.attained_precision,
            cf,
            rep.term_level_through.map_or("none".to_string(), |d| d.to_string()),
            kind,
        ));
        rows.push(json!({
            "family": fam.name(),
            "params": family_params(fam),
            "left": [inst.left.0, inst.left.1],
            "right": [inst.right.0, inst.right.1],
            "weight": w,
            "status": status,
            "attained": rep.attained_precision,
            "residual_valuation": rep.residual_valuation,
            "cf_match": rep.cf_match,
            "term_level_through": rep.term_level_through,
            "proved": fam.proved(),
            "precision": n,
        }));
    }

    if fams.iter().any(|f| !f.proved()) {
        // numerical support for a conjectural family is not a proof
        lines.push_str("# conjectural rows above are numerical support only, not proofs\n");
    }

    let out = match cfg.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => lines,
        OutputFormat::Json => {
            let doc = json!({
                "schema": "mz/1",
                "kind": "verify",
                "q": ring.q(),
                "records": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
        other => return Err(usage(format!("verify supports text or json, not {other}"))),
    };
    emit(cfg, &out)?;
    Ok(if any_fail {
        2
    } else if any_inconclusive {
        3
    } else {
        0
    })
}

// ---------------------------------------------------------------------------
// search

fn cmd_search(cfg: &RunConfig, ctx: &PowerSumCtx) -> Result<i32, CliError> {
    let ring = ctx.ring();
    let params = SearchParams {
        wmax: cfg.wmax,
        precision: cfg.precision.unwrap_or(256),
        depth_pairs: cfg.depths.clone(),
        guard: cfg.guard,
    };
    eprintln!(
        "search: q={} wmax={} prec={} depths={:?} workers={}",
        ring.q(),
        params.wmax,
        params.precision,
        params.depth_pairs,
        cfg.workers
    );
    let records = search(ctx, &params)?;
    eprintln!(
        "search: {} pairs scanned, {} rational",
        records.len(),
        rational_rows(&records).len()
    );

    let out = match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => {
            let doc = table::to_json(ring, &records);
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
        OutputFormat::Csv => table::to_csv(ring, &records),
        OutputFormat::Markdown => {
            let doc = table::to_json(ring, &records);
            table::markdown_from_json(&doc, true)?
        }
        OutputFormat::Text => {
            return Err(usage("search emits csv, json, or md".to_string()))
        }
    };
    emit(cfg, &out)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// table

fn cmd_table(cfg: &RunConfig, input: &std::path::Path, style: &str) -> Result<i32, CliError> {
    let rational_only = match style {
        "paper" => true,
        "full" => false,
        other => return Err(usage(format!("unknown style {other:?} (paper or full)"))),
    };
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Run(format!("{}: {e}", input.display())))?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Run(format!("{}: line {}: {e}", input.display(), e.line())))?;
    let md = table::markdown_from_json(&doc, rational_only)?;
    emit(cfg, &md)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// identities

fn cmd_identities(
    cfg: &RunConfig,
    ctx: &PowerSumCtx,
    dmax: Option<u32>,
    budget: Option<u128>,
) -> Result<i32, CliError> {
    let ring = ctx.ring();
    let dmax = dmax.unwrap_or(4);
    let budget = budget.unwrap_or(2_000_000_000);
    eprintln!("identities: q={} dmax={dmax}", ring.q());
    let reports = run_suite(ring, dmax, budget);

    let mut pass = 0u32;
    let mut fail = 0u32;
    let mut na = 0u32;
    let mut lines = String::new();
    let mut rows = Vec::new();
    for r in &reports {
        let status = match r.status {
            IdentityStatus::Pass => {
                pass += 1;
                "pass"
            }
            IdentityStatus::Fail => {
                fail += 1;
                "fail"
            }
            IdentityStatus::NotApplicable => {
                na += 1;
                "not-applicable"
            }
        };
        lines.push_str(&format!(
            "id={} d={} params=[{}] status={} abs_prec={}{}\n",
            r.id,
            r.d,
            r.params,
            status,
            r.abs_precision,
            r.first_mismatch
                .map_or(String::new(), |e| format!(" first_mismatch=u^{e}")),
        ));
        rows.push(json!({
            "id": r.id,
            "d": r.d,
            "params": r.params,
            "status": status,
            "abs_precision": r.abs_precision,
            "window_past_valuation": r.window_past_valuation,
            "first_mismatch": r.first_mismatch,
        }));
    }
    eprintln!("identities: {pass} pass, {fail} fail, {na} not applicable");

    let out = match cfg.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => lines,
        OutputFormat::Json => {
            let doc = json!({
                "schema": "mz/1",
                "kind": "identities",
                "q": ring.q(),
                "dmax": dmax,
                "records": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
        other => return Err(usage(format!("identities supports text or json, not {other}"))),
    };
    emit(cfg, &out)?;
    Ok(if fail > 0 { 2 } else { 0 })
}
