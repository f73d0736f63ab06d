//! Argument parsing, configuration files and command dispatch.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pwpn_core::catalog::{
    gold_twist_search, qm_check, thmex_checks, thmex_extension, verify_theorem_families, CheckVerdict, EnumOptions,
    RowStatus, TheoremCheck,
};
use pwpn_core::design::{development, development_experimental, PairCounter, PairStats};
use pwpn_core::diffspec::{Classification, Mode, SpectrumReport};
use pwpn_core::equiv::{equilem_solutions, EquivOptions, EquivSearch, EquivVerdict};
use pwpn_core::quasigroup::{graph_of, QGroup};
use pwpn_core::{Elt, FieldCtx, Ortho, VFunc};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{self, Report};
use crate::search::{Checkpoint, FamilyKind, Run, Space, Target};
use crate::{catalog_run, manifest, par, spec, suites, CliError, EXIT_FAILED, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser, Serialize)]
#[command(name = "pwpn", version, about = "Differential spectra, orthomorphisms and their combinatorial objects")]
struct Cli {
    /// TOML file whose keys mirror the long flags; explicit flags win
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true, env = "PWPN_WORKERS")]
    #[serde(skip)]
    workers: Option<usize>,
    /// JSON report path (stdout when absent)
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// CSV summary path
    #[arg(long, global = true)]
    #[serde(skip)]
    csv: Option<PathBuf>,
    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Cmd {
    /// Classical, c- or ℘-differential spectrum of one function
    Spectrum(SpectrumArgs),
    /// Verification suites
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Exhaustive search for perfect nonlinear members of a family
    Search(SearchArgs),
}

#[derive(Debug, Args, Serialize)]
struct FieldArgs {
    /// Characteristic
    #[arg(long)]
    p: u32,
    /// Extension degree
    #[arg(long)]
    n: u32,
    /// Monic modulus coefficients, constant term first (default: least irreducible)
    #[arg(long)]
    modulus: Option<String>,
}

impl FieldArgs {
    fn ctx(&self) -> Result<Arc<FieldCtx>, CliError> {
        spec::field(self.p, self.n, self.modulus.as_deref())
    }
}

#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false)]
struct FuncArgs {
    /// x^d (negative d uses the inverse exponent)
    #[arg(long, allow_hyphen_values = true)]
    monomial: Option<i128>,
    /// Polynomial body in x, e.g. "x^5 + g*x^3"
    #[arg(long)]
    poly: Option<String>,
    /// JSON value table
    #[arg(long)]
    table: Option<PathBuf>,
}

impl FuncArgs {
    fn build(&self, ctx: &Arc<FieldCtx>) -> Result<VFunc, CliError> {
        if let Some(d) = self.monomial {
            Ok(VFunc::from_monomial(ctx, d)?)
        } else if let Some(b) = &self.poly {
            spec::poly(ctx, b)
        } else if let Some(t) = &self.table {
            Ok(VFunc::from_table(ctx.clone(), ctx.clone(), spec::read_table(t)?)?)
        } else {
            Err(CliError::Usage("a function is required".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum ModeKind {
    Classical,
    C,
    Wp,
}

#[derive(Debug, Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    func: FuncArgs,
    /// Derivative kind (inferred from --c/--wp/--all-c when absent)
    #[arg(long, value_enum)]
    mode: Option<ModeKind>,
    /// Multiplier c for the c-derivative
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Orthomorphism specifier
    #[arg(long)]
    wp: Option<String>,
    /// c-differential uniformity for every c != 1
    #[arg(long)]
    all_c: bool,
    /// Exit 2 unless the classification matches: pn|pcn|pwpn|apn|apcn|uniform:K
    #[arg(long)]
    assert: Option<String>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VerifyCmd {
    /// Theorem-level orthomorphism families
    Theorem(TheoremArgs),
    /// The table catalog
    Table(TableArgs),
    /// The graph of F as a quasigroup difference set
    Qds(WpFuncArgs),
    /// The paired-block incidence structure of the graph
    Design(DesignArgs),
    /// Solutions of the distributive identity over all permutations
    Equilem(WpFieldArgs),
    /// Round-key cancellation in double c-derivatives
    Keycancel(KeycancelArgs),
    /// Balanced versus PcN for random quadratic maps to a subfield
    Quadbalance(QuadArgs),
    /// Deterministic property suites
    Properties,
    /// ℘-affine equivalence of two functions
    Equiv(EquivArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum TheoremKind {
    ThmEx,
    Qm,
    GoldTwist,
    Extension,
    All,
}

#[derive(Debug, Args, Serialize)]
struct TheoremArgs {
    #[arg(value_enum)]
    which: TheoremKind,
    /// Half degree m (thm-ex, qm, extension)
    #[arg(long)]
    m: Option<u32>,
    /// Base q of the qm family
    #[arg(long)]
    q: Option<u32>,
    /// Exponent k (qm: (...)^{2k}; gold-twist: x^{2^k+1})
    #[arg(long)]
    k: Option<u32>,
    /// Degree n of the gold-twist field
    #[arg(long)]
    n: Option<u32>,
    /// Twist exponent j of ℘ = c·x^{2^j}
    #[arg(long)]
    j: Option<u32>,
    /// Odd extension degree for the extension check
    #[arg(long)]
    t: Option<u32>,
    /// Largest field order considered
    #[arg(long, default_value_t = 1 << 12)]
    max_field: u32,
}

#[derive(Debug, Args, Serialize)]
struct TableArgs {
    /// Restrict to these row ids
    #[arg(long)]
    row: Vec<String>,
    /// Largest field order
    #[arg(long, default_value_t = 1 << 14)]
    max_field: u32,
    /// Smallest field order
    #[arg(long)]
    min_field: Option<u32>,
    /// Every instance, no thinning or work budget
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Debug, Args, Serialize)]
struct WpFuncArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    func: FuncArgs,
    /// Orthomorphism specifier
    #[arg(long)]
    wp: String,
}

#[derive(Debug, Args, Serialize)]
struct DesignArgs {
    #[command(flatten)]
    base: WpFuncArgs,
    /// Allow a nonlinear orthomorphism
    #[arg(long)]
    experimental: bool,
    /// Write the incidence matrix as a packed bitmap
    #[arg(long)]
    bitmap: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct WpFieldArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Orthomorphism specifier
    #[arg(long)]
    wp: String,
}

#[derive(Debug, Args, Serialize)]
struct KeycancelArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    func: FuncArgs,
    #[arg(long, default_value_t = 100)]
    trials: u32,
}

#[derive(Debug, Args, Serialize)]
struct QuadArgs {
    #[arg(long, default_value_t = 3)]
    p: u32,
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// Codomain degree
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// c as an element of F_p
    #[arg(long, default_value_t = 2)]
    c: u32,
    #[arg(long, default_value_t = 50)]
    trials: u32,
}

#[derive(Debug, Args, Serialize)]
struct EquivArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// First function: mono:D | poly:EXPR | table:FILE
    #[arg(long)]
    f1: String,
    /// Second function
    #[arg(long)]
    f2: String,
    /// Orthomorphism specifier
    #[arg(long)]
    wp: String,
    /// Skip the spectrum prefilter
    #[arg(long)]
    no_prefilter: bool,
    /// Restrict α2 to additive shifts of ℘
    #[arg(long)]
    additive_alpha2: bool,
}

#[derive(Debug, Args, Serialize)]
struct SearchArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value = "monomials")]
    family: FamilyKind,
    /// Orthomorphism specifier (P℘N hits)
    #[arg(long)]
    wp: Option<String>,
    /// c for PcN hits
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Candidates per chunk
    #[arg(long, default_value_t = 256)]
    chunk: u64,
    /// Checkpoint file, rewritten after every chunk
    #[arg(long)]
    #[serde(skip)]
    checkpoint: Option<PathBuf>,
    /// Continue from the checkpoint
    #[arg(long)]
    #[serde(skip)]
    resume: bool,
    /// Stop after this many chunks
    #[arg(long)]
    #[serde(skip)]
    stop_after: Option<u64>,
    /// Stream hits as JSON lines
    #[arg(long)]
    #[serde(skip)]
    hits: Option<PathBuf>,
}

/// Appends flags from the config file that are not already on the command
/// line. Keys are long flag names; `true` adds a bare flag, arrays repeat it.
fn merge_config(mut argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path)?;
    let table: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    let present = |flag: &str| argv.iter().any(|a| a == flag || a.starts_with(&format!("{flag}=")));
    let mut extra = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        if present(&flag) {
            continue;
        }
        let values = match value {
            toml::Value::Array(a) => a,
            v => vec![v],
        };
        for v in values {
            match v {
                toml::Value::Boolean(true) => extra.push(flag.clone()),
                toml::Value::Boolean(false) => {}
                toml::Value::String(s) => extra.push(format!("{flag}={s}")),
                toml::Value::Integer(k) => extra.push(format!("{flag}={k}")),
                other => return Err(CliError::Usage(format!("{path}: unsupported value for {key}: {other}"))),
            }
        }
    }
    argv.extend(extra);
    Ok(argv)
}

/// Runs the tool on a full argument vector (program name first) and returns
/// the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let argv = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("pwpn: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(w) = cli.workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
    let start = Instant::now();
    match dispatch(&cli) {
        Ok((mut rep, csv)) => {
            let elapsed = start.elapsed().as_millis() as u64;
            match &mut rep.timing {
                Value::Object(m) => {
                    m.insert("elapsed_ms".into(), json!(elapsed));
                }
                t => *t = json!({"elapsed_ms": elapsed}),
            }
            if let Err(e) = emit(&cli, &rep, csv.as_deref()) {
                eprintln!("pwpn: {e}");
                return e.exit_code();
            }
            eprintln!("pwpn {}: {}", rep.command, if rep.pass { "pass" } else { "FAIL" });
            if rep.pass {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("pwpn: {e}");
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, rep: &Report, csv: Option<&str>) -> Result<(), CliError> {
    report::write_out(cli.out.as_deref(), &rep.render())?;
    if let Some(path) = &cli.csv {
        let text = csv.ok_or_else(|| CliError::Usage(format!("{} has no CSV summary", rep.command)))?;
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn config_of(cli: &Cli) -> Result<Value, CliError> {
    Ok(serde_json::to_value(cli)?)
}

type Outcome = (Report, Option<String>);

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let config = config_of(cli)?;
    match &cli.cmd {
        Cmd::Spectrum(a) => cmd_spectrum(a, Report::new("spectrum", config)),
        Cmd::Search(a) => cmd_search(a, Report::new("search", config)),
        Cmd::Verify(v) => {
            let name = match v {
                VerifyCmd::Theorem(_) => "verify theorem",
                VerifyCmd::Table(_) => "verify table",
                VerifyCmd::Qds(_) => "verify qds",
                VerifyCmd::Design(_) => "verify design",
                VerifyCmd::Equilem(_) => "verify equilem",
                VerifyCmd::Keycancel(_) => "verify keycancel",
                VerifyCmd::Quadbalance(_) => "verify quadbalance",
                VerifyCmd::Properties => "verify properties",
                VerifyCmd::Equiv(_) => "verify equiv",
            };
            let rep = Report::new(name, config);
            match v {
                VerifyCmd::Theorem(a) => cmd_theorem(a, rep),
                VerifyCmd::Table(a) => cmd_table(a, rep),
                VerifyCmd::Qds(a) => cmd_qds(a, rep),
                VerifyCmd::Design(a) => cmd_design(a, rep),
                VerifyCmd::Equilem(a) => cmd_equilem(a, rep),
                VerifyCmd::Keycancel(a) => {
                    let ctx = a.field.ctx()?;
                    let f = a.func.build(&ctx)?;
                    let (result, pass) = suites::keycancel(&f, a.trials, cli.seed);
                    Ok((finish(rep, Some(&ctx), result, pass), None))
                }
                VerifyCmd::Quadbalance(a) => {
                    let (result, pass) = suites::quadbalance(a.p, a.n, a.m, a.c, a.trials, cli.seed)?;
                    let ctx = FieldCtx::new(a.p, a.n, None)?;
                    Ok((finish(rep, Some(&ctx), result, pass), None))
                }
                VerifyCmd::Properties => {
                    let (result, pass) = suites::properties(cli.seed)?;
                    Ok((finish(rep, None, result, pass), None))
                }
                VerifyCmd::Equiv(a) => cmd_equiv(a, rep),
            }
        }
    }
}

fn describe(f: &VFunc) -> String {
    use pwpn_core::Provenance;
    let term = |c: &Elt, e: u128| if *c == Elt::ONE { format!("x^{e}") } else { format!("#{}*x^{e}", c.0) };
    match f.provenance() {
        Provenance::Monomial { d } => format!("x^{d}"),
        Provenance::Poly { terms } => terms.iter().map(|(c, e)| term(c, *e)).collect::<Vec<_>>().join(" + "),
        Provenance::Linearized { coeffs } => coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| term(c, f.dom().stride(i as u32) as u128))
            .collect::<Vec<_>>()
            .join(" + "),
        Provenance::Table => "table".into(),
    }
}

fn finish(mut rep: Report, ctx: Option<&FieldCtx>, result: Value, pass: bool) -> Report {
    rep.field = ctx.map(spec::field_json);
    rep.result = result;
    rep.pass = pass;
    rep
}

type Assertion = Box<dyn Fn(&SpectrumReport) -> bool>;

fn parse_assert(s: &str) -> Result<Assertion, CliError> {
    match s {
        "pn" | "pcn" | "pwpn" => Ok(Box::new(|r: &SpectrumReport| r.classification == Classification::Perfect)),
        "apn" | "apcn" => Ok(Box::new(|r: &SpectrumReport| r.classification == Classification::AlmostPerfect)),
        _ => match s.strip_prefix("uniform:").map(str::parse::<u32>) {
            Some(Ok(k)) => Ok(Box::new(move |r: &SpectrumReport| r.max_count == k)),
            _ => Err(CliError::Usage(format!("unknown assertion `{s}`"))),
        },
    }
}

fn spectrum_json(r: &SpectrumReport) -> Value {
    json!({
        "classification": r.label(),
        "max_count": r.max_count,
        "argmax": {"a": r.argmax.0 .0, "b": r.argmax.1 .0},
        "balanced_count": r.balanced_count,
        "includes_zero_a": r.includes_zero_a,
        "histogram": r.histogram.iter().map(|(k, v)| json!({"count": k, "pairs": v})).collect::<Vec<_>>(),
        "per_a_max": r.per_a_max.iter().map(|(a, m)| json!([a.0, m])).collect::<Vec<_>>(),
    })
}

fn cmd_spectrum(a: &SpectrumArgs, rep: Report) -> Result<Outcome, CliError> {
    let ctx = a.field.ctx()?;
    let check = a.assert.as_deref().map(parse_assert).transpose()?;
    let mode = match a.mode {
        Some(m) => m,
        None if a.c.is_some() && a.wp.is_some() => return Err(CliError::Usage("give either --c or --wp".into())),
        None if a.c.is_some() || a.all_c => ModeKind::C,
        None if a.wp.is_some() => ModeKind::Wp,
        None => ModeKind::Classical,
    };
    let f = a.func.build(&ctx)?;
    match mode {
        ModeKind::C if a.all_c => {
            let cs: Vec<Elt> = ctx.elements().filter(|&c| c != Elt::ONE).collect();
            let reports: Vec<SpectrumReport> =
                cs.par_iter().map(|&c| Ok(pwpn_core::diffspec::spectrum(&f, Mode::C(c))?)).collect::<Result<_, CliError>>()?;
            let pass = check.as_ref().is_none_or(|chk| reports.iter().all(chk));
            let mut csv = String::from("c,uniformity,classification\n");
            let rows: Vec<Value> = cs
                .iter()
                .zip(&reports)
                .map(|(c, r)| {
                    csv.push_str(&format!("{},{},{}\n", c.0, r.max_count, r.label()));
                    json!({"c": c.0, "uniformity": r.max_count, "classification": r.label()})
                })
                .collect();
            let result = json!({"mode": "c", "function": describe(&f), "per_c": rows});
            Ok((finish(rep, Some(&ctx), result, pass), Some(csv)))
        }
        ModeKind::C => {
            let c = a.c.as_deref().ok_or_else(|| CliError::Usage("c-mode needs --c".into()))?;
            let c = spec::parse_elt(&ctx, c)?;
            spectrum_outcome(rep, &ctx, &f, Mode::C(c), json!({"mode": "c", "c": c.0}), check)
        }
        ModeKind::Wp => {
            let w = a.wp.as_deref().ok_or_else(|| CliError::Usage("wp-mode needs --wp".into()))?;
            let wp = spec::parse_wp(&ctx, w)?;
            spectrum_outcome(rep, &ctx, &f, Mode::Wp(&wp), json!({"mode": "wp", "wp": wp.family().tag()}), check)
        }
        ModeKind::Classical => spectrum_outcome(rep, &ctx, &f, Mode::Classical, json!({"mode": "classical"}), check),
    }
}

fn spectrum_outcome(
    rep: Report,
    ctx: &FieldCtx,
    f: &VFunc,
    mode: Mode<'_>,
    head: Value,
    check: Option<Assertion>,
) -> Result<Outcome, CliError> {
    let r = par::spectrum(f, mode)?;
    let pass = check.as_ref().is_none_or(|chk| chk(&r));
    let mut csv = String::from("count,pairs\n");
    for (k, v) in &r.histogram {
        csv.push_str(&format!("{k},{v}\n"));
    }
    let mut result = spectrum_json(&r);
    result["mode"] = head;
    result["function"] = json!(describe(f));
    Ok((finish(rep, Some(ctx), result, pass), Some(csv)))
}

fn check_json(c: &TheoremCheck) -> Value {
    let (verdict, detail, pwpn) = match &c.verdict {
        CheckVerdict::Pass => ("pass", None, None),
        CheckVerdict::Fail(d) => ("fail", Some(d.clone()), None),
        CheckVerdict::Empirical { pwpn, detail } => ("empirical", Some(detail.clone()), Some(*pwpn)),
        CheckVerdict::Skipped(d) => ("skipped", Some(d.clone()), None),
    };
    json!({
        "family": c.family,
        "instance": c.instance,
        "verdict": verdict,
        "detail": detail,
        "pwpn": pwpn,
        "evidence": c.evidence,
    })
}

/// Splits q into p^s.
fn prime_power(q: u32) -> Result<(u32, u32), CliError> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).ok_or_else(|| CliError::Usage(format!("{q} is not a prime power")))?;
    let (mut t, mut s) = (q, 0);
    while t % p == 0 {
        t /= p;
        s += 1;
    }
    if t != 1 {
        return Err(CliError::Usage(format!("{q} is not a prime power")));
    }
    Ok((p, s))
}

fn cmd_theorem(a: &TheoremArgs, rep: Report) -> Result<Outcome, CliError> {
    let checks: Vec<TheoremCheck> = match a.which {
        TheoremKind::ThmEx => {
            let m = a.m.unwrap_or(3);
            if m.is_multiple_of(2) {
                return Err(CliError::Usage("thm-ex needs odd m".into()));
            }
            thmex_checks(m)?
        }
        TheoremKind::Qm => match (a.q, a.m, a.k) {
            (Some(q), Some(m), k) => {
                let (p, s) = prime_power(q)?;
                let ks: Vec<u32> = k.map_or_else(|| vec![1, 2], |k| vec![k]);
                ks.into_par_iter().map(|k| Ok(qm_check(p, s, m, k)?)).collect::<Result<_, CliError>>()?
            }
            (None, None, None) => {
                let mut all = verify_theorem_families(a.max_field)?;
                all.retain(|c| c.family == "qm");
                all
            }
            _ => return Err(CliError::Usage("qm needs --q and --m (and optionally --k)".into())),
        },
        TheoremKind::GoldTwist => gold_twist_search(a.n.unwrap_or(6), a.k.unwrap_or(2), a.j.unwrap_or(2))?,
        TheoremKind::Extension => {
            let (m, t) = (a.m.unwrap_or(3), a.t.unwrap_or(3));
            let size = 1u64.checked_shl(2 * m * t).unwrap_or(u64::MAX);
            let verdict = if size <= a.max_field as u64 {
                thmex_extension(m, t)?
            } else {
                CheckVerdict::Skipped(format!("field size {size} above {}", a.max_field))
            };
            vec![TheoremCheck {
                family: "thm-ex-extension".into(),
                instance: format!("m={m} inside F_2^{}", 2 * m * t),
                verdict,
                evidence: Vec::new(),
            }]
        }
        TheoremKind::All => verify_theorem_families(a.max_field)?,
    };
    let passed = checks.iter().filter(|c| c.verdict == CheckVerdict::Pass).count();
    let failed = checks.iter().filter(|c| matches!(c.verdict, CheckVerdict::Fail(_))).count();
    let mut csv = String::from("family,instance,verdict\n");
    for c in &checks {
        csv.push_str(&format!("{},\"{}\",{}\n", c.family, c.instance, check_json(c)["verdict"].as_str().unwrap_or("")));
    }
    let result = json!({
        "checks": checks.iter().map(check_json).collect::<Vec<_>>(),
        "total": checks.len(),
        "passed": passed,
        "failed": failed,
    });
    Ok((finish(rep, None, result, failed == 0 && !checks.is_empty()), Some(csv)))
}

fn cmd_table(a: &TableArgs, mut rep: Report) -> Result<Outcome, CliError> {
    let mut entries = manifest::load()?;
    if !a.row.is_empty() {
        for id in &a.row {
            if !entries.iter().any(|e| &e.id == id) {
                return Err(CliError::Usage(format!("unknown row `{id}`")));
            }
        }
        entries.retain(|e| a.row.contains(&e.id));
    }
    let mut opts = if a.exhaustive { EnumOptions::exhaustive(a.max_field) } else { EnumOptions::default() };
    opts.max_field_size = a.max_field;
    if let Some(m) = a.min_field {
        opts.min_field_size = m;
    }
    let rows = catalog_run::run(&entries, &opts)?;
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for r in &rows {
        let key = match &r.status {
            RowStatus::Verified => "verified",
            RowStatus::ResolvedAlternate(_) => "resolved-alternate",
            RowStatus::SkippedSize => "skipped-size",
            RowStatus::SkippedAmbiguous(_) => "skipped-ambiguous",
            RowStatus::OutOfScope(_) => "out-of-scope",
            RowStatus::Discrepancy { .. } => "discrepancy",
            RowStatus::Refuted => "refuted",
        };
        *counts.entry(key.into()).or_default() += 1;
    }
    let discrepancies: Vec<&str> =
        rows.iter().filter(|r| matches!(r.status, RowStatus::Discrepancy { .. })).map(|r| r.id.as_str()).collect();
    let unaccounted: Vec<&str> = rows.iter().filter(|r| !r.status.accounted()).map(|r| r.id.as_str()).collect();
    let result = json!({
        "rows": catalog_run::rows_json(&entries, &rows),
        "status_counts": counts,
        "unaccounted": unaccounted,
        "discrepancies": discrepancies,
        "max_field": a.max_field,
    });
    rep.timing = json!({"instances": catalog_run::timing_json(&rows)});
    let pass = unaccounted.is_empty();
    Ok((finish(rep, None, result, pass), Some(catalog_run::summary_csv(&rows))))
}

fn wp_func(a: &WpFuncArgs) -> Result<(Arc<FieldCtx>, VFunc, Ortho), CliError> {
    let ctx = a.field.ctx()?;
    let f = a.func.build(&ctx)?;
    let wp = spec::parse_wp(&ctx, &a.wp)?;
    Ok((ctx, f, wp))
}

fn cmd_qds(a: &WpFuncArgs, rep: Report) -> Result<Outcome, CliError> {
    let (ctx, f, wp) = wp_func(a)?;
    let q = QGroup::new(&ctx, &wp)?;
    let d = graph_of(&f);
    let (v, k) = (q.order(), d.len() as u64);
    if (k * k) % v != 0 {
        return Err(CliError::Usage(format!("k^2 = {} is not a multiple of v = {v}", k * k)));
    }
    let r = par::qds(&q, &d, k * k / v)?;
    let result = json!({
        "v": r.v,
        "k": r.k,
        "lambda": r.lambda,
        "k2_equals_v_lambda": r.k * r.k == r.v * r.lambda,
        "histogram": r.histogram.iter().map(|(c, m)| json!({"count": c, "elements": m})).collect::<Vec<_>>(),
        "first_bad": r.first_bad.map(|(e, c)| json!({"x": e.x.0, "y": e.y.0, "count": c})),
    });
    Ok((finish(rep, Some(&ctx), result, r.pass), None))
}

fn stats_json(s: &PairStats, target: u64) -> Value {
    json!({
        "pairs": s.pairs,
        "target": target,
        "histogram": s.histogram.iter().map(|(k, v)| json!({"value": k, "pairs": v})).collect::<Vec<_>>(),
        "single_total": s.single_total,
        "paired_total": s.paired_total,
        "first_bad": s.first_bad.map(|(a, b, t)| json!([a, b, t])),
        "pass": s.pass(),
    })
}

fn cmd_design(a: &DesignArgs, rep: Report) -> Result<Outcome, CliError> {
    let (ctx, f, wp) = wp_func(&a.base)?;
    let s = if a.experimental { development_experimental(&f, &wp)? } else { development(&f, &wp)? };
    let rep_stats = s.replication();
    let blocks = PairCounter::block_property(&s)?;
    let points = PairCounter::point_property(&s)?;
    let (bs, ps) = rayon::join(|| par::pair_stats(&blocks), || par::pair_stats(&points));
    if let Some(path) = &a.bitmap {
        std::fs::write(path, s.to_bitmap())?;
    }
    let pass = rep_stats.uniform && s.pairing_is_involution() && bs.pass() && ps.pass();
    let result = json!({
        "v": s.v(),
        "k": s.k(),
        "lambda": s.lambda(),
        "single_blocks": s.single_count(),
        "block_sizes": rep_stats.block_sizes.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        "point_degrees": rep_stats.point_degrees.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        "uniform": rep_stats.uniform,
        "pairing_is_involution": s.pairing_is_involution(),
        "point_pairs": stats_json(&bs, blocks.target()),
        "block_pairs": stats_json(&ps, points.target()),
        "experimental": a.experimental,
        "bitmap": a.bitmap.as_ref().map(|p| p.display().to_string()),
    });
    Ok((finish(rep, Some(&ctx), result, pass), None))
}

fn cmd_equilem(a: &WpFieldArgs, rep: Report) -> Result<Outcome, CliError> {
    let ctx = a.field.ctx()?;
    let wp = spec::parse_wp(&ctx, &a.wp)?;
    let r = equilem_solutions(&wp)?;
    let result = json!({
        "permutations": r.permutations,
        "solutions": r.solutions.len(),
        "nonlinear": r.nonlinear,
        "moves_zero": r.moves_zero,
        "noncommuting": r.noncommuting,
        "solution_tables": r.solutions,
    });
    Ok((finish(rep, Some(&ctx), result, r.holds()), None))
}

fn matrix_json(m: &pwpn_core::linalg::Matrix) -> Value {
    let d = m.dim();
    json!((0..d).map(|i| (0..d).map(|j| m.get(i, j)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn cmd_equiv(a: &EquivArgs, rep: Report) -> Result<Outcome, CliError> {
    let ctx = a.field.ctx()?;
    let f1 = spec::parse_func(&ctx, &a.f1)?;
    let f2 = spec::parse_func(&ctx, &a.f2)?;
    let wp = spec::parse_wp(&ctx, &a.wp)?;
    let opts = EquivOptions { prefilter: !a.no_prefilter, additive_alpha2: a.additive_alpha2, ..EquivOptions::default() };
    let search = EquivSearch::new(&f1, &f2, &wp, opts)?;
    let verdict = if opts.prefilter && search.prefilter_sound() && !search.spectra_match()? {
        EquivVerdict::SpectrumMismatch
    } else {
        (0..search.l2_count())
            .into_par_iter()
            .find_map_first(|i| search.search_l2(i))
            .map_or(EquivVerdict::Inequivalent, EquivVerdict::Equivalent)
    };
    let (label, witness) = match &verdict {
        EquivVerdict::Equivalent(w) => {
            let w_json = json!({
                "l1": matrix_json(&w.l1_matrix()),
                "alpha1": w.alpha1.0,
                "l2": matrix_json(&w.l2_matrix()),
                "alpha2": w.alpha2.0,
                "checked": w.checked && w.verify(&f1, &f2, &wp),
            });
            ("equivalent", Some(w_json))
        }
        EquivVerdict::SpectrumMismatch => ("inequivalent: spectrum mismatch", None),
        EquivVerdict::Inequivalent => ("inequivalent: exhaustive", None),
    };
    let pass = witness.as_ref().is_none_or(|w| w["checked"] == true);
    let result = json!({
        "verdict": label,
        "witness": witness,
        "admissible_l2": search.l2_count(),
        "prefilter_sound": search.prefilter_sound(),
    });
    Ok((finish(rep, Some(&ctx), result, pass), None))
}

fn cmd_search(a: &SearchArgs, rep: Report) -> Result<Outcome, CliError> {
    let ctx = a.field.ctx()?;
    let target = match (&a.wp, &a.c) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --wp or --c".into())),
        (Some(w), None) => Target::Wp(spec::parse_wp(&ctx, w)?),
        (None, Some(c)) => Target::C(spec::parse_elt(&ctx, c)?),
        (None, None) => Target::Classical,
    };
    let space = Space { ctx: ctx.clone(), family: a.family };
    if space.len() > pwpn_core::diffspec::SCAN_LIMIT as u64 * 64 {
        return Err(CliError::Limit(format!("search space of {} candidates", space.len())));
    }
    let search_hash = report::config_hash("search", &rep.config);
    let state = if a.resume {
        let path = a.checkpoint.as_deref().ok_or_else(|| CliError::Usage("--resume needs --checkpoint".into()))?;
        let cp = Checkpoint::load(path)?;
        if cp.search_hash != search_hash {
            return Err(CliError::Usage("checkpoint belongs to a different search".into()));
        }
        cp
    } else {
        if let Some(h) = &a.hits {
            std::fs::write(h, "")?;
        }
        Checkpoint::default()
    };
    let run = Run {
        space: &space,
        target: &target,
        chunk: a.chunk,
        stop_after: a.stop_after,
        checkpoint: a.checkpoint.as_deref(),
        hits_file: a.hits.as_deref(),
        search_hash,
    };
    let out = run.execute(state)?;
    let mut csv = String::from("index,params\n");
    for h in &out.hits {
        csv.push_str(&format!("{},\"{}\"\n", h["index"], h["params"].to_string().replace('"', "'")));
    }
    let result = json!({
        "family": a.family,
        "candidates": space.len(),
        "examined": out.next_index,
        "exhausted": out.exhausted,
        "hits": out.hits,
        "statement": if out.exhausted {
            format!("search space exhausted: {} hits among {} candidates", out.hits.len(), space.len())
        } else {
            format!("stopped after {} of {} candidates", out.next_index, space.len())
        },
    });
    Ok((finish(rep, Some(&ctx), result, true), Some(csv)))
}
