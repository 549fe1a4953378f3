//! `polydiam` command-line front end.
//!
//! Exit codes: 0 success, 1 a violated invariant or bound, 2 a usage or
//! input error (including a resource cap hit by a single-cell command).

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polydiam::bounds;
use polydiam::cayley::{all_pairs_diameter_oracle, bfs_from_identity, Stepping, ORACLE_MAX_FIELD};
use polydiam::charsum::{
    char_sum_records, check_multiplicativity, check_orthogonality, moment_report, rep_count_plain,
    rep_count_weighted, summarize, weil_report, DlogTable,
};
use polydiam::config::MAX_ORDER_ENV;
use polydiam::ff::FieldContext;
use polydiam::poly_enum::{count_irreducibles, count_prime_powers, enumerate_irreducibles, enumerate_prime_powers};
use polydiam::report::{self, CellOptions, CellSpec, ReportRow};
use polydiam::verify::{self, Fault};
use polydiam::{Caps, Error};

#[derive(Parser)]
#[command(name = "polydiam", version, about = "Diameters of polynomial Cayley graphs over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List monic irreducible or prime-power polynomials of degree d over F_q.
    Enumerate(EnumerateArgs),
    /// Exact diameter of the Cayley digraph G(alpha, d) by BFS.
    Diameter(DiameterArgs),
    /// Closed-form bounds for one cell, optionally against the exact diameter.
    Bounds(BoundsArgs),
    /// Character sums S and T, the Weil check, the moment check, or the
    /// orthogonality and multiplicativity checks.
    Charsums(CharsumsArgs),
    /// Exact counts of k-fold product representations.
    Repcount(RepcountArgs),
    /// Evaluate a grid of cells and write one report row per cell.
    Sweep(SweepArgs),
    /// Run the acceptance battery and print a pass/fail table.
    Selftest(SelftestArgs),
}

#[derive(Args, Clone)]
struct CapArgs {
    /// Largest group order q^n - 1 for dlog tables and BFS.
    #[arg(long, env = MAX_ORDER_ENV, value_parser = clap::value_parser!(u64).range(1..))]
    max_order: Option<u64>,
    /// Largest number of candidate polynomials scanned per degree.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_enumeration: Option<u64>,
    /// Largest trial divisor when factoring group orders.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    max_factor: Option<u64>,
    /// Largest field size for full character enumeration.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_character_field: Option<u64>,
    /// Largest field size for the moment check.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_moment_field: Option<u64>,
    /// Number of worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        let mut c = Caps::default();
        if let Some(v) = self.max_order {
            c.max_order = v;
        }
        if let Some(v) = self.max_enumeration {
            c.max_enumeration = v;
        }
        if let Some(v) = self.max_factor {
            c.max_factor = v;
        }
        if let Some(v) = self.max_character_field {
            c.max_character_field = v;
        }
        if let Some(v) = self.max_moment_field {
            c.max_moment_field = v;
        }
        c
    }
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output file (default: standard output). Written only on success.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Base field size, a prime power.
    #[arg(long)]
    q: u64,
    /// Extension degree.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Modulus f as ascending coefficient codes, e.g. `1,1,0,1` for X^3+X+1.
    /// Defaults to the first monic irreducible in code order.
    #[arg(long)]
    modulus: Option<String>,
}

impl FieldArgs {
    fn context(&self) -> polydiam::Result<FieldContext> {
        FieldContext::with_q(self.q, self.n as usize, self.modulus.as_deref())
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Kind {
    Irreducible,
    PrimePower,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    q: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    d: u64,
    #[arg(long, value_enum, default_value = "irreducible")]
    kind: Kind,
    /// Print only the enumerated count next to the closed-form count.
    #[arg(long)]
    count_only: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum SteppingArg {
    FollowEdges,
    Products,
}

#[derive(Args)]
struct DiameterArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    d: u64,
    #[arg(long, value_enum, default_value = "follow-edges")]
    stepping: SteppingArg,
    /// Also run the all-pairs oracle (q^n <= 512) and fail on disagreement.
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum BoundsFormat {
    Csv,
    Json,
    /// The full bound report with preconditions, floors and flags.
    Report,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    d: u64,
    /// Compute the exact diameter and flag violated bounds.
    #[arg(long)]
    with_bfs: bool,
    /// Skip the Weil and moment checks.
    #[arg(long)]
    skip_charsums: bool,
    /// Fill `runtime_ms` (makes output time-dependent).
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: BoundsFormat,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum CharsumMode {
    /// S(chi_j) and T(chi_j) for every j.
    Spectrum,
    Weil,
    Moment,
    /// Orthogonality and multiplicativity of the characters.
    Characters,
}

#[derive(Args)]
struct CharsumsArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Degree of the polynomials summed over (not needed for `characters`).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    d: Option<u64>,
    #[arg(long, value_enum, default_value = "weil")]
    mode: CharsumMode,
    /// Moment mode: also derive the moment exactly in big integers.
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum CountKind {
    /// Lambda-weighted mixed count over P_d and I_d.
    Weighted,
    /// Unweighted count over P_d.
    Plain,
}

#[derive(Args)]
struct RepcountArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    d: u64,
    /// Number of factors; defaults to the ceiling of the applicable improved bound.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    /// Defaults to `plain` for d = 1 and `weighted` otherwise.
    #[arg(long, value_enum)]
    kind: Option<CountKind>,
    /// `json` prints the summary; `csv` prints one row per group element.
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated base field sizes.
    #[arg(
        long,
        value_delimiter = ',',
        action = clap::ArgAction::Set,
        conflicts_with = "q_range",
        required_unless_present = "q_range"
    )]
    q_list: Vec<u64>,
    /// Every prime power in `A..B` (inclusive).
    #[arg(long)]
    q_range: Option<String>,
    /// Extension degrees `A..B` (inclusive).
    #[arg(long)]
    n_range: String,
    /// Polynomial degrees `A..B` (inclusive); cells keep d < n.
    #[arg(long)]
    d_range: String,
    /// Skip the Weil and moment checks.
    #[arg(long)]
    skip_charsums: bool,
    /// Fill `runtime_ms` (makes output time-dependent).
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[command(flatten)]
    caps: CapArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum SelftestFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum FaultArg {
    ShrinkImprovedBound,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run only these criteria (1-9); repeatable.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
    criterion: Vec<u8>,
    #[arg(long, value_enum, default_value = "text")]
    format: SelftestFormat,
    /// Seed a known defect to confirm the battery fails.
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

/// How a command ended, before mapping to an exit code.
enum Failure {
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Violation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

/// Bytes to emit, plus an optional violation to report after emitting.
struct Outcome {
    bytes: Vec<u8>,
    violation: Option<String>,
}

impl Outcome {
    fn ok(bytes: Vec<u8>) -> Self {
        Outcome { bytes, violation: None }
    }

    fn flag(mut self, bad: bool, what: impl FnOnce() -> String) -> Self {
        if bad && self.violation.is_none() {
            self.violation = Some(what());
        }
        self
    }
}

fn json_bytes<T: Serialize + ?Sized>(v: &T) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("serializable");
    b.push(b'\n');
    b
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CmdResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Violation(format!("csv output: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Violation(format!("csv output: {e}")))?;
    Ok(Outcome::ok(bytes))
}

fn parse_range(text: &str, what: &str) -> std::result::Result<std::ops::RangeInclusive<u64>, Failure> {
    let bad = || Failure::Usage(format!("--{what} expects `A..B` with 1 <= A <= B, got `{text}`"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn setup_jobs(caps: &CapArgs) {
    if let Some(j) = caps.jobs {
        // only fails if a pool already exists, which never happens here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j as usize).build_global();
    }
}

fn run_enumerate(a: &EnumerateArgs) -> CmdResult {
    let caps = a.caps.caps();
    let field = polydiam::ff::BaseField::new(polydiam::ff::FieldParams::new(a.q)?)?;
    let d = a.d as usize;
    let expected = match a.kind {
        Kind::Irreducible => count_irreducibles(a.q, d as u32)?,
        Kind::PrimePower => count_prime_powers(a.q, d as u32)?,
    };
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match a.kind {
        Kind::Irreducible => {
            let list = enumerate_irreducibles(&field, d, caps.max_enumeration)?;
            (
                vec!["index", "poly"],
                list.iter().enumerate().map(|(i, h)| vec![i.to_string(), h.to_csv()]).collect(),
            )
        }
        Kind::PrimePower => {
            let list = enumerate_prime_powers(&field, d, caps.max_enumeration)?;
            (
                vec!["index", "poly", "base", "k", "lambda"],
                list.iter()
                    .enumerate()
                    .map(|(i, w)| {
                        vec![i.to_string(), w.poly.to_csv(), w.base.to_csv(), w.k.to_string(), w.lambda.to_string()]
                    })
                    .collect(),
            )
        }
    };
    let found = rows.len();
    let mismatch = num_bigint::BigUint::from(found) != expected;
    let what = || format!("enumerated {found} polynomials, the counting formula gives {expected}");
    if a.count_only {
        #[derive(Serialize)]
        struct Count {
            q: u64,
            d: u64,
            enumerated: usize,
            formula: String,
            equal: bool,
        }
        let c = Count { q: a.q, d: a.d, enumerated: found, formula: expected.to_string(), equal: !mismatch };
        let out = match a.format {
            TableFormat::Json => Outcome::ok(json_bytes(&c)),
            TableFormat::Csv => csv_bytes(
                &["q", "d", "enumerated", "formula", "equal"],
                [vec![c.q.to_string(), c.d.to_string(), found.to_string(), c.formula.clone(), c.equal.to_string()]],
            )?,
        };
        return Ok(out.flag(mismatch, what));
    }
    let out = match a.format {
        TableFormat::Csv => csv_bytes(&header, rows)?,
        TableFormat::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .into_iter()
                .map(|r| header.iter().map(|h| h.to_string()).zip(r.into_iter().map(serde_json::Value::String)).collect())
                .collect();
            Outcome::ok(json_bytes(&objs))
        }
    };
    Ok(out.flag(mismatch, what))
}

fn run_diameter(a: &DiameterArgs) -> CmdResult {
    let caps = a.caps.caps();
    let ctx = a.field.context()?;
    let d = a.d as usize;
    let dlog = DlogTable::build(&ctx, &caps)?;
    let gens = polydiam::cayley::build_generators(&ctx, d, &caps)?;
    let stepping = match a.stepping {
        SteppingArg::FollowEdges => Stepping::FollowEdges,
        SteppingArg::Products => Stepping::Products,
    };
    let r = bfs_from_identity(&gens, &ctx, &dlog, stepping)?;
    let oracle = if a.oracle {
        if ctx.size() > ORACLE_MAX_FIELD {
            return Err(Failure::Usage(format!("--oracle needs q^n <= {ORACLE_MAX_FIELD}")));
        }
        Some(all_pairs_diameter_oracle(&gens, &ctx)?)
    } else {
        None
    };
    let disagree = oracle.as_ref().is_some_and(|o| o.diameter != r.diameter);
    let out = match a.format {
        TableFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                #[serde(flatten)]
                result: &'a polydiam::cayley::DiameterResult,
                stepping_rule: &'static str,
                oracle_diameter: Option<Option<u32>>,
            }
            Outcome::ok(json_bytes(&Out {
                result: &r,
                stepping_rule: stepping.describe(),
                oracle_diameter: oracle.as_ref().map(|o| o.diameter),
            }))
        }
        TableFormat::Csv => csv_bytes(
            &["q", "n", "d", "f", "convention", "connected", "diameter", "distinct_generators", "regularity"],
            [vec![
                r.q.to_string(),
                r.n.to_string(),
                r.d.to_string(),
                r.modulus.to_csv(),
                format!("{:?}", r.convention),
                r.connected.to_string(),
                r.diameter.map_or("NA".into(), |v| v.to_string()),
                r.distinct_generators.to_string(),
                r.regularity.to_string(),
            ]],
        )?,
    };
    let guaranteed = polydiam::arith::below_half_power_plus_one(ctx.n() as u64, ctx.q(), d as u32);
    Ok(out
        .flag(disagree, || format!("BFS diameter {:?} disagrees with the oracle", r.diameter))
        .flag(guaranteed && !r.connected, || "graph is disconnected although n < q^(d/2) + 1".into()))
}

fn rows_output(rows: &[ReportRow], format: TableFormat) -> CmdResult {
    let mut bytes = Vec::new();
    match format {
        TableFormat::Csv => report::write_csv(rows, &mut bytes)?,
        TableFormat::Json => report::write_json(rows, &mut bytes)?,
    }
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.has_violation())
        .map(|r| format!("q={} n={} d={}: {}", r.q, r.n, r.d, r.violations))
        .collect();
    Ok(Outcome::ok(bytes).flag(!bad.is_empty(), || bad.join("; ")))
}

fn run_bounds(a: &BoundsArgs) -> CmdResult {
    let caps = a.caps.caps();
    let (q, n, d) = (a.field.q, a.field.n, a.d);
    if a.format == BoundsFormat::Report {
        let ctx = a.field.context()?;
        let r = bounds::compare(&ctx, d as usize, a.with_bfs, &caps)?;
        let bad = r.flags.as_ref().is_some_and(|f| f.any())
            || (r.connectivity_guaranteed && r.connected == Some(false));
        return Ok(Outcome::ok(json_bytes(&r)).flag(bad, || format!("q={q} n={n} d={d}: bound violated")));
    }
    if d >= n {
        // bounds alone make sense for any d; the row needs d < n
        return Err(Failure::Usage(format!("report rows need d < n, got d = {d}, n = {n}")));
    }
    let spec = CellSpec { q, n: n as usize, d: d as usize, modulus: a.field.modulus.clone() };
    let opts = CellOptions { run_bfs: a.with_bfs, charsums: !a.skip_charsums, caps, timing: a.timing };
    let row = report::evaluate_cell(&spec, &opts)?;
    rows_output(&[row], if a.format == BoundsFormat::Json { TableFormat::Json } else { TableFormat::Csv })
}

fn need_d(d: Option<u64>) -> std::result::Result<usize, Failure> {
    d.map(|d| d as usize).ok_or_else(|| Failure::Usage("this mode needs --d".into()))
}

fn run_charsums(a: &CharsumsArgs) -> CmdResult {
    let caps = a.caps.caps();
    let ctx = a.field.context()?;
    if a.exact && a.mode != CharsumMode::Moment {
        return Err(Failure::Usage("--exact applies only to --mode moment".into()));
    }
    match a.mode {
        CharsumMode::Characters => {
            if a.d.is_some() {
                return Err(Failure::Usage("--d does not apply to --mode characters".into()));
            }
            let dlog = DlogTable::build(&ctx, &caps)?;
            #[derive(Serialize)]
            struct Out {
                orthogonality: polydiam::charsum::OrthogonalityReport,
                multiplicativity: polydiam::charsum::MultiplicativityReport,
            }
            let out = Out { orthogonality: check_orthogonality(&dlog), multiplicativity: check_multiplicativity(&ctx, &dlog)? };
            let bad = !(out.orthogonality.pass && out.multiplicativity.pass);
            let bytes = match a.format {
                TableFormat::Json => json_bytes(&out),
                TableFormat::Csv => csv_bytes(
                    &["check", "order", "max_error", "tolerance", "pass"],
                    [
                        vec![
                            "orthogonality".into(),
                            out.orthogonality.order.to_string(),
                            out.orthogonality.principal_error.max(out.orthogonality.max_nonprincipal).to_string(),
                            out.orthogonality.tolerance.to_string(),
                            out.orthogonality.pass.to_string(),
                        ],
                        vec![
                            "multiplicativity".into(),
                            out.multiplicativity.order.to_string(),
                            out.multiplicativity.max_error.to_string(),
                            out.multiplicativity.tolerance.to_string(),
                            out.multiplicativity.pass.to_string(),
                        ],
                    ],
                )?
                .bytes,
            };
            Ok(Outcome::ok(bytes).flag(bad, || "character identities failed".into()))
        }
        mode => {
            let d = need_d(a.d)?;
            if ctx.size() > caps.max_character_field {
                return Err(Error::cap("max_character_field", caps.max_character_field, ctx.size()).into());
            }
            let dlog = DlogTable::build(&ctx, &caps)?;
            let catalog = polydiam::poly_enum::PolyCatalog::build(ctx.base(), d, caps.max_enumeration)?;
            match mode {
                CharsumMode::Spectrum => {
                    let recs = char_sum_records(&ctx, &catalog, &dlog)?;
                    match a.format {
                        TableFormat::Json => Ok(Outcome::ok(json_bytes(&recs))),
                        TableFormat::Csv => csv_bytes(
                            &["j", "s_re", "s_im", "t_re", "t_im", "abs_s", "abs_t"],
                            recs.iter().map(|r| {
                                std::iter::once(r.j.to_string())
                                    .chain([r.s_re, r.s_im, r.t_re, r.t_im, r.abs_s, r.abs_t].map(|v| v.to_string()))
                                    .collect()
                            }),
                        ),
                    }
                }
                CharsumMode::Weil => {
                    let w = weil_report(&ctx, &catalog, &dlog)?;
                    let bytes = match a.format {
                        TableFormat::Json => json_bytes(&w),
                        TableFormat::Csv => csv_bytes(
                            &["q", "n", "d", "principal_s", "max_abs_s", "argmax_j", "bound", "ratio", "pass"],
                            [vec![
                                w.q.to_string(),
                                w.n.to_string(),
                                w.d.to_string(),
                                w.principal_s.to_string(),
                                w.max_abs_s.to_string(),
                                w.argmax_j.to_string(),
                                w.bound.to_string(),
                                w.ratio.to_string(),
                                w.pass.to_string(),
                            ]],
                        )?
                        .bytes,
                    };
                    Ok(Outcome::ok(bytes)
                        .flag(!w.pass, || format!("max |S| = {} exceeds {}", w.max_abs_s, w.bound))
                        .flag(!w.principal_ok, || format!("S(chi_0) = {}, expected q^d", w.principal_s)))
                }
                CharsumMode::Moment => {
                    if !report::moment_feasible(&ctx, d, &caps) {
                        return Err(Failure::Usage(format!(
                            "moment check for q={} n={} d={d} exceeds --max-moment-field or the tuple cap",
                            ctx.q(),
                            ctx.n()
                        )));
                    }
                    let r = moment_report(&ctx, &catalog, &dlog, a.exact)?;
                    let bytes = match a.format {
                        TableFormat::Json => json_bytes(&r),
                        TableFormat::Csv => csv_bytes(
                            &["q", "n", "d", "m", "lhs", "collisions", "multiset_count", "bound", "float_rel_error", "exact_lhs", "pass"],
                            [vec![
                                r.q.to_string(),
                                r.n.to_string(),
                                r.d.to_string(),
                                r.m.to_string(),
                                r.lhs.to_string(),
                                r.collisions.to_string(),
                                r.multiset_count.to_string(),
                                r.bound.to_string(),
                                r.float_rel_error.to_string(),
                                r.exact_lhs.as_ref().map_or("NA".into(), |v| v.to_string()),
                                r.pass.to_string(),
                            ]],
                        )?
                        .bytes,
                    };
                    Ok(Outcome::ok(bytes).flag(!r.pass, || "moment check failed".into()))
                }
                CharsumMode::Characters => unreachable!(),
            }
        }
    }
}

fn run_repcount(a: &RepcountArgs) -> CmdResult {
    let caps = a.caps.caps();
    let ctx = a.field.context()?;
    let (q, n, d) = (ctx.q(), ctx.n() as u64, a.d);
    if d >= n {
        return Err(Failure::Usage(format!("need d < n, got d = {d}, n = {n}")));
    }
    let kind = a.kind.unwrap_or(if d == 1 { CountKind::Plain } else { CountKind::Weighted });
    let k = match a.k {
        Some(k) => k as usize,
        None => {
            let b = if d == 1 { bounds::improved_linear_bound(q, n) } else { bounds::improved_bound(q, n, d) };
            match b.value() {
                Some(v) => v.ceil() as usize,
                None => return Err(Failure::Usage("no improved bound applies here; pass --k".into())),
            }
        }
    };
    if ctx.group_order() > caps.max_order {
        return Err(Error::cap("max_order", caps.max_order, ctx.group_order()).into());
    }
    let dlog = DlogTable::build(&ctx, &caps)?;
    let catalog = polydiam::poly_enum::PolyCatalog::build(ctx.base(), d as usize, caps.max_enumeration)?;
    let v = match kind {
        CountKind::Weighted => rep_count_weighted(&ctx, &catalog, &dlog, k)?,
        CountKind::Plain => rep_count_plain(&ctx, &catalog, &dlog, k)?,
    };
    let s = summarize(&ctx, &catalog, &v);
    let bytes = match a.format {
        TableFormat::Json => json_bytes(&s),
        TableFormat::Csv => {
            let mut rows: Vec<(u64, Vec<String>)> = (0..dlog.order())
                .map(|t| {
                    let code = dlog.exp_code(t);
                    (code, vec![code.to_string(), t.to_string(), v.at(t).to_string()])
                })
                .collect();
            rows.sort_by_key(|r| r.0);
            csv_bytes(&["element", "log", "count"], rows.into_iter().map(|r| r.1))?.bytes
        }
    };
    Ok(Outcome::ok(bytes)
        .flag(!s.total_matches, || format!("total {} differs from the mass formula {}", s.total, s.expected_total))
        .flag(s.deviation_ok == Some(false), || "a count deviates beyond the character-sum bound".into()))
}

fn run_sweep(a: &SweepArgs) -> CmdResult {
    let caps = a.caps.caps();
    let n_range = parse_range(&a.n_range, "n-range")?;
    let d_range = parse_range(&a.d_range, "d-range")?;
    let qs: Vec<u64> = match &a.q_range {
        Some(r) => parse_range(r, "q-range")?
            .filter(|&q| polydiam::arith::prime_power(q).is_some())
            .collect(),
        None => a.q_list.clone(),
    };
    if qs.is_empty() {
        return Err(Failure::Usage("no base field sizes to sweep".into()));
    }
    if let Some(bad) = qs.iter().find(|&&q| polydiam::arith::prime_power(q).is_none()) {
        return Err(Failure::Usage(format!("q = {bad} is not a prime power")));
    }
    let to_usize = |r: std::ops::RangeInclusive<u64>| *r.start() as usize..=*r.end() as usize;
    let cells = report::sweep_cells(&qs, to_usize(n_range), to_usize(d_range));
    if cells.is_empty() {
        return Err(Failure::Usage("the ranges give no cells with d < n".into()));
    }
    let opts = CellOptions { run_bfs: true, charsums: !a.skip_charsums, caps, timing: a.timing };
    let rows = report::sweep(&cells, &opts)?;
    for r in rows.iter().filter(|r| r.status != "ok") {
        eprintln!("note: q={} n={} d={} {}", r.q, r.n, r.d, r.status);
    }
    rows_output(&rows, a.format)
}

fn run_selftest(a: &SelftestArgs) -> CmdResult {
    let fault = match a.inject_fault {
        Some(FaultArg::ShrinkImprovedBound) => Fault::ShrinkImprovedBound,
        None => Fault::None,
    };
    let ids: Vec<u8> = if a.criterion.is_empty() { (1..=verify::CRITERIA).collect() } else { a.criterion.clone() };
    let mut outcomes = Vec::new();
    let mut text = String::new();
    for id in ids {
        let o = verify::run_criterion(id, fault).expect("criterion ids are validated by clap");
        if a.format == SelftestFormat::Text {
            // stream progress so long runs are visible
            println!("{}", o.line());
            for n in &o.notes {
                println!("    {n}");
            }
        }
        outcomes.push(o);
    }
    let first = outcomes.iter().find_map(|o| o.first_failure().map(|f| format!("criterion {}: {f}", o.id)));
    let bytes = match a.format {
        SelftestFormat::Json => json_bytes(&outcomes),
        SelftestFormat::Text => {
            let mut modules: Vec<(&str, u64)> = Vec::new();
            for o in &outcomes {
                match modules.iter_mut().find(|m| m.0 == o.module) {
                    Some(m) => m.1 += o.assertions,
                    None => modules.push((o.module, o.assertions)),
                }
            }
            text.push_str("assertions per module:\n");
            for (m, c) in modules {
                text.push_str(&format!("    {m}: {c}\n"));
            }
            let passed = outcomes.iter().filter(|o| o.passed()).count();
            text.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
            text.into_bytes()
        }
    };
    Ok(Outcome::ok(bytes).flag(first.is_some(), || first.unwrap_or_default()))
}

fn emit(bytes: &[u8], out: Option<&PathBuf>) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, bytes),
        None => {
            let mut o = io::stdout().lock();
            o.write_all(bytes)?;
            o.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out) = match &cli.command {
        Command::Enumerate(a) => {
            setup_jobs(&a.caps);
            (run_enumerate(a), a.out.out.clone())
        }
        Command::Diameter(a) => {
            setup_jobs(&a.caps);
            (run_diameter(a), a.out.out.clone())
        }
        Command::Bounds(a) => {
            setup_jobs(&a.caps);
            (run_bounds(a), a.out.out.clone())
        }
        Command::Charsums(a) => {
            setup_jobs(&a.caps);
            (run_charsums(a), a.out.out.clone())
        }
        Command::Repcount(a) => {
            setup_jobs(&a.caps);
            (run_repcount(a), a.out.out.clone())
        }
        Command::Sweep(a) => {
            setup_jobs(&a.caps);
            (run_sweep(a), a.out.out.clone())
        }
        Command::Selftest(a) => (run_selftest(a), None),
    };
    match result {
        Ok(o) => {
            if let Err(e) = emit(&o.bytes, out.as_ref()) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            match o.violation {
                Some(v) => {
                    eprintln!("violation: {v}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(m)) => {
            eprintln!("failure: {m}");
            ExitCode::from(1)
        }
    }
}
