//! Per-cell evaluation and the flat `ReportRow` record shared by the
//! `bounds` and `sweep` subcommands.
//!
//! CSV writes absent values as `NA`; JSON writes them as `null`. Both formats
//! carry the columns in [`COLUMNS`] order.

use std::io::Write;
use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::bounds::{moment_exponent, BoundReport};
use crate::cayley::{bfs_from_identity, GeneratorSet, Stepping};
use crate::charsum::{moment_report, weil_report, DlogTable};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::ff::FieldContext;
use crate::poly_enum::{count_prime_powers, PolyCatalog};

pub const COLUMNS: [&str; 17] = [
    "q",
    "n",
    "d",
    "f",
    "status",
    "connected",
    "diameter",
    "distinct_generators",
    "regularity",
    "bound_lwwz",
    "bound_thm1",
    "bound_thm2",
    "max_weil_ratio",
    "moment_pass",
    "theta",
    "violations",
    "runtime_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub q: u64,
    pub n: usize,
    pub d: usize,
    pub f: String,
    /// `ok`, or `skipped:<cap>` when a resource cap stopped the BFS.
    pub status: String,
    pub connected: Option<bool>,
    pub diameter: Option<u32>,
    pub distinct_generators: Option<u64>,
    pub regularity: Option<u64>,
    pub bound_lwwz: Option<f64>,
    pub bound_thm1: Option<f64>,
    pub bound_thm2: Option<f64>,
    pub max_weil_ratio: Option<f64>,
    pub moment_pass: Option<bool>,
    pub theta: f64,
    /// `;`-separated names of failed checks, or `none`.
    pub violations: String,
    pub runtime_ms: Option<u64>,
}

fn na<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "NA".to_string(), T::to_string)
}

impl ReportRow {
    pub fn csv_record(&self) -> [String; 17] {
        [
            self.q.to_string(),
            self.n.to_string(),
            self.d.to_string(),
            self.f.clone(),
            self.status.clone(),
            na(&self.connected),
            na(&self.diameter),
            na(&self.distinct_generators),
            na(&self.regularity),
            na(&self.bound_lwwz),
            na(&self.bound_thm1),
            na(&self.bound_thm2),
            na(&self.max_weil_ratio),
            na(&self.moment_pass),
            self.theta.to_string(),
            self.violations.clone(),
            na(&self.runtime_ms),
        ]
    }

    pub fn has_violation(&self) -> bool {
        self.violations != "none"
    }
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Internal(format!("csv output: {e}"));
    w.write_record(COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record(r.csv_record()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Internal(format!("csv output: {e}")))
}

pub fn write_json<W: Write>(rows: &[ReportRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)
        .map_err(|e| Error::Internal(format!("json output: {e}")))?;
    writeln!(out).map_err(|e| Error::Internal(format!("json output: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSpec {
    pub q: u64,
    pub n: usize,
    pub d: usize,
    pub modulus: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CellOptions {
    pub run_bfs: bool,
    pub charsums: bool,
    pub caps: Caps,
    pub timing: bool,
}

impl Default for CellOptions {
    fn default() -> Self {
        CellOptions {
            run_bfs: true,
            charsums: true,
            caps: Caps::default(),
            timing: false,
        }
    }
}

fn skipped(e: &Error) -> Option<String> {
    match e {
        Error::ResourceCap { cap, .. } => Some(format!("skipped:{cap}")),
        _ => None,
    }
}

/// Evaluate one `(q, n, d, f)` cell. Resource caps mark the row skipped
/// instead of failing; other errors propagate.
pub fn evaluate_cell(spec: &CellSpec, opts: &CellOptions) -> Result<ReportRow> {
    let start = Instant::now();
    if spec.d == 0 || spec.d >= spec.n {
        return Err(Error::Precondition(format!(
            "cell needs 1 <= d < n, got n = {}, d = {}",
            spec.n, spec.d
        )));
    }
    let ctx = FieldContext::with_q(spec.q, spec.n, spec.modulus.as_deref())?;
    let caps = &opts.caps;
    let bounds = BoundReport::new(spec.q, spec.n as u64, spec.d as u64)?;

    let mut row = ReportRow {
        q: spec.q,
        n: spec.n,
        d: spec.d,
        f: ctx.modulus().to_csv(),
        status: "ok".into(),
        connected: None,
        diameter: None,
        distinct_generators: None,
        regularity: count_prime_powers(spec.q, spec.d as u32)?.to_u64(),
        bound_lwwz: bounds.lwwz.value(),
        bound_thm1: bounds.thm1.value(),
        bound_thm2: bounds.thm2.value(),
        max_weil_ratio: None,
        moment_pass: None,
        theta: bounds.theta,
        violations: String::new(),
        runtime_ms: None,
    };
    let mut violations: Vec<&str> = Vec::new();

    let wants_weil = opts.charsums && ctx.size() <= caps.max_character_field;
    let wants_moment = opts.charsums && moment_feasible(&ctx, spec.d, caps);
    if opts.run_bfs || wants_weil || wants_moment {
        let shared = DlogTable::build(&ctx, caps).and_then(|dlog| {
            let catalog = PolyCatalog::build(ctx.base(), spec.d, caps.max_enumeration)?;
            Ok((dlog, catalog))
        });
        match shared {
            Ok((dlog, catalog)) => {
                if catalog.lambda_total() != spec.q.pow(spec.d as u32) {
                    violations.push("sum_lambda");
                }
                if opts.run_bfs {
                    let gens = GeneratorSet::build(&ctx, &catalog)?;
                    let r = bfs_from_identity(&gens, &ctx, &dlog, Stepping::FollowEdges)?;
                    row.connected = Some(r.connected);
                    row.diameter = r.diameter;
                    row.distinct_generators = Some(gens.distinct_count as u64);
                    let checked = bounds.clone().with_diameter(r.connected, r.diameter);
                    violations.extend(checked.flags.as_ref().map(|f| f.names()).unwrap_or_default());
                    if checked.connectivity_guaranteed && !r.connected {
                        violations.push("disconnected");
                    }
                }
                if wants_weil {
                    let w = weil_report(&ctx, &catalog, &dlog)?;
                    row.max_weil_ratio = Some(w.ratio);
                    if !w.pass {
                        violations.push("weil");
                    }
                    if !w.principal_ok {
                        violations.push("weil_principal");
                    }
                }
                if wants_moment {
                    let m = moment_report(&ctx, &catalog, &dlog, true)?;
                    row.moment_pass = Some(m.pass);
                    if !m.pass {
                        violations.push("moment");
                    }
                }
            }
            Err(e) => match skipped(&e) {
                Some(status) => row.status = status,
                None => return Err(e),
            },
        }
    }
    row.violations = if violations.is_empty() {
        "none".into()
    } else {
        violations.join(";")
    };
    if opts.timing {
        row.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(row)
}

/// Whether the moment check fits the configured caps.
pub fn moment_feasible(ctx: &FieldContext, d: usize, caps: &Caps) -> bool {
    if ctx.size() > caps.max_moment_field || d == 0 || d >= ctx.n() {
        return false;
    }
    let m = moment_exponent(ctx.n() as u64, d as u64);
    let Ok(count) = crate::poly_enum::count_irreducibles_u64(ctx.q(), d as u32) else {
        return false;
    };
    (count as f64).powi(2 * m as i32) <= caps.max_moment_tuples as f64
}

/// Cells `q x n x d` in list order, keeping only `1 <= d < n`.
pub fn sweep_cells(
    q_list: &[u64],
    n_range: std::ops::RangeInclusive<usize>,
    d_range: std::ops::RangeInclusive<usize>,
) -> Vec<CellSpec> {
    let mut cells = Vec::new();
    for &q in q_list {
        for n in n_range.clone() {
            for d in d_range.clone() {
                if d >= 1 && d < n {
                    cells.push(CellSpec {
                        q,
                        n,
                        d,
                        modulus: None,
                    });
                }
            }
        }
    }
    cells
}

/// Evaluate cells in parallel; rows come back in cell order. Cells whose
/// group order exceeds `max_order` are marked skipped without building the
/// field at all.
pub fn sweep(cells: &[CellSpec], opts: &CellOptions) -> Result<Vec<ReportRow>> {
    cells
        .par_iter()
        .map(|cell| {
            let order = u32::try_from(cell.n)
                .ok()
                .and_then(|n| cell.q.checked_pow(n))
                .map(|s| s - 1);
            match order {
                Some(o) if o <= opts.caps.max_order => evaluate_cell(cell, opts),
                _ => skipped_row(cell, "skipped:max_order"),
            }
        })
        .collect()
}

fn skipped_row(cell: &CellSpec, status: &str) -> Result<ReportRow> {
    let bounds = BoundReport::new(cell.q, cell.n as u64, cell.d as u64)?;
    if arith::prime_power(cell.q).is_none() {
        return Err(Error::Precondition(format!("q = {} is not a prime power", cell.q)));
    }
    Ok(ReportRow {
        q: cell.q,
        n: cell.n,
        d: cell.d,
        f: cell.modulus.clone().unwrap_or_else(|| "NA".into()),
        status: status.into(),
        connected: None,
        diameter: None,
        distinct_generators: None,
        regularity: count_prime_powers(cell.q, cell.d as u32)?.to_u64(),
        bound_lwwz: bounds.lwwz.value(),
        bound_thm1: bounds.thm1.value(),
        bound_thm2: bounds.thm2.value(),
        max_weil_ratio: None,
        moment_pass: None,
        theta: bounds.theta,
        violations: "none".into(),
        runtime_ms: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(q: u64, n: usize, d: usize) -> CellSpec {
        CellSpec {
            q,
            n,
            d,
            modulus: None,
        }
    }

    #[test]
    fn anchor_cell_row() {
        let row = evaluate_cell(&cell(5, 5, 2), &CellOptions::default()).unwrap();
        assert_eq!(row.status, "ok");
        assert_eq!(row.connected, Some(true));
        assert!(row.diameter.unwrap() as f64 <= 37.06);
        assert_eq!(row.regularity, Some(15));
        assert_eq!(row.moment_pass, Some(true));
        assert!(row.max_weil_ratio.unwrap() <= 1.0);
        assert_eq!(row.violations, "none");
        assert_eq!(row.runtime_ms, None);
    }

    #[test]
    fn csv_uses_na_and_quotes_polynomials() {
        let opts = CellOptions {
            run_bfs: false,
            charsums: false,
            ..CellOptions::default()
        };
        let row = evaluate_cell(&cell(2, 3, 1), &opts).unwrap();
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "2,3,1,\"1,1,0,1\",ok,NA,NA,NA,2,NA,NA,NA,NA,NA,1.5849625007211563,none,NA"
        );
    }

    #[test]
    fn sweep_marks_capped_cells() {
        let cells = sweep_cells(&[2, 3], 2..=4, 1..=3);
        assert_eq!(cells.len(), 12);
        let opts = CellOptions {
            caps: Caps {
                max_order: 20,
                ..Caps::default()
            },
            ..CellOptions::default()
        };
        let rows = sweep(&cells, &opts).unwrap();
        let skipped: Vec<_> = rows
            .iter()
            .filter(|r| r.status == "skipped:max_order")
            .map(|r| (r.q, r.n))
            .collect();
        assert!(skipped.iter().all(|&(q, n)| q.pow(n as u32) - 1 > 20));
        assert!(skipped.contains(&(3, 3)));
        assert!(rows.iter().all(|r| !r.has_violation()));
    }
}
