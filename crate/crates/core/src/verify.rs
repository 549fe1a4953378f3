//! The exhaustive small-instance acceptance battery behind `selftest`.
//!
//! Each criterion runs independently and reports how many assertions it made,
//! which ones failed, and how long it took against its time budget. Cross
//! checks use independent code paths where possible: the all-pairs oracle
//! uses field arithmetic only, the moment count is compared with a
//! partition formula that never touches the field, and so on.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith;
use crate::bounds::{
    asymptotic_constants, baseline_bound, improved_bound, improved_linear_bound, Bound,
};
use crate::cayley::{all_pairs_diameter_oracle, bfs_from_identity, GeneratorSet, Stepping};
use crate::charsum::{
    check_multiplicativity, check_orthogonality, moment_report, rep_count_plain,
    rep_count_weighted, summarize, weil_report, DlogTable,
};
use crate::config::Caps;
use crate::error::Result;
use crate::ff::{BaseField, FieldContext, FieldParams, FqPoly};
use crate::poly_enum::{count_irreducibles, count_prime_powers, enumerate_irreducibles, PolyCatalog};

/// Failure messages kept per criterion; further failures are only counted.
const MAX_RECORDED_FAILURES: usize = 20;

/// A deliberately seeded defect, used to confirm the battery can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Halve the improved bound before comparing it with anything.
    ShrinkImprovedBound,
}

impl Fault {
    fn improved(self, q: u64, n: u64, d: u64) -> Bound {
        match (self, improved_bound(q, n, d)) {
            (Fault::ShrinkImprovedBound, Bound::Value(v)) => Bound::Value(v / 2.0),
            (_, b) => b,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub module: &'static str,
    pub assertions: u64,
    pub failed: u64,
    /// The first few failing assertions, in the order they were hit.
    pub failures: Vec<String>,
    /// Informational lines: cell counts, worst ratios and the like.
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
    pub budget_ms: u64,
}

impl Outcome {
    pub fn within_budget(&self) -> bool {
        self.elapsed_ms <= self.budget_ms
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.assertions > 0 && self.within_budget()
    }

    /// The first failing assertion, or the budget overrun.
    pub fn first_failure(&self) -> Option<String> {
        if let Some(f) = self.failures.first() {
            return Some(f.clone());
        }
        if self.assertions == 0 {
            return Some("no assertions ran".into());
        }
        (!self.within_budget()).then(|| {
            format!("took {} ms, budget {} ms", self.elapsed_ms, self.budget_ms)
        })
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({} assertions, {} failed, {} ms of {} ms)",
            self.id,
            self.module,
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.assertions,
            self.failed,
            self.elapsed_ms,
            self.budget_ms,
        )
    }
}

#[derive(Default)]
struct Tally {
    assertions: u64,
    failed: u64,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.assertions += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures.push(what());
            }
        }
    }

    /// Record an error from the pipeline itself as a failed assertion.
    fn ok<T>(&mut self, r: Result<T>, context: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                let msg = format!("{}: {e}", context());
                self.check(false, || msg);
                None
            }
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

struct Spec {
    id: u8,
    name: &'static str,
    module: &'static str,
    budget_s: u64,
}

const SPECS: [Spec; 9] = [
    Spec { id: 1, name: "irreducible count matches the Moebius formula", module: "poly_enum", budget_s: 30 },
    Spec { id: 2, name: "von Mangoldt weights over P_d sum to q^d", module: "poly_enum", budget_s: 10 },
    Spec { id: 3, name: "BFS diameter agrees with the all-pairs oracle", module: "cayley", budget_s: 60 },
    Spec { id: 4, name: "exact diameters respect every applicable bound", module: "bounds", budget_s: 300 },
    Spec { id: 5, name: "nonprincipal character sums obey the Weil bound", module: "charsum", budget_s: 120 },
    Spec { id: 6, name: "moment identity and collision bound", module: "charsum", budget_s: 120 },
    Spec { id: 7, name: "representation counts are positive at the bound", module: "charsum", budget_s: 120 },
    Spec { id: 8, name: "character orthogonality and multiplicativity", module: "charsum", budget_s: 10 },
    Spec { id: 9, name: "asymptotic constants: improved below old", module: "bounds", budget_s: 1 },
];

pub const CRITERIA: u8 = 9;

pub fn criterion_name(id: u8) -> Option<&'static str> {
    SPECS.iter().find(|s| s.id == id).map(|s| s.name)
}

/// Run one criterion (1 through 9).
pub fn run_criterion(id: u8, fault: Fault) -> Option<Outcome> {
    let spec = SPECS.iter().find(|s| s.id == id)?;
    let start = Instant::now();
    let mut t = Tally::default();
    match id {
        1 => irreducible_counts(&mut t),
        2 => mangoldt_sums(&mut t),
        3 => oracle_agreement(&mut t),
        4 => bound_correctness(&mut t, fault),
        5 => weil_suite(&mut t),
        6 => moment_suite(&mut t),
        7 => representation_counts(&mut t, fault),
        8 => character_identities(&mut t),
        9 => asymptotics(&mut t),
        _ => unreachable!(),
    }
    Some(Outcome {
        id,
        name: spec.name,
        module: spec.module,
        assertions: t.assertions,
        failed: t.failed,
        failures: t.failures,
        notes: t.notes,
        elapsed_ms: start.elapsed().as_millis() as u64,
        budget_ms: spec.budget_s * 1000,
    })
}

pub fn run_all(fault: Fault) -> Vec<Outcome> {
    (1..=CRITERIA).filter_map(|id| run_criterion(id, fault)).collect()
}

fn base_field(q: u64) -> Result<BaseField> {
    BaseField::new(FieldParams::new(q)?)
}

fn prime_powers_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&q| arith::prime_power(q).is_some()).collect()
}

/// `(q, n)` with `q` a prime power, `n >= min_n` and `q^n <= max_size`.
fn fields_up_to(max_size: u64, min_n: usize) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    let q_max = if min_n >= 2 { max_size.isqrt() } else { max_size };
    for q in prime_powers_up_to(q_max) {
        let mut n = min_n.max(1);
        while arith::checked_pow(q, n as u32).is_some_and(|s| s <= max_size) {
            out.push((q, n));
            n += 1;
        }
    }
    out
}

/// Catalogs keyed by `(q, d)`, shared across extension degrees.
#[derive(Default)]
struct CatalogCache {
    fields: HashMap<u64, Arc<BaseField>>,
    catalogs: HashMap<(u64, usize), Arc<PolyCatalog>>,
}

impl CatalogCache {
    fn get(&mut self, q: u64, d: usize) -> Result<Arc<PolyCatalog>> {
        if let Some(c) = self.catalogs.get(&(q, d)) {
            return Ok(c.clone());
        }
        let field = match self.fields.get(&q) {
            Some(f) => f.clone(),
            None => {
                let f = Arc::new(base_field(q)?);
                self.fields.insert(q, f.clone());
                f
            }
        };
        let c = Arc::new(PolyCatalog::build(&field, d, Caps::default().max_enumeration)?);
        self.catalogs.insert((q, d), c.clone());
        Ok(c)
    }
}

const COUNT_QS: [u64; 5] = [2, 3, 4, 5, 7];
const COUNT_MAX: u64 = 1_000_000;

fn count_grid() -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    for q in COUNT_QS {
        for d in 1..=6usize {
            if arith::checked_pow(q, d as u32).is_some_and(|s| s <= COUNT_MAX) {
                out.push((q, d));
            }
        }
    }
    out
}

fn irreducible_counts(t: &mut Tally) {
    let grid = count_grid();
    for &(q, d) in &grid {
        let Some(field) = t.ok(base_field(q), || format!("F_{q}")) else { continue };
        let Some(found) = t.ok(enumerate_irreducibles(&field, d, COUNT_MAX), || {
            format!("enumerate I_{d} over F_{q}")
        }) else {
            continue;
        };
        let Some(expected) = t.ok(count_irreducibles(q, d as u32), || format!("#I_{d}(F_{q})")) else {
            continue;
        };
        t.check(BigUint::from(found.len()) == expected, || {
            format!("q={q} d={d}: enumerated {} irreducibles, formula gives {expected}", found.len())
        });
        t.check(found.iter().all(|h| h.degree() == Some(d) && h.is_monic()), || {
            format!("q={q} d={d}: enumeration returned a non-monic or wrong-degree polynomial")
        });
        t.check(found.windows(2).all(|w| w[0].index(&field) < w[1].index(&field)), || {
            format!("q={q} d={d}: enumeration is not strictly increasing")
        });
    }
    t.note(format!("{} (q, d) cells", grid.len()));
}

fn mangoldt_sums(t: &mut Tally) {
    let grid = count_grid();
    for &(q, d) in &grid {
        let qd = q.pow(d as u32);
        let Some(field) = t.ok(base_field(q), || format!("F_{q}")) else { continue };
        let Some(cat) = t.ok(PolyCatalog::build(&field, d, COUNT_MAX), || {
            format!("P_{d} over F_{q}")
        }) else {
            continue;
        };
        t.check(cat.lambda_total() == qd, || {
            format!("q={q} d={d}: sum of Lambda over P_d is {}, expected {qd}", cat.lambda_total())
        });
        if let Some(expected) = t.ok(count_prime_powers(q, d as u32), || format!("#P_{d}(F_{q})")) {
            t.check(BigUint::from(cat.prime_powers.len()) == expected, || {
                format!("q={q} d={d}: #P_d is {}, expected {expected}", cat.prime_powers.len())
            });
        }
        // The same identity from the counting formula alone.
        let by_formula: Option<u64> = arith::divisors(d as u64)
            .into_iter()
            .map(|e| {
                count_irreducibles(q, e as u32)
                    .ok()
                    .and_then(|c| c.to_u64())
                    .map(|c| c * e)
            })
            .sum();
        t.check(by_formula == Some(qd), || {
            format!("q={q} d={d}: sum over e | d of e #I_e is {by_formula:?}, expected {qd}")
        });
        t.check(
            cat.prime_powers.iter().all(|w| w.lambda as usize * w.k as usize == d && w.lambda as usize == w.base.degree().unwrap_or(0)),
            || format!("q={q} d={d}: a weight disagrees with the degree of its base"),
        );
    }
    t.note(format!("{} (q, d) cells", grid.len()));
}

/// The first, second and last irreducible of degree `n`, deduplicated.
fn modulus_choices(field: &BaseField, n: usize) -> Result<Vec<FqPoly>> {
    let all = enumerate_irreducibles(field, n, Caps::default().max_enumeration)?;
    let mut picks: Vec<FqPoly> = Vec::new();
    for i in [0, 1, all.len().saturating_sub(1)] {
        if let Some(f) = all.get(i) {
            if !picks.contains(f) {
                picks.push(f.clone());
            }
        }
    }
    Ok(picks)
}

fn oracle_agreement(t: &mut Tally) {
    let caps = Caps::default();
    let mut cache = CatalogCache::default();
    let mut graphs = 0u64;
    for (q, n) in fields_up_to(crate::cayley::ORACLE_MAX_FIELD, 2) {
        let Some(field) = t.ok(base_field(q), || format!("F_{q}")) else { continue };
        let Some(moduli) = t.ok(modulus_choices(&field, n), || format!("moduli q={q} n={n}")) else {
            continue;
        };
        t.check(moduli.len() >= 2 || q == 2 && n == 2, || {
            format!("q={q} n={n}: no alternative modulus available")
        });
        for f in moduli {
            let Some(ctx) = t.ok(FieldContext::new(field.params().clone(), n, Some(f.clone())), || {
                format!("field q={q} n={n} f={f}")
            }) else {
                continue;
            };
            let Some(dlog) = t.ok(DlogTable::build(&ctx, &caps), || format!("dlog q={q} n={n}")) else {
                continue;
            };
            for d in 1..n {
                let Some(cat) = t.ok(cache.get(q, d), || format!("P_{d} over F_{q}")) else { continue };
                let Some(gens) = t.ok(GeneratorSet::build(&ctx, &cat), || format!("E q={q} n={n} d={d}")) else {
                    continue;
                };
                compare_with_oracle(t, &gens, &ctx, &dlog, &format!("q={q} n={n} d={d} f={f}"));
                graphs += 1;
            }
        }
    }
    // A generator trapped in a proper subgroup: gamma^5 in F_16 has order 3.
    if let Some(ctx) = t.ok(FieldContext::with_q(2, 4, None), || "F_16".into()) {
        if let Some(dlog) = t.ok(DlogTable::build(&ctx, &caps), || "dlog F_16".into()) {
            if let Some(gens) = t.ok(GeneratorSet::from_values(&ctx, &[dlog.exp(&ctx, 5)]), || "toy set".into()) {
                let r = t.ok(bfs_from_identity(&gens, &ctx, &dlog, Stepping::FollowEdges), || "toy bfs".into());
                t.check(r.is_some_and(|r| !r.connected && r.unreached_witness.is_some()), || {
                    "subgroup generator on F_16 must leave the graph disconnected".into()
                });
                compare_with_oracle(t, &gens, &ctx, &dlog, "F_16 with generator gamma^5");
                graphs += 1;
            }
        }
    }
    t.note(format!("{graphs} graphs checked against the oracle"));
}

fn compare_with_oracle(t: &mut Tally, gens: &GeneratorSet, ctx: &FieldContext, dlog: &DlogTable, label: &str) {
    let edges = t.ok(bfs_from_identity(gens, ctx, dlog, Stepping::FollowEdges), || format!("{label}: bfs"));
    let products = t.ok(bfs_from_identity(gens, ctx, dlog, Stepping::Products), || format!("{label}: bfs"));
    let oracle = t.ok(all_pairs_diameter_oracle(gens, ctx), || format!("{label}: oracle"));
    let (Some(edges), Some(products), Some(oracle)) = (edges, products, oracle) else { return };
    t.check(edges.diameter == oracle.diameter, || {
        format!("{label}: BFS diameter {:?}, oracle {:?}", edges.diameter, oracle.diameter)
    });
    t.check(edges.connected == oracle.diameter.is_some(), || {
        format!("{label}: BFS connectivity {} disagrees with the oracle", edges.connected)
    });
    t.check(products.diameter == edges.diameter, || {
        format!(
            "{label}: stepping by products gives {:?}, following edges gives {:?}",
            products.diameter, edges.diameter
        )
    });
    t.check(oracle.out_degree == Some(gens.distinct_count), || {
        format!("{label}: out-degree {:?}, expected {}", oracle.out_degree, gens.distinct_count)
    });
    t.check(oracle.uniform_eccentricity, || format!("{label}: eccentricity differs between vertices"));
}

/// Cells with `q^n - 1 <= max_order`, `1 <= d < n` and `n < q^(d/2) + 1`.
pub fn bound_cells(max_order: u64) -> Vec<(u64, usize, usize)> {
    let mut out = Vec::new();
    for (q, n) in fields_up_to(max_order + 1, 2) {
        for d in 1..n {
            if arith::below_half_power_plus_one(n as u64, q, d as u32) {
                out.push((q, n, d));
            }
        }
    }
    out
}

const BOUND_MAX_ORDER: u64 = 1_000_000;

fn bound_correctness(t: &mut Tally, fault: Fault) {
    let anchors = [
        ("baseline bound at (5, 5, 2)", baseline_bound(5, 5, 2), 37.06),
        ("improved bound at (5, 5, 2)", fault.improved(5, 5, 2), 37.44),
        ("linear improved bound at (11, 3, 1)", improved_linear_bound(11, 3), 9.20),
    ];
    for (name, b, want) in anchors {
        t.check(b.value().is_some_and(|v| (v - want).abs() <= 0.01), || {
            format!("{name} is {:?}, expected about {want}", b.value())
        });
    }

    let caps = Caps::default();
    let cells = bound_cells(BOUND_MAX_ORDER);
    let mut cache = CatalogCache::default();
    let mut worst: [(f64, String); 3] = Default::default();
    let mut by_field: Vec<(u64, usize, Vec<usize>)> = Vec::new();
    for &(q, n, d) in &cells {
        match by_field.last_mut() {
            Some((fq, fn_, ds)) if *fq == q && *fn_ == n => ds.push(d),
            _ => by_field.push((q, n, vec![d])),
        }
    }
    for (q, n, ds) in by_field {
        let Some(ctx) = t.ok(FieldContext::with_q(q, n, None), || format!("field q={q} n={n}")) else {
            continue;
        };
        let Some(dlog) = t.ok(DlogTable::build(&ctx, &caps), || format!("dlog q={q} n={n}")) else {
            continue;
        };
        for d in ds {
            let label = format!("q={q} n={n} d={d}");
            let Some(cat) = t.ok(cache.get(q, d), || format!("{label}: catalog")) else { continue };
            let Some(gens) = t.ok(GeneratorSet::build(&ctx, &cat), || format!("{label}: generators")) else {
                continue;
            };
            let Some(r) = t.ok(bfs_from_identity(&gens, &ctx, &dlog, Stepping::FollowEdges), || {
                format!("{label}: bfs")
            }) else {
                continue;
            };
            t.check(r.connected, || format!("{label}: graph is disconnected"));
            let Some(dm) = r.diameter else { continue };
            let (qq, nn, dd) = (q, n as u64, d as u64);
            let bounds = [
                baseline_bound(qq, nn, dd),
                fault.improved(qq, nn, dd),
                if d == 1 { improved_linear_bound(qq, nn) } else { Bound::NotApplicable("d > 1") },
            ];
            for (i, b) in bounds.iter().enumerate() {
                if let Some(v) = b.value() {
                    t.check(dm as f64 <= v, || {
                        format!("{label}: diameter {dm} exceeds {} = {v:.4}", ["bound_lwwz", "bound_thm1", "bound_thm2"][i])
                    });
                    let ratio = dm as f64 / v;
                    if ratio > worst[i].0 {
                        worst[i] = (ratio, format!("{label} (diameter {dm}, bound {v:.3})"));
                    }
                }
            }
            if (q, n, d) == (5, 5, 2) || (q, n, d) == (11, 3, 1) {
                t.note(format!("anchor {label}: diameter {dm}"));
            }
        }
    }
    t.note(format!("{} cells with q^n - 1 <= {BOUND_MAX_ORDER}", cells.len()));
    for (name, (ratio, at)) in ["bound_lwwz", "bound_thm1", "bound_thm2"].iter().zip(&worst) {
        if !at.is_empty() {
            t.note(format!("tightest {name}: ratio {ratio:.3} at {at}"));
        }
    }
}

const WEIL_MAX_FIELD: u64 = 100_000;

fn weil_suite(t: &mut Tally) {
    let caps = Caps::default();
    let mut cache = CatalogCache::default();
    let mut cells = 0u64;
    let mut worst = (0.0f64, String::new());
    for (q, n) in fields_up_to(WEIL_MAX_FIELD, 2) {
        let Some(ctx) = t.ok(FieldContext::with_q(q, n, None), || format!("field q={q} n={n}")) else {
            continue;
        };
        let Some(dlog) = t.ok(DlogTable::build(&ctx, &caps), || format!("dlog q={q} n={n}")) else {
            continue;
        };
        for d in 1..n {
            let label = format!("q={q} n={n} d={d}");
            let Some(cat) = t.ok(cache.get(q, d), || format!("{label}: catalog")) else { continue };
            let Some(w) = t.ok(weil_report(&ctx, &cat, &dlog), || format!("{label}: weil")) else {
                continue;
            };
            t.check(w.pass, || {
                format!("{label}: max |S| = {:.4} exceeds (n-1) q^(d/2) = {:.4}", w.max_abs_s, w.bound)
            });
            t.check(w.principal_ok, || format!("{label}: S(chi_0) = {}, expected q^d", w.principal_s));
            if w.ratio > worst.0 {
                worst = (w.ratio, label);
            }
            cells += 1;
        }
    }
    t.note(format!("{cells} cells with q^n <= {WEIL_MAX_FIELD}"));
    t.note(format!("largest ratio {:.4} at {}", worst.0, worst.1));
}

const MOMENT_MAX_FIELD: u64 = 10_000;
const MOMENT_MAX_TUPLES: f64 = 1e8;

fn moment_suite(t: &mut Tally) {
    let caps = Caps::default();
    let mut cache = CatalogCache::default();
    let mut cells = 0u64;
    for (q, n) in fields_up_to(MOMENT_MAX_FIELD, 2) {
        let mut ctx_dlog = None;
        for d in 1..n {
            let m = crate::bounds::moment_exponent(n as u64, d as u64);
            let Some(count) = t.ok(count_irreducibles(q, d as u32), || format!("#I_{d}(F_{q})")) else {
                continue;
            };
            let tuples = count.to_f64().unwrap_or(f64::INFINITY).powi(2 * m as i32);
            if tuples > MOMENT_MAX_TUPLES {
                continue;
            }
            if ctx_dlog.is_none() {
                let Some(ctx) = t.ok(FieldContext::with_q(q, n, None), || format!("field q={q} n={n}")) else {
                    break;
                };
                let Some(dlog) = t.ok(DlogTable::build(&ctx, &caps), || format!("dlog q={q} n={n}")) else {
                    break;
                };
                ctx_dlog = Some((ctx, dlog));
            }
            let (ctx, dlog) = ctx_dlog.as_ref().unwrap();
            let label = format!("q={q} n={n} d={d} m={m}");
            let Some(cat) = t.ok(cache.get(q, d), || format!("{label}: catalog")) else { continue };
            let Some(r) = t.ok(moment_report(ctx, &cat, dlog, true), || format!("{label}: moment")) else {
                continue;
            };
            t.check(r.float_rel_error <= crate::charsum::FLOAT_REL_TOL, || {
                format!("{label}: sum |T|^(2m) = {} is off by relative {:.3e}", r.lhs, r.float_rel_error)
            });
            t.check(r.collisions == r.multiset_count, || {
                format!("{label}: {} log collisions, {} multiset matches", r.collisions, r.multiset_count)
            });
            let order = BigUint::from(dlog.order());
            t.check(r.exact_lhs == Some(&order * r.multiset_count), || {
                format!("{label}: exact moment {:?} differs from (q^n - 1) N", r.exact_lhs)
            });
            t.check(BigUint::from(r.collisions) <= r.bound, || {
                format!("{label}: N = {} exceeds m! (#I_d)^m = {}", r.collisions, r.bound)
            });
            cells += 1;
        }
    }
    t.note(format!("{cells} cells with q^n <= {MOMENT_MAX_FIELD} and (#I_d)^(2m) <= 1e8"));
}

fn representation_counts(t: &mut Tally, fault: Fault) {
    let caps = Caps::default();
    let runs: [(u64, usize, usize, Bound); 2] = [
        (5, 5, 2, fault.improved(5, 5, 2)),
        (11, 3, 1, improved_linear_bound(11, 3)),
    ];
    for (q, n, d, bound) in runs {
        let label = format!("q={q} n={n} d={d}");
        let Some(v) = bound.value() else {
            t.check(false, || format!("{label}: bound not applicable"));
            continue;
        };
        let k = v.ceil() as usize;
        let Some(ctx) = t.ok(FieldContext::with_q(q, n, None), || format!("{label}: field")) else { continue };
        let Some(dlog) = t.ok(DlogTable::build(&ctx, &caps), || format!("{label}: dlog")) else { continue };
        let Some(field) = t.ok(base_field(q), || format!("F_{q}")) else { continue };
        let Some(cat) = t.ok(PolyCatalog::build(&field, d, caps.max_enumeration), || format!("{label}: catalog")) else {
            continue;
        };
        let counts = if d == 1 {
            rep_count_plain(&ctx, &cat, &dlog, k)
        } else {
            rep_count_weighted(&ctx, &cat, &dlog, k)
        };
        let Some(counts) = t.ok(counts, || format!("{label}: counts at k={k}")) else { continue };
        let s = summarize(&ctx, &cat, &counts);
        let which = if d == 1 { "N_k" } else { "M_k" };
        t.check(s.all_positive, || format!("{label}: {which}(v) = 0 for some v at k = {k}, min {}", s.min));
        t.check(s.total_matches, || {
            format!("{label}: {which} total {} differs from the mass formula {}", s.total, s.expected_total)
        });
        t.check(s.deviation_ok != Some(false), || {
            format!("{label}: {which} deviates from its mean by more than the character-sum bound")
        });
        let Some(gens) = t.ok(GeneratorSet::build(&ctx, &cat), || format!("{label}: generators")) else {
            continue;
        };
        if let Some(r) = t.ok(bfs_from_identity(&gens, &ctx, &dlog, Stepping::FollowEdges), || format!("{label}: bfs")) {
            t.check(r.diameter.is_some_and(|dm| dm as usize <= k), || {
                format!("{label}: every v is a product of {k} generators, yet BFS diameter is {:?}", r.diameter)
            });
            t.note(format!("{label}: {which} > 0 everywhere at k = {k}, min {}, BFS diameter {:?}", s.min, r.diameter));
        }
    }
}

const CHARACTER_MAX_FIELD: u64 = 512;

fn character_identities(t: &mut Tally) {
    let caps = Caps::default();
    let mut fields = 0u64;
    let mut checks = 0u64;
    for (q, n) in fields_up_to(CHARACTER_MAX_FIELD, 2) {
        let label = format!("q={q} n={n}");
        let Some(ctx) = t.ok(FieldContext::with_q(q, n, None), || format!("{label}: field")) else { continue };
        let Some(dlog) = t.ok(DlogTable::build(&ctx, &caps), || format!("{label}: dlog")) else { continue };
        let o = check_orthogonality(&dlog);
        t.check(o.pass, || {
            format!("{label}: orthogonality error {:.3e} / {:.3e}", o.principal_error, o.max_nonprincipal)
        });
        if let Some(m) = t.ok(check_multiplicativity(&ctx, &dlog), || format!("{label}: multiplicativity")) {
            t.check(m.exhaustive, || format!("{label}: multiplicativity was sampled, not exhaustive"));
            t.check(m.pass, || format!("{label}: chi(xy) != chi(x) chi(y), error {:.3e}", m.max_error));
            checks += m.checks;
        }
        fields += 1;
    }
    t.note(format!("{fields} fields, {checks} (x, y, j) triples"));
}

fn asymptotics(t: &mut Tally) {
    for i in 1..=100 {
        let theta = 0.5 * i as f64 / 101.0;
        match asymptotic_constants(theta) {
            Ok(c) => t.check(c.improved < c.old, || {
                format!("theta={theta}: improved {} not below old {}", c.improved, c.old)
            }),
            Err(e) => t.check(false, || format!("theta={theta}: {e}")),
        }
    }
    for (theta, improved, old) in [(0.25, 3.0, 4.0), (0.4, 6.0, 10.0)] {
        let c = asymptotic_constants(theta);
        t.check(
            c.as_ref().is_ok_and(|c| (c.improved - improved).abs() < 1e-12 && (c.old - old).abs() < 1e-12),
            || format!("theta={theta}: got {c:?}, expected {improved} and {old}"),
        );
    }
    for theta in [0.0, 0.5, -0.1, 0.7, f64::NAN] {
        t.check(asymptotic_constants(theta).is_err(), || format!("theta={theta} must be rejected"));
    }
}
