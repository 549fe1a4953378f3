//! The directed Cayley graph on `F_{q^n}^*` with `u -> v` iff `u/v` lies in
//! the evaluation set `E(alpha, d) = { g(alpha) : g in P_d }`.
//!
//! Right multiplication by any `w` is an automorphism, so `dist(u, v) =
//! dist(1, v/u)` and one BFS from the identity yields the diameter. Vertices
//! are indexed by discrete logarithm, which turns each step into an addition
//! of exponents modulo `q^n - 1`.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::Serialize;

use crate::charsum::DlogTable;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::ff::{ExtElem, FieldContext, FqPoly};
use crate::poly_enum::{PolyCatalog, WeightedPoly};

/// Largest field size accepted by [`all_pairs_diameter_oracle`].
pub const ORACLE_MAX_FIELD: u64 = 512;

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorEntry {
    pub value: ExtElem,
    pub code: u64,
    pub multiplicity: u32,
    pub total_lambda: u64,
    pub sources: Vec<WeightedPoly>,
}

/// `E(alpha, d)` with multiplicities, grouped by value in code order.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorSet {
    pub d: usize,
    pub elements: Vec<GeneratorEntry>,
    pub distinct_count: usize,
    /// `#P_d`, the out-degree counted with multiplicity.
    pub regularity: u64,
}

impl GeneratorSet {
    /// Evaluate every `g` in `P_d` at `alpha`.
    pub fn build(ctx: &FieldContext, catalog: &PolyCatalog) -> Result<Self> {
        let d = catalog.d;
        if d == 0 || d >= ctx.n() {
            return Err(Error::Precondition(format!(
                "generators need 1 <= d < n, got d = {d}, n = {}",
                ctx.n()
            )));
        }
        if catalog.q != ctx.q() {
            return Err(Error::Precondition("catalog built over a different F_q".into()));
        }
        let mut groups: BTreeMap<u64, GeneratorEntry> = BTreeMap::new();
        for w in &catalog.prime_powers {
            let value = ctx.evaluate_at_alpha(&w.poly)?;
            let code = ctx.code(&value);
            let entry = groups.entry(code).or_insert_with(|| GeneratorEntry {
                value,
                code,
                multiplicity: 0,
                total_lambda: 0,
                sources: Vec::new(),
            });
            entry.multiplicity += 1;
            entry.total_lambda += w.lambda as u64;
            entry.sources.push(w.clone());
        }
        let elements: Vec<_> = groups.into_values().collect();
        Ok(GeneratorSet {
            d,
            distinct_count: elements.len(),
            regularity: catalog.prime_powers.len() as u64,
            elements,
        })
    }

    /// An arbitrary generator multiset, e.g. a restricted toy set. Entries
    /// carry no source polynomials and unit weights.
    pub fn from_values(ctx: &FieldContext, values: &[ExtElem]) -> Result<Self> {
        let mut groups: BTreeMap<u64, GeneratorEntry> = BTreeMap::new();
        for v in values {
            if v.is_zero() {
                return Err(Error::Precondition("generator values must be nonzero".into()));
            }
            let code = ctx.code(v);
            let entry = groups.entry(code).or_insert_with(|| GeneratorEntry {
                value: v.clone(),
                code,
                multiplicity: 0,
                total_lambda: 0,
                sources: Vec::new(),
            });
            entry.multiplicity += 1;
            entry.total_lambda += 1;
        }
        let elements: Vec<_> = groups.into_values().collect();
        Ok(GeneratorSet {
            d: 0,
            distinct_count: elements.len(),
            regularity: values.len() as u64,
            elements,
        })
    }

    pub fn codes(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements.iter().map(|e| e.code)
    }
}

/// Build `P_d` and evaluate it at `alpha`.
pub fn build_generators(ctx: &FieldContext, d: usize, caps: &Caps) -> Result<GeneratorSet> {
    if d == 0 || d >= ctx.n() {
        return Err(Error::Precondition(format!(
            "generators need 1 <= d < n, got d = {d}, n = {}",
            ctx.n()
        )));
    }
    let catalog = PolyCatalog::build(ctx.base(), d, caps.max_enumeration)?;
    GeneratorSet::build(ctx, &catalog)
}

/// How BFS steps from a vertex `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stepping {
    /// Follow out-edges literally: `v = u * e^-1`, so that `u / v = e`.
    FollowEdges,
    /// Walk by products of generators: `v = u * e`.
    Products,
}

impl Stepping {
    pub fn describe(self) -> &'static str {
        match self {
            Stepping::FollowEdges => "edge u->v iff u/v in E; BFS steps v = u*e^-1",
            Stepping::Products => "edge u->v iff u/v in E; BFS steps v = u*e (reversed graph)",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiameterResult {
    pub q: u64,
    pub n: usize,
    pub d: usize,
    pub modulus: FqPoly,
    pub convention: Stepping,
    pub connected: bool,
    /// `None` when disconnected.
    pub diameter: Option<u32>,
    /// Distance from the identity -> number of vertices at that distance.
    pub distance_histogram: BTreeMap<u32, u64>,
    /// Smallest-code vertex at maximal distance (connected case).
    pub eccentric_vertex: Option<ExtElem>,
    /// Smallest-code vertex not reached from the identity.
    pub unreached_witness: Option<ExtElem>,
    pub distinct_generators: usize,
    pub regularity: u64,
}

/// Level-synchronous BFS on the cyclic group `Z_order` from `0`, stepping
/// `t -> t + s` for every `s` in `steps`. Unreached entries hold `u32::MAX`.
///
/// Each level runs either top-down (expand the frontier) or bottom-up (each
/// unvisited vertex looks for a frontier predecessor and stops at the first
/// hit), whichever is estimated cheaper. Large generator sets make the
/// bottom-up direction win after the first level or two.
pub fn bfs_distances(order: u64, steps: &[u64]) -> Vec<u32> {
    let n = order as usize;
    let mut dist = vec![u32::MAX; n];
    if n == 0 {
        return dist;
    }
    let steps: Vec<usize> = {
        let mut s: Vec<usize> = steps.iter().map(|&s| (s % order) as usize).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    dist[0] = 0;
    let mut frontier = vec![0usize];
    let mut visited = 1usize;
    let mut in_frontier = vec![0u64; n.div_ceil(64)];
    let mut level = 0u32;
    while !frontier.is_empty() && visited < n {
        level += 1;
        let unvisited = n - visited;
        let top_down_cost = frontier.len().saturating_mul(steps.len());
        let probe = steps.len().min(n / frontier.len() + 1);
        let bottom_up_cost = unvisited.saturating_mul(probe) + n / 8;
        let mut next = Vec::new();
        if top_down_cost <= bottom_up_cost {
            for &u in &frontier {
                for &s in &steps {
                    let mut v = u + s;
                    if v >= n {
                        v -= n;
                    }
                    if dist[v] == u32::MAX {
                        dist[v] = level;
                        next.push(v);
                    }
                }
            }
        } else {
            in_frontier.fill(0);
            for &u in &frontier {
                in_frontier[u >> 6] |= 1 << (u & 63);
            }
            for (v, dv) in dist.iter_mut().enumerate() {
                if *dv != u32::MAX {
                    continue;
                }
                for &s in &steps {
                    let u = if v >= s { v - s } else { v + n - s };
                    if in_frontier[u >> 6] >> (u & 63) & 1 == 1 {
                        *dv = level;
                        next.push(v);
                        break;
                    }
                }
            }
        }
        visited += next.len();
        frontier = next;
    }
    dist
}

/// Exact diameter of the Cayley digraph generated by `gens` via one BFS
/// from the identity.
pub fn bfs_from_identity(
    gens: &GeneratorSet,
    ctx: &FieldContext,
    dlog: &DlogTable,
    stepping: Stepping,
) -> Result<DiameterResult> {
    let order = dlog.order();
    let steps = gens
        .codes()
        .map(|c| {
            let t = dlog
                .log_code(c)
                .ok_or_else(|| Error::Precondition("zero generator value".into()))?;
            Ok(match stepping {
                Stepping::Products => t,
                Stepping::FollowEdges => (order - t) % order,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dist = bfs_distances(order, &steps);

    let mut histogram = BTreeMap::new();
    let mut unreached: Option<u64> = None;
    for (t, &dd) in dist.iter().enumerate() {
        if dd == u32::MAX {
            let code = dlog.exp_code(t as u64);
            unreached = Some(unreached.map_or(code, |c| c.min(code)));
        } else {
            *histogram.entry(dd).or_insert(0u64) += 1;
        }
    }
    let connected = unreached.is_none();
    let diameter = connected.then(|| *histogram.keys().next_back().unwrap_or(&0));
    let eccentric_vertex = match diameter {
        Some(max) => dist
            .iter()
            .enumerate()
            .filter(|&(_, &dd)| dd == max)
            .map(|(t, _)| dlog.exp_code(t as u64))
            .min()
            .map(|c| ctx.from_code(c))
            .transpose()?,
        None => None,
    };
    Ok(DiameterResult {
        q: ctx.q(),
        n: ctx.n(),
        d: gens.d,
        modulus: ctx.modulus().clone(),
        convention: stepping,
        connected,
        diameter,
        distance_histogram: histogram,
        eccentric_vertex,
        unreached_witness: unreached.map(|c| ctx.from_code(c)).transpose()?,
        distinct_generators: gens.distinct_count,
        regularity: gens.regularity,
    })
}

/// Build everything needed and compute `D(alpha, d)`.
pub fn diameter(ctx: &FieldContext, d: usize, caps: &Caps) -> Result<DiameterResult> {
    let dlog = DlogTable::build(ctx, caps)?;
    let gens = build_generators(ctx, d, caps)?;
    bfs_from_identity(&gens, ctx, &dlog, Stepping::FollowEdges)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    /// `None` when some ordered pair is unreachable.
    pub diameter: Option<u32>,
    /// Out-degree of every vertex when uniform, else `None`.
    pub out_degree: Option<usize>,
    /// Whether every vertex has the same eccentricity.
    pub uniform_eccentricity: bool,
}

/// Diameter by BFS from every vertex over the explicit edge set
/// `{ (u, v) : u * v^-1 in E }`. Uses field arithmetic only, no dlog table.
pub fn all_pairs_diameter_oracle(gens: &GeneratorSet, ctx: &FieldContext) -> Result<OracleResult> {
    if ctx.size() > ORACLE_MAX_FIELD {
        return Err(Error::Precondition(format!(
            "all-pairs oracle needs q^n <= {ORACLE_MAX_FIELD}, got {}",
            ctx.size()
        )));
    }
    let size = ctx.size() as usize;
    let gen_codes: HashSet<u64> = gens.codes().collect();
    let elems: Vec<ExtElem> = (1..size as u64).map(|c| ctx.from_code(c)).collect::<Result<_>>()?;
    let inverses: Vec<ExtElem> = elems.iter().map(|e| ctx.inv(e)).collect::<Result<_>>()?;
    let m = elems.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, u) in elems.iter().enumerate() {
        for (j, v_inv) in inverses.iter().enumerate() {
            if gen_codes.contains(&ctx.code(&ctx.mul(u, v_inv))) {
                adj[i].push(j);
            }
        }
    }
    let degrees: HashSet<usize> = adj.iter().map(Vec::len).collect();
    let out_degree = (degrees.len() == 1).then(|| *degrees.iter().next().unwrap());

    let mut eccentricities = Vec::with_capacity(m);
    let mut dist = vec![u32::MAX; m];
    let mut queue = VecDeque::new();
    for src in 0..m {
        dist.fill(u32::MAX);
        dist[src] = 0;
        queue.clear();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        eccentricities.push(dist.iter().copied().max().unwrap_or(0));
    }
    let uniform_eccentricity = eccentricities.windows(2).all(|w| w[0] == w[1]);
    let worst = eccentricities.iter().copied().max().unwrap_or(0);
    Ok(OracleResult {
        diameter: (worst != u32::MAX).then_some(worst),
        out_degree,
        uniform_eccentricity,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Connectivity {
    pub connected: bool,
    pub witness: Option<ExtElem>,
}

pub fn connectivity_of(
    gens: &GeneratorSet,
    ctx: &FieldContext,
    dlog: &DlogTable,
) -> Result<Connectivity> {
    let r = bfs_from_identity(gens, ctx, dlog, Stepping::FollowEdges)?;
    Ok(Connectivity {
        connected: r.connected,
        witness: r.unreached_witness,
    })
}

/// Whether `G(alpha, d)` is strongly connected, with an unreached vertex as
/// witness otherwise.
pub fn connectivity_check(ctx: &FieldContext, d: usize, caps: &Caps) -> Result<Connectivity> {
    let dlog = DlogTable::build(ctx, caps)?;
    let gens = build_generators(ctx, d, caps)?;
    connectivity_of(&gens, ctx, &dlog)
}
