//! Exact counts of product representations `v = e_1 ... e_k`.
//!
//! Counts are vectors over discrete logs, built by repeated convolution with
//! a weighted generator list. All accumulation is in big integers.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::dlog::DlogTable;
use crate::bounds::moment_exponent;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::ff::{FieldContext, FqPoly};
use crate::poly_enum::PolyCatalog;

/// Counts indexed by discrete log of the represented element.
#[derive(Debug, Clone)]
pub struct RepCountVector {
    pub k: usize,
    pub weighted: bool,
    pub counts: Vec<BigUint>,
}

impl RepCountVector {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn min(&self) -> BigUint {
        self.counts.iter().min().cloned().unwrap_or_default()
    }

    pub fn max(&self) -> BigUint {
        self.counts.iter().max().cloned().unwrap_or_default()
    }

    pub fn all_positive(&self) -> bool {
        self.counts.iter().all(|c| !c.is_zero())
    }

    /// Count at the element with discrete log `t`.
    pub fn at(&self, t: u64) -> &BigUint {
        &self.counts[t as usize]
    }
}

/// One convolution step: `out[t + s] += w * cur[t]`.
pub fn convolve(cur: &[BigUint], steps: &[(u64, u64)]) -> Vec<BigUint> {
    let n = cur.len();
    let mut out = vec![BigUint::zero(); n];
    for (t, c) in cur.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for &(s, w) in steps {
            let idx = (t + s as usize) % n;
            if w == 1 {
                out[idx] += c;
            } else {
                out[idx] += c * w;
            }
        }
    }
    out
}

fn delta(order: u64) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); order as usize];
    v[0] = BigUint::one();
    v
}

fn steps_for<'a>(
    ctx: &FieldContext,
    dlog: &DlogTable,
    items: impl IntoIterator<Item = (&'a FqPoly, u64)>,
) -> Result<Vec<(u64, u64)>> {
    items
        .into_iter()
        .map(|(g, w)| Ok((dlog.log(ctx, &ctx.evaluate_at_alpha(g)?)?, w)))
        .collect()
}

fn check_order(ctx: &FieldContext, caps: &Caps) -> Result<()> {
    if ctx.group_order() > caps.max_order {
        return Err(Error::cap("max_order", caps.max_order, ctx.group_order()));
    }
    Ok(())
}

/// `M_k(v)`: `Lambda`-weighted count of `v = g_1 .. g_{k-2m} h_1 .. h_{2m}`
/// evaluated at `alpha`, with `g_i in P_d`, `h_j in I_d`, `m = ceil(n/d) - 1`.
pub fn rep_count_weighted(
    ctx: &FieldContext,
    catalog: &PolyCatalog,
    dlog: &DlogTable,
    k: usize,
) -> Result<RepCountVector> {
    let m = moment_exponent(ctx.n() as u64, catalog.d as u64) as usize;
    if k <= 2 * m {
        return Err(Error::Precondition(format!("need k > 2m = {}, got k = {k}", 2 * m)));
    }
    let weighted = steps_for(
        ctx,
        dlog,
        catalog.prime_powers.iter().map(|w| (&w.poly, w.lambda as u64)),
    )?;
    let plain = steps_for(ctx, dlog, catalog.irreducibles.iter().map(|h| (h, 1)))?;
    let mut cur = delta(dlog.order());
    for _ in 0..k - 2 * m {
        cur = convolve(&cur, &weighted);
    }
    for _ in 0..2 * m {
        cur = convolve(&cur, &plain);
    }
    Ok(RepCountVector {
        k,
        weighted: true,
        counts: cur,
    })
}

/// Unweighted count of `v = g_1 .. g_k (alpha)` with `g_i in P_d`. For
/// `d = 1` this is `N_k(v)`, the number of `(u_1..u_k)` in `F_q^k` with
/// `(u_1 + alpha) .. (u_k + alpha) = v`.
pub fn rep_count_plain(
    ctx: &FieldContext,
    catalog: &PolyCatalog,
    dlog: &DlogTable,
    k: usize,
) -> Result<RepCountVector> {
    let steps = steps_for(ctx, dlog, catalog.prime_powers.iter().map(|w| (&w.poly, 1)))?;
    let mut cur = delta(dlog.order());
    for _ in 0..k {
        cur = convolve(&cur, &steps);
    }
    Ok(RepCountVector {
        k,
        weighted: false,
        counts: cur,
    })
}

pub fn rep_count_mk(ctx: &FieldContext, d: usize, k: usize, caps: &Caps) -> Result<RepCountVector> {
    check_order(ctx, caps)?;
    if d == 0 || d >= ctx.n() {
        return Err(Error::Precondition("need 1 <= d < n".into()));
    }
    let dlog = DlogTable::build(ctx, caps)?;
    let catalog = PolyCatalog::build(ctx.base(), d, caps.max_enumeration)?;
    rep_count_weighted(ctx, &catalog, &dlog, k)
}

pub fn rep_count_nk(ctx: &FieldContext, k: usize, caps: &Caps) -> Result<RepCountVector> {
    check_order(ctx, caps)?;
    if ctx.n() < 2 {
        return Err(Error::Precondition("need n >= 2".into()));
    }
    let dlog = DlogTable::build(ctx, caps)?;
    let catalog = PolyCatalog::build(ctx.base(), 1, caps.max_enumeration)?;
    rep_count_plain(ctx, &catalog, &dlog, k)
}

/// Summary of a count vector against its closed-form mass and the
/// character-sum deviation bound around the mean.
#[derive(Debug, Clone, Serialize)]
pub struct RepCountSummary {
    pub q: u64,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub m: u64,
    pub weighted: bool,
    pub min: String,
    pub max: String,
    pub mean: f64,
    pub all_positive: bool,
    pub total: String,
    pub expected_total: String,
    pub total_matches: bool,
    /// The deviation bound, as a float, when it applies (`k >= 2m`).
    pub deviation_bound: Option<f64>,
    /// `max_v |count(v) - mean| <= deviation_bound`, decided exactly.
    pub deviation_ok: Option<bool>,
}

fn pow_big(base: u64, e: u64) -> BigUint {
    BigUint::from(base).pow(e as u32)
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// Summarize `counts`. Weighted vectors use `m = ceil(n/d) - 1` and the
/// bound `m! (n-1)^(k-2m) q^(d(k/2-m)) (#I_d)^m`; unweighted vectors with
/// `d = 1` use `m = n - 1` and `m! (n-1)^(k-2m) q^(k/2)`.
pub fn summarize(ctx: &FieldContext, catalog: &PolyCatalog, v: &RepCountVector) -> RepCountSummary {
    let (q, n, d, k) = (ctx.q(), ctx.n() as u64, catalog.d as u64, v.k as u64);
    let order = v.counts.len() as u64;
    let i_d = catalog.irreducibles.len() as u64;
    let total = v.total();

    let (m, expected_total) = if v.weighted {
        let m = moment_exponent(n, d);
        (m, pow_big(q, d * (k - 2 * m)) * pow_big(i_d, 2 * m))
    } else {
        (n - 1, pow_big(catalog.prime_powers.len() as u64, k))
    };

    // Squared deviation bound B^2 as (num, q-exponent) so that every term
    // stays integral: B^2 = (m!)^2 (n-1)^(2(k-2m)) q^(e) [ (#I_d)^(2m) ].
    let bound_sq = if v.weighted && k >= 2 * m {
        Some(
            factorial(m).pow(2)
                * pow_big(n - 1, 2 * (k - 2 * m))
                * pow_big(q, d * (k - 2 * m))
                * pow_big(i_d, 2 * m),
        )
    } else if !v.weighted && d == 1 && k >= 2 * m {
        Some(factorial(m).pow(2) * pow_big(n - 1, 2 * (k - 2 * m)) * pow_big(q, k))
    } else {
        None
    };

    // |c(v) - total/order| <= B  <=>  (c(v) order - total)^2 <= order^2 B^2
    let deviation_ok = bound_sq.as_ref().map(|b2| {
        let rhs = BigInt::from(order).pow(2) * BigInt::from(b2.clone());
        let total_i = BigInt::from(total.clone());
        v.counts.iter().all(|c| {
            let diff = BigInt::from(c.clone()) * BigInt::from(order) - &total_i;
            &diff * &diff <= rhs
        })
    });
    let deviation_bound = bound_sq.as_ref().map(|b2| b2.to_f64().unwrap_or(f64::INFINITY).sqrt());

    RepCountSummary {
        q,
        n: n as usize,
        d: d as usize,
        k: k as usize,
        m,
        weighted: v.weighted,
        min: v.min().to_string(),
        max: v.max().to_string(),
        mean: total.to_f64().unwrap_or(f64::INFINITY) / order as f64,
        all_positive: v.all_positive(),
        total: total.to_string(),
        total_matches: total == expected_total,
        expected_total: expected_total.to_string(),
        deviation_bound,
        deviation_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(q: u64, n: usize, d: usize) -> (FieldContext, DlogTable, PolyCatalog) {
        let ctx = FieldContext::with_q(q, n, None).unwrap();
        let caps = Caps::default();
        let dlog = DlogTable::build(&ctx, &caps).unwrap();
        let cat = PolyCatalog::build(ctx.base(), d, caps.max_enumeration).unwrap();
        (ctx, dlog, cat)
    }

    #[test]
    fn single_step_marks_linear_values() {
        let (ctx, dlog, cat) = setup(5, 3, 1);
        let v = rep_count_plain(&ctx, &cat, &dlog, 1).unwrap();
        for t in 0..dlog.order() {
            let x = dlog.exp(&ctx, t);
            let is_linear = ctx.sub(&x, &ctx.alpha()).coeffs()[1..].iter().all(|c| c.is_zero());
            assert_eq!(v.at(t).is_one(), is_linear);
            assert!(v.at(t) <= &BigUint::one());
        }
    }

    /// Brute-force enumeration of all k-tuples over F_q.
    #[test]
    fn nk_matches_tuple_enumeration() {
        let (ctx, dlog, cat) = setup(3, 2, 1);
        let k = 3;
        let v = rep_count_plain(&ctx, &cat, &dlog, k).unwrap();
        let mut brute = vec![0u64; dlog.order() as usize];
        for code in 0..27u64 {
            let us = [code % 3, code / 3 % 3, code / 9];
            let mut x = ctx.one();
            for u in us {
                let lin = ctx.add(&ctx.alpha(), &ctx.from_code(u).unwrap());
                x = ctx.mul(&x, &lin);
            }
            brute[dlog.log(&ctx, &x).unwrap() as usize] += 1;
        }
        let got: Vec<u64> = v.counts.iter().map(|c| c.to_u64().unwrap()).collect();
        assert_eq!(got, brute);
        let s = summarize(&ctx, &cat, &v);
        assert!(s.total_matches);
        assert_eq!(s.total, "27");
    }

    #[test]
    fn weighted_mass_formula() {
        let (ctx, dlog, cat) = setup(3, 3, 2);
        // m = ceil(3/2) - 1 = 1
        let v = rep_count_weighted(&ctx, &cat, &dlog, 4).unwrap();
        let s = summarize(&ctx, &cat, &v);
        assert_eq!(s.m, 1);
        assert!(s.total_matches, "{s:?}");
        assert_eq!(s.deviation_ok, Some(true));
        assert!(rep_count_weighted(&ctx, &cat, &dlog, 2).is_err());
    }
}
