//! Multiplicative characters and the sums `S(chi)`, `T(chi)`.
//!
//! With a primitive `gamma`, `chi_j(gamma^t) = exp(2 pi i j t / (q^n - 1))`.
//! A sum `sum_x w(x) chi_j(x)` over all `j` is therefore one DFT of the
//! weight vector indexed by discrete logarithm.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::Serialize;

use super::dlog::DlogTable;
use crate::bounds::moment_exponent;
use crate::cayley::GeneratorSet;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::ff::{ExtElem, FieldContext, FqPoly};
use crate::poly_enum::{count_irreducibles_u64, PolyCatalog};

/// Relative tolerance for floating-point checks of exact identities.
pub const FLOAT_REL_TOL: f64 = 1e-6;

/// The character `chi_index` of the cyclic group of order `order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Character {
    pub index: u64,
    pub order: u64,
}

impl Character {
    pub fn new(index: u64, order: u64) -> Self {
        Character {
            index: index % order,
            order,
        }
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// `chi(gamma^t)`.
    #[inline]
    pub fn at_exponent(&self, t: u64) -> Complex64 {
        let r = (self.index as u128 * t as u128 % self.order as u128) as f64;
        Complex64::from_polar(1.0, TAU * r / self.order as f64)
    }

    pub fn eval(&self, ctx: &FieldContext, dlog: &DlogTable, x: &ExtElem) -> Result<Complex64> {
        Ok(self.at_exponent(dlog.log(ctx, x)?))
    }
}

/// Weight vector over discrete logs: `w[log g(alpha)] += weight`.
pub fn log_weights<'a>(
    ctx: &FieldContext,
    dlog: &DlogTable,
    items: impl IntoIterator<Item = (&'a FqPoly, f64)>,
) -> Result<Vec<f64>> {
    let mut w = vec![0.0; dlog.order() as usize];
    for (g, weight) in items {
        let t = dlog.log(ctx, &ctx.evaluate_at_alpha(g)?)?;
        w[t as usize] += weight;
    }
    Ok(w)
}

/// `out[j] = sum_t w[t] exp(2 pi i j t / N)` for every `j`.
pub fn all_character_sums(weights: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    if buf.is_empty() {
        return buf;
    }
    let fft = FftPlanner::new().plan_fft(buf.len(), FftDirection::Inverse);
    fft.process(&mut buf);
    buf
}

fn check_field_cap(ctx: &FieldContext, caps: &Caps) -> Result<()> {
    if ctx.size() > caps.max_character_field {
        return Err(Error::cap("max_character_field", caps.max_character_field, ctx.size()));
    }
    Ok(())
}

fn check_catalog(ctx: &FieldContext, catalog: &PolyCatalog) -> Result<()> {
    if catalog.d >= ctx.n() {
        return Err(Error::Precondition(format!(
            "character sums need d < n, got d = {}, n = {}",
            catalog.d,
            ctx.n()
        )));
    }
    Ok(())
}

/// `S(chi_j) = sum_{g in P_d} Lambda(g) chi_j(g(alpha))`, summed directly.
pub fn compute_s(
    ctx: &FieldContext,
    catalog: &PolyCatalog,
    dlog: &DlogTable,
    j: u64,
) -> Result<Complex64> {
    check_catalog(ctx, catalog)?;
    let chi = Character::new(j, dlog.order());
    catalog.prime_powers.iter().try_fold(Complex64::new(0.0, 0.0), |acc, w| {
        let v = ctx.evaluate_at_alpha(&w.poly)?;
        Ok(acc + chi.eval(ctx, dlog, &v)? * w.lambda as f64)
    })
}

/// `T(chi_j) = sum_{h in I_d} chi_j(h(alpha))`, summed directly.
pub fn compute_t(
    ctx: &FieldContext,
    catalog: &PolyCatalog,
    dlog: &DlogTable,
    j: u64,
) -> Result<Complex64> {
    check_catalog(ctx, catalog)?;
    let chi = Character::new(j, dlog.order());
    catalog.irreducibles.iter().try_fold(Complex64::new(0.0, 0.0), |acc, h| {
        let v = ctx.evaluate_at_alpha(h)?;
        Ok(acc + chi.eval(ctx, dlog, &v)?)
    })
}

/// `S(chi_j)` for every `j`.
pub fn s_spectrum(ctx: &FieldContext, catalog: &PolyCatalog, dlog: &DlogTable) -> Result<Vec<Complex64>> {
    check_catalog(ctx, catalog)?;
    let w = log_weights(
        ctx,
        dlog,
        catalog.prime_powers.iter().map(|w| (&w.poly, w.lambda as f64)),
    )?;
    Ok(all_character_sums(&w))
}

/// `T(chi_j)` for every `j`.
pub fn t_spectrum(ctx: &FieldContext, catalog: &PolyCatalog, dlog: &DlogTable) -> Result<Vec<Complex64>> {
    check_catalog(ctx, catalog)?;
    let w = log_weights(ctx, dlog, catalog.irreducibles.iter().map(|h| (h, 1.0)))?;
    Ok(all_character_sums(&w))
}

/// Eigenvalues `lambda_j = sum_e mult(e) chi_j(e)` of the Cayley digraph.
pub fn cayley_spectrum(
    gens: &GeneratorSet,
    ctx: &FieldContext,
    dlog: &DlogTable,
) -> Result<Vec<Complex64>> {
    let mut w = vec![0.0; dlog.order() as usize];
    for e in &gens.elements {
        w[dlog.log(ctx, &e.value)? as usize] += e.multiplicity as f64;
    }
    Ok(all_character_sums(&w))
}

#[derive(Debug, Clone, Serialize)]
pub struct CharSumRecord {
    pub j: u64,
    pub s_re: f64,
    pub s_im: f64,
    pub t_re: f64,
    pub t_im: f64,
    pub abs_s: f64,
    pub abs_t: f64,
}

pub fn char_sum_records(
    ctx: &FieldContext,
    catalog: &PolyCatalog,
    dlog: &DlogTable,
) -> Result<Vec<CharSumRecord>> {
    let s = s_spectrum(ctx, catalog, dlog)?;
    let t = t_spectrum(ctx, catalog, dlog)?;
    Ok(s.iter()
        .zip(&t)
        .enumerate()
        .map(|(j, (s, t))| CharSumRecord {
            j: j as u64,
            s_re: s.re,
            s_im: s.im,
            t_re: t.re,
            t_im: t.im,
            abs_s: s.norm(),
            abs_t: t.norm(),
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct WeilReport {
    pub q: u64,
    pub n: usize,
    pub d: usize,
    /// `S(chi_0)`, which must equal `q^d`.
    pub principal_s: f64,
    pub principal_ok: bool,
    pub max_abs_s: f64,
    pub argmax_j: u64,
    /// `(n-1) q^(d/2)`.
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// `max_{j != 0} |S(chi_j)|` against `(n - 1) q^(d/2)`.
pub fn weil_report(ctx: &FieldContext, catalog: &PolyCatalog, dlog: &DlogTable) -> Result<WeilReport> {
    let spectrum = s_spectrum(ctx, catalog, dlog)?;
    let (q, n, d) = (ctx.q(), ctx.n(), catalog.d);
    let bound = (n as f64 - 1.0) * (q as f64).powf(d as f64 / 2.0);
    let (argmax_j, max_abs_s) = spectrum
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, s)| (j as u64, s.norm()))
        .fold((0, 0.0f64), |best, cur| if cur.1 > best.1 { cur } else { best });
    let expected = (q as f64).powi(d as i32);
    let principal_s = spectrum[0].re;
    let principal_ok = (principal_s - expected).abs() <= FLOAT_REL_TOL * expected
        && spectrum[0].im.abs() <= FLOAT_REL_TOL * expected;
    Ok(WeilReport {
        q,
        n,
        d,
        principal_s,
        principal_ok,
        max_abs_s,
        argmax_j,
        bound,
        ratio: if bound > 0.0 { max_abs_s / bound } else { f64::INFINITY },
        pass: max_abs_s <= bound * (1.0 + FLOAT_REL_TOL),
    })
}

pub fn verify_weil(ctx: &FieldContext, d: usize, caps: &Caps) -> Result<WeilReport> {
    check_field_cap(ctx, caps)?;
    let dlog = DlogTable::build(ctx, caps)?;
    let catalog = PolyCatalog::build(ctx.base(), d, caps.max_enumeration)?;
    weil_report(ctx, &catalog, &dlog)
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub q: u64,
    pub n: usize,
    pub d: usize,
    pub m: u64,
    pub count_irreducibles: u64,
    /// `sum_j |T(chi_j)|^(2m)` in floating point.
    pub lhs: f64,
    /// `N`: ordered `2m`-tuples with `h_1..h_m (alpha) = h_{m+1}..h_{2m} (alpha)`,
    /// counted by coincidences of discrete-log sums.
    pub collisions: u128,
    /// The same count from multiset equality of the factor lists.
    pub multiset_count: u128,
    /// `m! (#I_d)^m`.
    #[serde(serialize_with = "big_as_string")]
    pub bound: BigUint,
    pub float_rel_error: f64,
    /// `(q^n - 1) N` from the exact orthogonality sum, in exact mode.
    #[serde(serialize_with = "opt_big_as_string")]
    pub exact_lhs: Option<BigUint>,
    pub pass: bool,
}

fn big_as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn opt_big_as_string<S: serde::Serializer>(
    v: &Option<BigUint>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Number of ordered `2m`-tuples over a set of `size` symbols whose two
/// halves agree as multisets: `sum over multisets M of (m! / prod mult!)^2`,
/// grouped by the partition of `m` giving the multiplicities.
pub fn multiset_collisions(size: u64, m: u64) -> BigUint {
    fn factorial(k: u64) -> BigUint {
        (1..=k).fold(BigUint::one(), |acc, i| acc * i)
    }
    fn falling(size: u64, r: u64) -> BigUint {
        (0..r).fold(BigUint::one(), |acc, i| acc * (size.saturating_sub(i)))
    }
    fn walk(rest: u64, max_part: u64, parts: &mut Vec<u64>, size: u64, m: u64, acc: &mut BigUint) {
        if rest == 0 {
            let r = parts.len() as u64;
            if r > size {
                return;
            }
            // number of multisets with these multiplicities
            let mut same = HashMap::new();
            for &p in parts.iter() {
                *same.entry(p).or_insert(0u64) += 1;
            }
            let denom_sym: BigUint = same.values().map(|&c| factorial(c)).product();
            let count = falling(size, r) / denom_sym;
            let arrangements = factorial(m) / parts.iter().map(|&p| factorial(p)).product::<BigUint>();
            *acc += count * &arrangements * &arrangements;
            return;
        }
        for p in (1..=max_part.min(rest)).rev() {
            parts.push(p);
            walk(rest - p, p, parts, size, m, acc);
            parts.pop();
        }
    }
    let mut acc = BigUint::from(0u32);
    walk(m, m, &mut Vec::new(), size, m, &mut acc);
    acc
}

/// Check `sum_j |T(chi_j)|^(2m) = (q^n - 1) N` and `N <= m! (#I_d)^m` with
/// `m = ceil(n/d) - 1`.
pub fn verify_moment(ctx: &FieldContext, d: usize, caps: &Caps, exact: bool) -> Result<MomentReport> {
    if d == 0 || d >= ctx.n() {
        return Err(Error::Precondition(format!(
            "moment check needs 1 <= d < n, got d = {d}, n = {}",
            ctx.n()
        )));
    }
    if ctx.size() > caps.max_moment_field {
        return Err(Error::cap("max_moment_field", caps.max_moment_field, ctx.size()));
    }
    let m = moment_exponent(ctx.n() as u64, d as u64);
    let count = count_irreducibles_u64(ctx.q(), d as u32)?;
    let tuples = (count as f64).powi(2 * m as i32);
    if tuples > caps.max_moment_tuples as f64 {
        return Err(Error::cap(
            "max_moment_tuples",
            caps.max_moment_tuples,
            tuples.min(u64::MAX as f64) as u64,
        ));
    }
    let dlog = DlogTable::build(ctx, caps)?;
    let catalog = PolyCatalog::build(ctx.base(), d, caps.max_enumeration)?;
    moment_report(ctx, &catalog, &dlog, exact)
}

pub fn moment_report(
    ctx: &FieldContext,
    catalog: &PolyCatalog,
    dlog: &DlogTable,
    exact: bool,
) -> Result<MomentReport> {
    let d = catalog.d;
    let m = moment_exponent(ctx.n() as u64, d as u64);
    let order = dlog.order();
    let count = catalog.irreducibles.len() as u64;

    let lhs: f64 = t_spectrum(ctx, catalog, dlog)?
        .iter()
        .map(|t| t.norm_sqr().powi(m as i32))
        .sum();

    // distribution of log(h_1 ... h_m (alpha)) over ordered m-tuples
    let logs = catalog
        .irreducibles
        .iter()
        .map(|h| dlog.log(ctx, &ctx.evaluate_at_alpha(h)?))
        .collect::<Result<Vec<u64>>>()?;
    let mut dist: HashMap<u64, u128> = HashMap::from([(0, 1)]);
    for _ in 0..m {
        let mut next: HashMap<u64, u128> = HashMap::with_capacity(dist.len() * logs.len());
        for (&t, &c) in &dist {
            for &l in &logs {
                *next.entry((t + l) % order).or_insert(0) += c;
            }
        }
        dist = next;
    }
    let collisions: u128 = dist.values().map(|&c| c * c).sum();
    let multiset_count = multiset_collisions(count, m)
        .to_u128()
        .ok_or_else(|| Error::Internal("collision count overflow".into()))?;

    let expected = order as f64 * collisions as f64;
    let float_rel_error = (lhs - expected).abs() / expected;
    let bound = (1..=m).fold(BigUint::one(), |acc, i| acc * i) * BigUint::from(count).pow(m as u32);

    // Exact orthogonality: sum_j omega^(j r) is `order` when r == 0 and 0
    // otherwise, so only zero log-differences contribute.
    let exact_lhs = exact.then(|| {
        let zero_diff: u128 = dist.values().map(|&c| c * c).sum();
        BigUint::from(order) * BigUint::from(zero_diff)
    });
    let exact_ok = exact_lhs
        .as_ref()
        .is_none_or(|e| *e == BigUint::from(order) * BigUint::from(multiset_count));
    let pass = float_rel_error <= FLOAT_REL_TOL
        && collisions == multiset_count
        && BigUint::from(collisions) <= bound
        && exact_ok;
    Ok(MomentReport {
        q: ctx.q(),
        n: ctx.n(),
        d,
        m,
        count_irreducibles: count,
        lhs,
        collisions,
        multiset_count,
        bound,
        float_rel_error,
        exact_lhs,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(q: u64, n: usize, f: Option<&str>, d: usize) -> (FieldContext, DlogTable, PolyCatalog) {
        let ctx = FieldContext::with_q(q, n, f).unwrap();
        let caps = Caps::default();
        let dlog = DlogTable::build(&ctx, &caps).unwrap();
        let cat = PolyCatalog::build(ctx.base(), d, caps.max_enumeration).unwrap();
        (ctx, dlog, cat)
    }

    #[test]
    fn principal_values() {
        let (ctx, dlog, cat) = setup(5, 3, None, 2);
        let s0 = compute_s(&ctx, &cat, &dlog, 0).unwrap();
        assert!((s0.re - 25.0).abs() < 1e-9 && s0.im.abs() < 1e-9);
        let t0 = compute_t(&ctx, &cat, &dlog, 0).unwrap();
        assert!((t0.re - 10.0).abs() < 1e-9);
    }

    #[test]
    fn q2_n3_d1_sums() {
        let (ctx, dlog, cat) = setup(2, 3, Some("1,1,0,1"), 1);
        // gamma = alpha; alpha + 1 = alpha^3
        assert_eq!(dlog.log(&ctx, &ctx.alpha()).unwrap(), 1);
        let a1 = ctx.add(&ctx.alpha(), &ctx.one());
        assert_eq!(dlog.log(&ctx, &a1).unwrap(), 3);
        for j in 1..7u64 {
            let s = compute_s(&ctx, &cat, &dlog, j).unwrap();
            let w = |e: u64| Complex64::from_polar(1.0, TAU * (e * j % 7) as f64 / 7.0);
            assert!((s - (w(1) + w(3))).norm() < 1e-12);
            assert!(s.norm() <= 2.0 * 2f64.sqrt());
            let t = compute_t(&ctx, &cat, &dlog, j).unwrap();
            assert!((s - t).norm() < 1e-12);
        }
        let report = weil_report(&ctx, &cat, &dlog).unwrap();
        assert!((report.bound - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(report.pass && (0.0..=1.0).contains(&report.ratio));
    }

    #[test]
    fn fft_matches_direct_sums() {
        let (ctx, dlog, cat) = setup(3, 4, None, 2);
        let fs = s_spectrum(&ctx, &cat, &dlog).unwrap();
        let ft = t_spectrum(&ctx, &cat, &dlog).unwrap();
        for j in (0..dlog.order()).step_by(7) {
            assert!((fs[j as usize] - compute_s(&ctx, &cat, &dlog, j).unwrap()).norm() < 1e-9);
            assert!((ft[j as usize] - compute_t(&ctx, &cat, &dlog, j).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn sum_of_t_over_all_characters() {
        // sum_j T(chi_j) = (q^n - 1) #{h in I_d : h(alpha) = 1}
        let (ctx, dlog, cat) = setup(3, 2, None, 1);
        let total: Complex64 = t_spectrum(&ctx, &cat, &dlog).unwrap().iter().sum();
        let ones = cat
            .irreducibles
            .iter()
            .filter(|h| ctx.evaluate_at_alpha(h).unwrap() == ctx.one())
            .count() as f64;
        assert!((total.re - 8.0 * ones).abs() < 1e-9);
    }

    #[test]
    fn spectrum_matches_t_for_linear_generators() {
        let (ctx, dlog, cat) = setup(7, 2, None, 1);
        let gens = GeneratorSet::build(&ctx, &cat).unwrap();
        let lam = cayley_spectrum(&gens, &ctx, &dlog).unwrap();
        let t = t_spectrum(&ctx, &cat, &dlog).unwrap();
        assert!((lam[0].re - gens.regularity as f64).abs() < 1e-9);
        for (a, b) in lam.iter().zip(&t) {
            assert!((a - b).norm() < 1e-9);
        }
        let ids = gens.elements.iter().filter(|e| e.code == 1).map(|e| e.multiplicity).sum::<u32>();
        let total: Complex64 = lam.iter().sum();
        assert!((total.re - 48.0 * ids as f64).abs() < 1e-8);
    }

    #[test]
    fn multiset_formula_small_cases() {
        // brute force over symbol tuples
        fn brute(size: u64, m: u32) -> u128 {
            let tuples: Vec<Vec<u64>> = (0..size.pow(m))
                .map(|mut code| {
                    let mut t: Vec<u64> = (0..m).map(|_| { let x = code % size; code /= size; x }).collect();
                    t.sort();
                    t
                })
                .collect();
            let mut counts: HashMap<Vec<u64>, u128> = HashMap::new();
            for t in tuples {
                *counts.entry(t).or_insert(0) += 1;
            }
            counts.values().map(|c| c * c).sum()
        }
        for size in 1..6u64 {
            for m in 1..5u32 {
                assert_eq!(multiset_collisions(size, m as u64).to_u128().unwrap(), brute(size, m), "{size} {m}");
            }
            let i = size as u128;
            assert_eq!(multiset_collisions(size, 2).to_u128().unwrap(), i * (2 * i - 1));
        }
    }

    #[test]
    fn moment_q5_n5_d2() {
        let ctx = FieldContext::with_q(5, 5, None).unwrap();
        let r = verify_moment(&ctx, 2, &Caps::default(), true).unwrap();
        assert_eq!(r.m, 2);
        assert_eq!(r.count_irreducibles, 10);
        assert_eq!(r.collisions, 10 * 19);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn caps_are_enforced() {
        let ctx = FieldContext::with_q(2, 17, None).unwrap();
        assert!(matches!(
            verify_weil(&ctx, 3, &Caps::default()),
            Err(Error::ResourceCap { cap: "max_character_field", .. })
        ));
        assert!(matches!(
            verify_moment(&ctx, 3, &Caps::default(), false),
            Err(Error::ResourceCap { cap: "max_moment_field", .. })
        ));
    }
}
