//! Algebraic and combinatorial properties, exhaustive on small instances
//! and randomized above them.

use num_traits::ToPrimitive;
use proptest::prelude::*;

use polydiam::arith;
use polydiam::bounds::{asymptotic_constants, improved_bound, improved_linear_bound, irreducible_lower_bound, moment_exponent};
use polydiam::cayley::{bfs_from_identity, build_generators, Stepping};
use polydiam::charsum::DlogTable;
use polydiam::ff::{BaseField, FieldContext, FieldParams, FqPoly};
use polydiam::poly_enum::{count_irreducibles, PolyCatalog};
use polydiam::Caps;

fn fields(max_size: u64, min_n: usize, max_prime_q: u64) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    for q in 2..=max_size {
        if arith::prime_power(q).is_none() {
            continue;
        }
        for n in min_n.. {
            match arith::checked_pow(q, n as u32) {
                Some(s) if s <= max_size => {
                    if n > 1 || q <= max_prime_q {
                        out.push((q, n));
                    }
                }
                _ => break,
            }
        }
    }
    out
}

/// Addition and multiplication tables by element code.
fn tables(ctx: &FieldContext) -> (usize, Vec<u16>, Vec<u16>) {
    let size = ctx.size() as usize;
    let elems: Vec<_> = (0..size as u64).map(|c| ctx.from_code(c).unwrap()).collect();
    let mut add = vec![0u16; size * size];
    let mut mul = vec![0u16; size * size];
    for (i, a) in elems.iter().enumerate() {
        for (j, b) in elems.iter().enumerate() {
            add[i * size + j] = ctx.code(&ctx.add(a, b)) as u16;
            mul[i * size + j] = ctx.code(&ctx.mul(a, b)) as u16;
        }
    }
    (size, add, mul)
}

#[test]
fn field_axioms_exhaustive_up_to_512() {
    // prime fields F_p themselves only up to p = 128 to bound the p^3 cost
    for (q, n) in fields(512, 1, 128) {
        let ctx = FieldContext::with_q(q, n, None).unwrap();
        let (s, add, mul) = tables(&ctx);
        let at = |t: &[u16], a: usize, b: usize| t[a * s + b] as usize;
        for a in 0..s {
            assert_eq!(at(&add, a, 0), a, "q={q} n={n}: additive identity");
            assert_eq!(at(&mul, a, 1), a, "q={q} n={n}: multiplicative identity");
            for b in 0..s {
                assert_eq!(at(&add, a, b), at(&add, b, a), "q={q} n={n}: + commutes");
                assert_eq!(at(&mul, a, b), at(&mul, b, a), "q={q} n={n}: * commutes");
                let ab = at(&add, a, b);
                let mab = at(&mul, a, b);
                for c in 0..s {
                    assert_eq!(at(&add, ab, c), at(&add, a, at(&add, b, c)), "q={q} n={n}: + associates");
                    assert_eq!(at(&mul, mab, c), at(&mul, a, at(&mul, b, c)), "q={q} n={n}: * associates");
                    assert_eq!(
                        at(&mul, a, at(&add, b, c)),
                        at(&add, mab, at(&mul, a, c)),
                        "q={q} n={n}: distributive"
                    );
                }
            }
        }
    }
}

#[test]
fn inverses_exhaustive_up_to_4096() {
    for (q, n) in fields(4096, 1, 4096) {
        let ctx = FieldContext::with_q(q, n, None).unwrap();
        let one = ctx.one();
        for c in 1..ctx.size() {
            let a = ctx.from_code(c).unwrap();
            let inv = ctx.inv(&a).unwrap();
            assert_eq!(ctx.mul(&a, &inv), one, "q={q} n={n} a={c}");
            assert_eq!(ctx.mul(&inv, &a), one, "q={q} n={n} a={c}");
        }
        assert!(ctx.inv(&ctx.zero()).is_err());
    }
}

#[test]
fn modulus_vanishes_at_alpha() {
    for (q, n) in fields(1 << 16, 1, 1 << 16).into_iter().filter(|&(q, _)| q < 300) {
        let ctx = FieldContext::with_q(q, n, None).unwrap();
        assert!(ctx.evaluate_horner(ctx.modulus()).is_zero(), "q={q} n={n}");
    }
}

#[test]
fn lower_bound_on_irreducible_count() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27] {
        for d in 1..=8u32 {
            if q.pow(d) > 1_000_000 {
                break;
            }
            let field = BaseField::new(FieldParams::new(q).unwrap()).unwrap();
            let cat = PolyCatalog::build(&field, d as usize, 1_000_000).unwrap();
            let count = cat.irreducibles.len() as f64;
            assert!(count >= irreducible_lower_bound(q, d as u64), "q={q} d={d}");
            assert_eq!(count_irreducibles(q, d).unwrap().to_usize(), Some(cat.irreducibles.len()));
            // #P_d / (q^d / d) in [1, 1 + 4 / q^ceil(d/2)], decided in integers
            if d >= 2 {
                let p = cat.prime_powers.len() as u128;
                let (qd, qc) = ((q as u128).pow(d), (q as u128).pow(d.div_ceil(2)));
                let dd = d as u128;
                assert!(p * dd >= qd, "q={q} d={d}: #P_d too small");
                assert!(p * dd * qc <= qd * (qc + 4), "q={q} d={d}: #P_d too large");
            }
            for w in &cat.prime_powers {
                assert_eq!(w.base.pow(&field, w.k as u64), w.poly, "q={q} d={d}: base^k re-expands");
                assert_eq!(w.lambda as usize, w.base.degree().unwrap());
            }
        }
    }
}

#[test]
fn moment_exponent_brackets_n() {
    for n in 2..=100u64 {
        for d in 1..n {
            let m = moment_exponent(n, d);
            assert!(m * d < n && n <= (m + 1) * d, "n={n} d={d} m={m}");
        }
    }
}

#[test]
fn asymptotic_grid() {
    for i in 1..=100 {
        let c = asymptotic_constants(0.5 * i as f64 / 101.0).unwrap();
        assert!(c.improved < c.old);
    }
}

/// The linear bound has its own constants; it is not the general formula
/// evaluated at d = 1.
#[test]
fn linear_bound_is_an_independent_formula() {
    for (q, n) in [(11u64, 3u64), (17, 3), (101, 5), (1 << 20, 30)] {
        let lin = improved_linear_bound(q, n).value().unwrap();
        let l = (q as f64).ln() - 2.0 * ((n - 1) as f64).ln();
        let lg = ((n - 1) as f64).ln();
        let general_at_one = 2.0 * n as f64 * (1.0 + (lg - 1.0) / l) + (4.0 * lg + 7.0) / l;
        assert!(lin < general_at_one, "q={q} n={n}");
        assert!(improved_bound(q, n, 1).value().is_none());
    }
}

#[test]
fn distance_histogram_covers_group_when_connected() {
    let caps = Caps::default();
    for (q, n) in fields(2048, 2, 0) {
        let ctx = FieldContext::with_q(q, n, None).unwrap();
        let dlog = DlogTable::build(&ctx, &caps).unwrap();
        for d in 1..n {
            let gens = build_generators(&ctx, d, &caps).unwrap();
            let r = bfs_from_identity(&gens, &ctx, &dlog, Stepping::FollowEdges).unwrap();
            let total: u64 = r.distance_histogram.values().sum();
            if r.connected {
                assert_eq!(total, ctx.group_order(), "q={q} n={n} d={d}");
            } else {
                assert!(total < ctx.group_order());
            }
        }
    }
}

fn field_case() -> impl Strategy<Value = (u64, usize)> {
    prop::sample::select(vec![
        (2u64, 12usize),
        (2, 20),
        (3, 9),
        (4, 7),
        (5, 6),
        (7, 5),
        (8, 5),
        (9, 4),
        (13, 4),
        (25, 3),
        (101, 3),
        (1009, 2),
        (65_537, 2),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms_randomized((q, n) in field_case(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let ctx = FieldContext::with_q(q, n, None).unwrap();
        let s = ctx.size();
        let (a, b, c) = [a, b, c].map(|x| ctx.from_code(x % s).unwrap()).into();
        prop_assert_eq!(ctx.add(&ctx.add(&a, &b), &c), ctx.add(&a, &ctx.add(&b, &c)));
        prop_assert_eq!(ctx.mul(&ctx.mul(&a, &b), &c), ctx.mul(&a, &ctx.mul(&b, &c)));
        prop_assert_eq!(ctx.mul(&a, &ctx.add(&b, &c)), ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c)));
        if !a.is_zero() {
            prop_assert_eq!(ctx.mul(&a, &ctx.inv(&a).unwrap()), ctx.one());
        }
        prop_assert_eq!(ctx.sub(&ctx.add(&a, &b), &b), a);
    }

    #[test]
    fn evaluation_is_multiplicative((q, n) in field_case(), g in any::<u64>(), h in any::<u64>(), split in 0usize..64) {
        let ctx = FieldContext::with_q(q, n, None).unwrap();
        let field = ctx.base();
        // random g, h with deg g + deg h < n
        let dg = split % n;
        let dh = (n - 1 - dg).min(split / n % n);
        let poly = |seed: u64, deg: usize| {
            let span = arith::checked_pow(q, deg as u32 + 1).unwrap_or(u64::MAX);
            FqPoly::from_index(field, seed % span)
        };
        let (g, h) = (poly(g, dg), poly(h, dh));
        let gh = g.mul(field, &h);
        prop_assume!(gh.degree().is_none_or(|d| d < n));
        let lhs = ctx.evaluate_at_alpha(&gh).unwrap();
        let rhs = ctx.mul(&ctx.evaluate_at_alpha(&g).unwrap(), &ctx.evaluate_at_alpha(&h).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(ctx.evaluate_at_alpha(&gh).unwrap(), ctx.evaluate_horner(&gh));
    }

    #[test]
    fn improved_constant_below_old(theta in 1e-9f64..0.4999999) {
        let c = asymptotic_constants(theta).unwrap();
        prop_assert!(c.improved < c.old);
    }
}
