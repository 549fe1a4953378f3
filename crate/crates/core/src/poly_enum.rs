//! Irreducible and prime-power polynomials with von Mangoldt weights.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::ff::{BaseField, FqPoly};

/// Default bound on the number of candidates `q^d` scanned per degree.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Möbius function.
pub fn moebius(s: u64) -> i8 {
    assert!(s >= 1, "moebius is defined on positive integers");
    let factors = arith::factorize(s, u64::MAX).expect("trial division is uncapped");
    if factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `#I_d = (1/d) sum_{s | d} mu(s) q^(d/s)`, exactly.
pub fn count_irreducibles(q: u64, d: u32) -> Result<BigUint> {
    if d == 0 {
        return Err(Error::Precondition("degree must be >= 1".into()));
    }
    if arith::prime_power(q).is_none() {
        return Err(Error::Precondition(format!("q = {q} is not a prime power")));
    }
    let mut acc = BigInt::zero();
    for s in arith::divisors(d as u64) {
        let mu = moebius(s);
        if mu != 0 {
            let term = BigInt::from(q).pow(d / s as u32);
            acc += if mu > 0 { term } else { -term };
        }
    }
    let dd = BigInt::from(d);
    if acc.is_negative() || !(&acc % &dd).is_zero() {
        return Err(Error::Internal(format!(
            "Möbius sum {acc} not divisible by {d} for q = {q}"
        )));
    }
    Ok((acc / dd).to_biguint().expect("nonnegative"))
}

/// `#P_d = sum_{e | d} #I_e`.
pub fn count_prime_powers(q: u64, d: u32) -> Result<BigUint> {
    arith::divisors(d as u64)
        .into_iter()
        .map(|e| count_irreducibles(q, e as u32))
        .sum()
}

fn candidates(field: &BaseField, d: usize, cap: u64) -> Result<u64> {
    let count = u32::try_from(d)
        .ok()
        .and_then(|d| field.q().checked_pow(d))
        .unwrap_or(u64::MAX);
    if count > cap {
        return Err(Error::cap("max_enumeration", cap, count));
    }
    Ok(count)
}

/// All monic irreducibles of degree `d`, in canonical code order.
pub fn enumerate_irreducibles(field: &BaseField, d: usize, cap: u64) -> Result<Vec<FqPoly>> {
    if d == 0 {
        return Err(Error::Precondition("degree must be >= 1".into()));
    }
    let count = candidates(field, d, cap)?;
    (0..count)
        .into_par_iter()
        .map(|idx| {
            let g = FqPoly::monic_from_index(field, d, idx);
            g.is_irreducible(field).map(|irr| irr.then_some(g))
        })
        .filter_map(|r| r.transpose())
        .collect()
}

/// A prime power `poly = base^k` with `lambda = deg base`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedPoly {
    pub poly: FqPoly,
    pub base: FqPoly,
    pub k: u32,
    pub lambda: u32,
}

/// `I_d` and `P_d` over one base field.
#[derive(Debug, Clone)]
pub struct PolyCatalog {
    pub q: u64,
    pub d: usize,
    pub irreducibles: Vec<FqPoly>,
    pub prime_powers: Vec<WeightedPoly>,
}

impl PolyCatalog {
    pub fn build(field: &BaseField, d: usize, cap: u64) -> Result<Self> {
        let irreducibles = enumerate_irreducibles(field, d, cap)?;
        let prime_powers = prime_powers_with(field, d, cap, &irreducibles)?;
        Ok(PolyCatalog {
            q: field.q(),
            d,
            irreducibles,
            prime_powers,
        })
    }

    /// `sum_{g in P_d} Lambda(g)`.
    pub fn lambda_total(&self) -> u64 {
        self.prime_powers.iter().map(|w| w.lambda as u64).sum()
    }
}

/// `P_d` ordered by divisor degree, then canonical order of the base.
pub fn enumerate_prime_powers(field: &BaseField, d: usize, cap: u64) -> Result<Vec<WeightedPoly>> {
    let top = enumerate_irreducibles(field, d, cap)?;
    prime_powers_with(field, d, cap, &top)
}

fn prime_powers_with(
    field: &BaseField,
    d: usize,
    cap: u64,
    top: &[FqPoly],
) -> Result<Vec<WeightedPoly>> {
    let mut out = Vec::new();
    for e in arith::divisors(d as u64) {
        let e = e as usize;
        let k = (d / e) as u32;
        let owned;
        let irr: &[FqPoly] = if e == d {
            top
        } else {
            owned = enumerate_irreducibles(field, e, cap)?;
            &owned
        };
        out.extend(irr.iter().map(|h| WeightedPoly {
            poly: h.pow(field, k as u64),
            base: h.clone(),
            k,
            lambda: e as u32,
        }));
    }
    Ok(out)
}

/// `#I_d` as `u64`, failing loudly when it does not fit.
pub fn count_irreducibles_u64(q: u64, d: u32) -> Result<u64> {
    count_irreducibles(q, d)?
        .to_u64()
        .ok_or_else(|| Error::cap("u64_count", u64::MAX, u64::MAX))
}
