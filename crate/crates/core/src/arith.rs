//! Integer helpers: primality, trial-division factoring, divisors.

use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the witness set is exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// ascending order. Trial divisors never exceed `max_factor`.
pub fn factorize(mut n: u64, max_factor: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::Domain("cannot factor zero".into()));
    }
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if p > max_factor {
            if is_prime(n) {
                break;
            }
            return Err(Error::cap("max_factor", max_factor, p));
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

/// Decompose `q = p^s` with `p` prime; `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut s = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        s += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p, s))
}

/// Sorted positive divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `base^exp`, or `None` on `u64` overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Exact test of `n < q^(d/2) + 1`, i.e. `(n-1)^2 < q^d`, without floats.
pub fn below_half_power_plus_one(n: u64, q: u64, d: u32) -> bool {
    if n == 0 {
        return true;
    }
    let lhs = (n as u128 - 1).pow(2);
    let mut rhs: u128 = 1;
    for _ in 0..d {
        rhs = rhs.saturating_mul(q as u128);
        if rhs > lhs {
            return true;
        }
    }
    lhs < rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_sieve() {
        let limit = 5000usize;
        let mut sieve = vec![true; limit];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..limit {
            if sieve[i] {
                for j in (i * i..limit).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(i as u64), p, "{i}");
        }
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(4_294_967_297)); // 641 * 6700417
    }

    #[test]
    fn factor_and_prime_power() {
        assert_eq!(factorize(3124, 1 << 20).unwrap(), vec![(2, 2), (11, 1), (71, 1)]);
        assert_eq!(factorize(1, 10).unwrap(), vec![]);
        assert_eq!(prime_power(125), Some((5, 3)));
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(997), Some((997, 1)));
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn factor_cap_is_reported() {
        // 1000003 * 1000033, both prime, far above the trial bound
        let n = 1_000_003u64 * 1_000_033;
        assert!(matches!(factorize(n, 1000), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn half_power_threshold() {
        // n < q^{d/2} + 1
        assert!(below_half_power_plus_one(5, 5, 2));
        assert!(!below_half_power_plus_one(6, 5, 2));
        assert!(!below_half_power_plus_one(3, 4, 1));
        assert!(below_half_power_plus_one(3, 9, 1) && !below_half_power_plus_one(4, 9, 1));
        assert!(below_half_power_plus_one(3, 5, 1));
    }
}
