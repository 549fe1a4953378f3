//! The base field `F_q`, `q = p^s`.
//!
//! Elements are canonical integer codes in `[0, q)`: the residue itself when
//! `s = 1`, otherwise the radix-`p` code `sum c_i p^i` of the coefficient
//! vector over the polynomial basis of `F_p[Y]/(base_modulus)`.

use serde::{Deserialize, Serialize};

use super::poly::FqPoly;
use crate::arith;
use crate::error::{Error, Result};

/// Largest supported `q`. Extension base fields keep `q`-sized log tables.
pub const MAX_Q: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BaseElem(pub u32);

impl BaseElem {
    pub const ZERO: BaseElem = BaseElem(0);
    pub const ONE: BaseElem = BaseElem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u64,
    pub s: u32,
    pub q: u64,
    /// Coefficients over `F_p`, ascending, monic of degree `s`; present iff `s > 1`.
    pub base_modulus: Option<Vec<u32>>,
}

impl FieldParams {
    /// Parameters for `F_q`; for `s > 1` the base modulus defaults to the
    /// first monic irreducible of degree `s` over `F_p` in code order.
    pub fn new(q: u64) -> Result<Self> {
        let (p, s) = arith::prime_power(q)
            .ok_or_else(|| Error::Precondition(format!("q = {q} is not a prime power")))?;
        if q >= MAX_Q {
            return Err(Error::cap("max_q", MAX_Q, q));
        }
        let base_modulus = if s > 1 {
            let fp = BaseField::new(FieldParams::prime(p)?)?;
            let first = (0..p.pow(s))
                .map(|code| FqPoly::monic_from_index(&fp, s as usize, code))
                .find(|g| g.is_irreducible(&fp).unwrap_or(false))
                .ok_or_else(|| Error::Internal(format!("no irreducible of degree {s} over F_{p}")))?;
            Some(first.coeffs().iter().map(|c| c.0).collect())
        } else {
            None
        };
        Ok(FieldParams {
            p,
            s,
            q,
            base_modulus,
        })
    }

    pub fn prime(p: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::Precondition(format!("p = {p} is not prime")));
        }
        if p >= MAX_Q {
            return Err(Error::cap("max_q", MAX_Q, p));
        }
        Ok(FieldParams {
            p,
            s: 1,
            q: p,
            base_modulus: None,
        })
    }

    /// Parameters with an explicit base modulus over `F_p`.
    pub fn with_base_modulus(p: u64, s: u32, modulus: Vec<u32>) -> Result<Self> {
        if s == 1 {
            return Self::prime(p);
        }
        let q = arith::checked_pow(p, s)
            .filter(|&q| q < MAX_Q)
            .ok_or_else(|| Error::cap("max_q", MAX_Q, u64::MAX))?;
        let fp = BaseField::new(FieldParams::prime(p)?)?;
        let g = FqPoly::from_codes(&fp, &modulus)?;
        if g.degree() != Some(s as usize) || !g.is_monic() {
            return Err(Error::Precondition(format!(
                "base modulus must be monic of degree {s}"
            )));
        }
        if !g.is_irreducible(&fp)? {
            return Err(Error::Precondition("base modulus is reducible over F_p".into()));
        }
        Ok(FieldParams {
            p,
            s,
            q,
            base_modulus: Some(modulus),
        })
    }
}

/// Arithmetic in `F_q`. Immutable after construction.
#[derive(Debug, Clone)]
pub struct BaseField {
    params: FieldParams,
    // Discrete log tables for s > 1 (empty for prime fields).
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl BaseField {
    pub fn new(params: FieldParams) -> Result<Self> {
        if params.s == 1 {
            return Ok(BaseField {
                params,
                exp: Vec::new(),
                log: Vec::new(),
            });
        }
        let modulus = params
            .base_modulus
            .clone()
            .ok_or_else(|| Error::Precondition("s > 1 requires a base modulus".into()))?;
        let fp = BaseField::new(FieldParams::prime(params.p)?)?;
        let m = FqPoly::from_codes(&fp, &modulus)?;
        let q = params.q as usize;
        let order = params.q - 1;
        let factors = arith::factorize(order, u64::MAX)?;

        let pow = |g: &FqPoly, e: u64| g.pow_mod(&fp, e, &m);
        let one = FqPoly::one();
        let primitive = (2..params.q)
            .map(|c| FqPoly::from_index(&fp, c))
            .find(|g| factors.iter().all(|&(l, _)| pow(g, order / l) != one))
            .unwrap_or_else(FqPoly::one);

        let p = params.p;
        let encode = |g: &FqPoly| -> u32 {
            g.coeffs()
                .iter()
                .rev()
                .fold(0u64, |acc, c| acc * p + c.0 as u64) as u32
        };
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![u32::MAX; q];
        let mut cur = FqPoly::one();
        for (t, slot) in exp.iter_mut().enumerate() {
            let code = encode(&cur);
            *slot = code;
            if log[code as usize] != u32::MAX {
                return Err(Error::Internal("base field generator is not primitive".into()));
            }
            log[code as usize] = t as u32;
            cur = fp_mulmod(&fp, &cur, &primitive, &m);
        }
        Ok(BaseField { params, exp, log })
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn q(&self) -> u64 {
        self.params.q
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn is_prime_field(&self) -> bool {
        self.params.s == 1
    }

    pub fn elem(&self, code: u64) -> Result<BaseElem> {
        if code >= self.params.q {
            return Err(Error::Domain(format!(
                "code {code} out of range for F_{}",
                self.params.q
            )));
        }
        Ok(BaseElem(code as u32))
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = BaseElem> {
        (0..self.params.q as u32).map(BaseElem)
    }

    #[inline]
    pub fn add(&self, a: BaseElem, b: BaseElem) -> BaseElem {
        let p = self.params.p;
        if self.params.s == 1 {
            let s = a.0 as u64 + b.0 as u64;
            return BaseElem(if s >= p { s - p } else { s } as u32);
        }
        if p == 2 {
            return BaseElem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let (mut out, mut place) = (0u64, 1u64);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        BaseElem(out as u32)
    }

    #[inline]
    pub fn neg(&self, a: BaseElem) -> BaseElem {
        let p = self.params.p;
        if self.params.s == 1 {
            return BaseElem(if a.0 == 0 { 0 } else { (p - a.0 as u64) as u32 });
        }
        if p == 2 {
            return a;
        }
        let mut x = a.0 as u64;
        let (mut out, mut place) = (0u64, 1u64);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        BaseElem(out as u32)
    }

    #[inline]
    pub fn sub(&self, a: BaseElem, b: BaseElem) -> BaseElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: BaseElem, b: BaseElem) -> BaseElem {
        if self.params.s == 1 {
            return BaseElem(((a.0 as u64 * b.0 as u64) % self.params.p) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return BaseElem::ZERO;
        }
        let order = self.exp.len();
        let t = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        BaseElem(self.exp[if t >= order { t - order } else { t }])
    }

    pub fn inv(&self, a: BaseElem) -> Result<BaseElem> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero in F_q".into()));
        }
        if self.params.s == 1 {
            // extended Euclid over the integers
            let p = self.params.p as i64;
            let (mut r0, mut r1) = (p, a.0 as i64);
            let (mut t0, mut t1) = (0i64, 1i64);
            while r1 != 0 {
                let quot = r0 / r1;
                (r0, r1) = (r1, r0 - quot * r1);
                (t0, t1) = (t1, t0 - quot * t1);
            }
            return Ok(BaseElem(t0.rem_euclid(p) as u32));
        }
        let order = self.exp.len();
        let l = self.log[a.0 as usize] as usize;
        Ok(BaseElem(self.exp[(order - l) % order]))
    }

    pub fn pow(&self, a: BaseElem, mut e: u64) -> BaseElem {
        let mut base = a;
        let mut acc = BaseElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn fp_mulmod(fp: &BaseField, a: &FqPoly, b: &FqPoly, m: &FqPoly) -> FqPoly {
    a.mul(fp, b).rem(fp, m).expect("modulus is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_arithmetic_mod_5() {
        let f = BaseField::new(FieldParams::new(5).unwrap()).unwrap();
        assert_eq!(f.add(BaseElem(3), BaseElem(4)), BaseElem(2));
        assert_eq!(f.inv(BaseElem(2)).unwrap(), BaseElem(3));
        assert_eq!(f.sub(BaseElem(1), BaseElem(3)), BaseElem(3));
        assert!(matches!(f.inv(BaseElem::ZERO), Err(Error::Domain(_))));
    }

    #[test]
    fn f4_squares_y_to_y_plus_one() {
        let params = FieldParams::new(4).unwrap();
        assert_eq!(params.base_modulus.as_deref(), Some(&[1, 1, 1][..]));
        let f = BaseField::new(params).unwrap();
        assert_eq!(f.mul(BaseElem(2), BaseElem(2)), BaseElem(3));
        assert_eq!(f.add(BaseElem(2), BaseElem(3)), BaseElem(1));
    }

    #[test]
    fn field_axioms_exhaustive_small_q() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let f = BaseField::new(FieldParams::new(q).unwrap()).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), BaseElem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), BaseElem::ONE, "q={q} a={a:?}");
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in els.iter().take(6) {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_base_modulus_validation() {
        assert!(FieldParams::with_base_modulus(3, 2, vec![1, 0, 1]).is_ok());
        // Y^2 + 2 = (Y+1)(Y+2) over F_3
        assert!(FieldParams::with_base_modulus(3, 2, vec![2, 0, 1]).is_err());
        assert!(FieldParams::new(6).is_err());
    }
}
