//! The extension `F_{q^n} = F_q[X]/(f)`, with `alpha` the class of `X`.

use std::fmt;

use serde::{Serialize, Serializer};

use super::base::{BaseElem, BaseField, FieldParams};
use super::poly::FqPoly;
use crate::error::{Error, Result};

/// Largest supported `q^n`; element codes must fit comfortably in `u64`.
pub const MAX_FIELD_SIZE: u64 = 1 << 62;

/// Element of `F_{q^n}`: the dense residue `c_0 + c_1 alpha + ... + c_{n-1} alpha^{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElem {
    residue: Vec<BaseElem>,
}

impl ExtElem {
    pub fn coeffs(&self) -> &[BaseElem] {
        &self.residue
    }

    pub fn residue(&self) -> FqPoly {
        FqPoly::from_coeffs(self.residue.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.residue.iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.residue().to_csv())
    }
}

impl Serialize for ExtElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// `F_q` together with a monic irreducible `f` of degree `n`.
#[derive(Debug, Clone)]
pub struct FieldContext {
    base: BaseField,
    n: usize,
    modulus: FqPoly,
    size: u64,
}

impl FieldContext {
    /// Build `F_{q^n}`. Without an explicit modulus the first monic
    /// irreducible of degree `n` in canonical code order is used.
    pub fn new(params: FieldParams, n: usize, modulus: Option<FqPoly>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("extension degree n must be >= 1".into()));
        }
        let base = BaseField::new(params)?;
        let size = u32::try_from(n)
            .ok()
            .and_then(|n| base.q().checked_pow(n))
            .filter(|&s| s <= MAX_FIELD_SIZE)
            .ok_or_else(|| Error::cap("max_field_size", MAX_FIELD_SIZE, u64::MAX))?;
        let modulus = match modulus {
            Some(f) => {
                if f.degree() != Some(n) || !f.is_monic() {
                    return Err(Error::Precondition(format!(
                        "modulus {} must be monic of degree {n}",
                        f.to_csv()
                    )));
                }
                if !f.is_irreducible(&base)? {
                    return Err(Error::Precondition(format!(
                        "modulus {} is reducible over F_{}",
                        f.to_csv(),
                        base.q()
                    )));
                }
                f
            }
            None => first_irreducible(&base, n)?,
        };
        Ok(FieldContext {
            base,
            n,
            modulus,
            size,
        })
    }

    /// Convenience constructor from `q` (a prime power) and `n`.
    pub fn with_q(q: u64, n: usize, modulus: Option<&str>) -> Result<Self> {
        let params = FieldParams::new(q)?;
        let base = BaseField::new(params.clone())?;
        let f = modulus.map(|m| FqPoly::parse(&base, m)).transpose()?;
        Self::new(params, n, f)
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn params(&self) -> &FieldParams {
        self.base.params()
    }

    pub fn q(&self) -> u64 {
        self.base.q()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &FqPoly {
        &self.modulus
    }

    /// `q^n`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// `q^n - 1`, the order of the multiplicative group.
    pub fn group_order(&self) -> u64 {
        self.size - 1
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem {
            residue: vec![BaseElem::ZERO; self.n],
        }
    }

    pub fn one(&self) -> ExtElem {
        let mut e = self.zero();
        e.residue[0] = BaseElem::ONE;
        e
    }

    /// The root `alpha` of `f`.
    pub fn alpha(&self) -> ExtElem {
        if self.n == 1 {
            // f = X + c, so alpha = -c
            let mut e = self.zero();
            e.residue[0] = self.base.neg(self.modulus.coeff(0));
            return e;
        }
        let mut e = self.zero();
        e.residue[1] = BaseElem::ONE;
        e
    }

    /// Canonical code `sum c_i q^i` in `[0, q^n)`.
    pub fn code(&self, a: &ExtElem) -> u64 {
        code_of(self.q(), &a.residue)
    }

    pub fn from_code(&self, code: u64) -> Result<ExtElem> {
        if code >= self.size {
            return Err(Error::Domain(format!(
                "code {code} out of range for a field of size {}",
                self.size
            )));
        }
        let mut e = self.zero();
        decode_into(self.q(), code, &mut e.residue);
        Ok(e)
    }

    /// Reduce an arbitrary polynomial mod `f`.
    pub fn reduce(&self, g: &FqPoly) -> ExtElem {
        let r = g.rem(&self.base, &self.modulus).expect("modulus is nonzero");
        let mut e = self.zero();
        for (slot, &c) in e.residue.iter_mut().zip(r.coeffs()) {
            *slot = c;
        }
        e
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem {
            residue: a
                .residue
                .iter()
                .zip(&b.residue)
                .map(|(&x, &y)| self.base.add(x, y))
                .collect(),
        }
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem {
            residue: a
                .residue
                .iter()
                .zip(&b.residue)
                .map(|(&x, &y)| self.base.sub(x, y))
                .collect(),
        }
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let mut out = self.zero();
        self.mul_into(&a.residue, &b.residue, &mut out.residue);
        out
    }

    /// Schoolbook product followed by reduction by the monic modulus.
    pub fn mul_into(&self, a: &[BaseElem], b: &[BaseElem], out: &mut [BaseElem]) {
        let n = self.n;
        let f = &self.base;
        let mut prod = vec![BaseElem::ZERO; 2 * n - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
        let fc = self.modulus.coeffs();
        for i in (n..2 * n - 1).rev() {
            let c = prod[i];
            if c.is_zero() {
                continue;
            }
            for (j, &m) in fc[..n].iter().enumerate() {
                let k = i - n + j;
                prod[k] = f.sub(prod[k], f.mul(c, m));
            }
        }
        out.copy_from_slice(&prod[..n]);
    }

    pub fn pow(&self, a: &ExtElem, mut e: u64) -> ExtElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Inverse via the extended Euclidean algorithm on `(residue, f)`.
    pub fn inv(&self, a: &ExtElem) -> Result<ExtElem> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero in F_{q^n}".into()));
        }
        let f = &self.base;
        let (mut r0, mut r1) = (self.modulus.clone(), a.residue());
        let (mut t0, mut t1) = (FqPoly::zero(), FqPoly::one());
        while !r1.is_zero() {
            let (quot, rem) = r0.div_rem(f, &r1)?;
            let t2 = t0.sub(f, &quot.mul(f, &t1));
            (r0, r1) = (r1, rem);
            (t0, t1) = (t1, t2);
        }
        // r0 is a nonzero constant because f is irreducible
        let c = match (r0.degree(), r0.leading()) {
            (Some(0), Some(c)) => c,
            _ => return Err(Error::Internal("gcd(residue, f) is not a unit".into())),
        };
        Ok(self.reduce(&t0.scale(f, f.inv(c)?)))
    }

    /// `g(alpha)` for `deg g < n`, which is `g` itself read as a residue and
    /// is nonzero whenever `g` is.
    pub fn evaluate_at_alpha(&self, g: &FqPoly) -> Result<ExtElem> {
        if let Some(d) = g.degree() {
            if d >= self.n {
                return Err(Error::Precondition(format!(
                    "evaluation needs deg g < n, got deg {d} with n = {}",
                    self.n
                )));
            }
        }
        if self.n == 1 {
            return Ok(self.evaluate_horner(g));
        }
        let mut e = self.zero();
        for (slot, &c) in e.residue.iter_mut().zip(g.coeffs()) {
            *slot = c;
        }
        Ok(e)
    }

    /// Horner evaluation at `alpha` with extension arithmetic, any degree.
    pub fn evaluate_horner(&self, g: &FqPoly) -> ExtElem {
        let alpha = self.alpha();
        let mut acc = self.zero();
        for &c in g.coeffs().iter().rev() {
            acc = self.mul(&acc, &alpha);
            acc.residue[0] = self.base.add(acc.residue[0], c);
        }
        acc
    }

    /// Precompute multiplication by a fixed element as an `F_q`-linear map.
    pub fn const_mul(&self, c: &ExtElem) -> ConstMul {
        let mut images = Vec::with_capacity(self.n);
        let mut basis = self.one();
        let alpha = self.alpha();
        for _ in 0..self.n {
            images.push(self.mul(&basis, c).residue);
            basis = self.mul(&basis, &alpha);
        }
        ConstMul { images }
    }
}

/// Multiplication by a fixed element: `x * c = sum_i x_i (alpha^i c)`.
#[derive(Debug, Clone)]
pub struct ConstMul {
    images: Vec<Vec<BaseElem>>,
}

impl ConstMul {
    pub fn apply(&self, ctx: &FieldContext, x: &[BaseElem], out: &mut [BaseElem]) {
        let f = ctx.base();
        out.fill(BaseElem::ZERO);
        for (&xi, image) in x.iter().zip(&self.images) {
            if xi.is_zero() {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(image) {
                *o = f.add(*o, f.mul(xi, v));
            }
        }
    }
}

pub(crate) fn code_of(q: u64, coeffs: &[BaseElem]) -> u64 {
    coeffs.iter().rev().fold(0u64, |acc, c| acc * q + c.0 as u64)
}

pub(crate) fn decode_into(q: u64, mut code: u64, out: &mut [BaseElem]) {
    for slot in out.iter_mut() {
        *slot = BaseElem((code % q) as u32);
        code /= q;
    }
}

fn first_irreducible(base: &BaseField, n: usize) -> Result<FqPoly> {
    let count = base
        .q()
        .checked_pow(n as u32)
        .ok_or_else(|| Error::cap("max_field_size", MAX_FIELD_SIZE, u64::MAX))?;
    for idx in 0..count {
        let g = FqPoly::monic_from_index(base, n, idx);
        if g.is_irreducible(base)? {
            return Ok(g);
        }
    }
    Err(Error::Internal(format!("no irreducible of degree {n}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: u64, n: usize, f: &str) -> FieldContext {
        FieldContext::with_q(q, n, Some(f)).unwrap()
    }

    fn el(c: &FieldContext, s: &str) -> ExtElem {
        c.reduce(&FqPoly::parse(c.base(), s).unwrap())
    }

    /// Independent product: multiply as plain polynomials, then long-divide.
    fn schoolbook_mod(c: &FieldContext, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let prod = a.residue().mul(c.base(), &b.residue());
        c.reduce(&prod)
    }

    #[test]
    fn named_products() {
        let c = ctx(2, 3, "1,1,0,1");
        let a = c.alpha();
        let a2 = c.mul(&a, &a);
        assert_eq!(c.mul(&a, &a2), el(&c, "1,1"));
        let x = el(&c, "1,0,1");
        assert_eq!(c.mul(&x, &c.one()), x);

        let c3 = ctx(3, 2, "1,0,1");
        let prod = c3.mul(&el(&c3, "1,1"), &el(&c3, "2,1"));
        assert_eq!(prod, c3.one());
        assert_eq!(prod, schoolbook_mod(&c3, &el(&c3, "1,1"), &el(&c3, "2,1")));
    }

    #[test]
    fn named_inverses() {
        let c = ctx(2, 3, "1,1,0,1");
        assert_eq!(c.inv(&c.one()).unwrap(), c.one());
        let inv_alpha = c.inv(&c.alpha()).unwrap();
        assert_eq!(inv_alpha, el(&c, "1,0,1"));
        assert_eq!(c.mul(&c.alpha(), &inv_alpha), c.one());
        assert!(matches!(c.inv(&c.zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn evaluation_cases() {
        let c = ctx(2, 3, "1,1,0,1");
        let f = c.base();
        assert_eq!(c.evaluate_at_alpha(&FqPoly::x()).unwrap(), c.alpha());
        let g = FqPoly::parse(f, "1,1,1").unwrap();
        assert_eq!(c.evaluate_at_alpha(&g).unwrap(), el(&c, "1,1,1"));
        let sq = FqPoly::parse(f, "1,1").unwrap().pow(f, 2);
        assert_eq!(c.evaluate_at_alpha(&sq).unwrap(), el(&c, "1,0,1"));
        assert_eq!(c.evaluate_horner(&sq), el(&c, "1,0,1"));
        assert!(matches!(
            c.evaluate_at_alpha(c.modulus()),
            Err(Error::Precondition(_))
        ));
        assert!(c.evaluate_horner(c.modulus()).is_zero());
    }

    #[test]
    fn default_modulus_is_first_in_code_order() {
        let c = FieldContext::with_q(2, 3, None).unwrap();
        assert_eq!(c.modulus().to_csv(), "1,1,0,1");
        let c = FieldContext::with_q(3, 2, None).unwrap();
        assert_eq!(c.modulus().to_csv(), "1,0,1");
        assert!(FieldContext::with_q(2, 3, Some("1,0,0,1")).is_err());
        assert!(FieldContext::with_q(2, 3, Some("1,1,1")).is_err());
    }

    #[test]
    fn ring_axioms_and_inverses_exhaustive() {
        for (q, n) in [(2u64, 2usize), (2, 3), (2, 9), (3, 2), (3, 5), (4, 3), (5, 3), (7, 3), (8, 3), (9, 2), (16, 2), (17, 2)] {
            let c = FieldContext::with_q(q, n, None).unwrap();
            let els: Vec<_> = (0..c.size()).map(|k| c.from_code(k).unwrap()).collect();
            assert!(c.evaluate_horner(c.modulus()).is_zero());
            let step = (els.len() / 23).max(1);
            for a in &els {
                assert_eq!(c.code(a), c.code(&c.from_code(c.code(a)).unwrap()));
                if !a.is_zero() {
                    assert_eq!(c.mul(a, &c.inv(a).unwrap()), c.one());
                }
                for b in els.iter().step_by(step) {
                    assert_eq!(c.mul(a, b), schoolbook_mod(&c, a, b));
                    for cc in els.iter().step_by(step * 3) {
                        assert_eq!(c.mul(a, &c.add(b, cc)), c.add(&c.mul(a, b), &c.mul(a, cc)));
                        assert_eq!(c.mul(&c.mul(a, b), cc), c.mul(a, &c.mul(b, cc)));
                        assert_eq!(c.add(&c.add(a, b), cc), c.add(a, &c.add(b, cc)));
                    }
                }
            }
        }
    }

    #[test]
    fn const_mul_agrees_with_mul() {
        let c = FieldContext::with_q(5, 3, None).unwrap();
        let k = el(&c, "3,4,2");
        let m = c.const_mul(&k);
        let mut out = vec![BaseElem::ZERO; 3];
        for code in 0..c.size() {
            let x = c.from_code(code).unwrap();
            m.apply(&c, x.coeffs(), &mut out);
            assert_eq!(out, c.mul(&x, &k).coeffs());
        }
    }

    #[test]
    fn degree_one_extension() {
        let c = FieldContext::with_q(3, 1, None).unwrap();
        assert_eq!(c.modulus().to_csv(), "0,1");
        assert!(c.alpha().is_zero());
        let two = c.from_code(2).unwrap();
        assert_eq!(c.mul(&two, &two), c.one());
    }
}
