//! Dense univariate polynomials over `F_q`.

use std::fmt;

use serde::{Serialize, Serializer};

use super::base::{BaseElem, BaseField};
use crate::error::{Error, Result};

/// Polynomial with ascending coefficients; no trailing zeros, so the zero
/// polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqPoly {
    coeffs: Vec<BaseElem>,
}

impl FqPoly {
    pub fn zero() -> Self {
        FqPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        FqPoly {
            coeffs: vec![BaseElem::ONE],
        }
    }

    /// The monomial `X`.
    pub fn x() -> Self {
        FqPoly {
            coeffs: vec![BaseElem::ZERO, BaseElem::ONE],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<BaseElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FqPoly { coeffs }
    }

    /// From ascending integer codes, validating each against `field`.
    pub fn from_codes(field: &BaseField, codes: &[u32]) -> Result<Self> {
        let coeffs = codes
            .iter()
            .map(|&c| field.elem(c as u64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(coeffs))
    }

    /// Parse the comma-separated ascending coefficient format, e.g.
    /// `"1,1,0,1"` is `1 + X + X^3`.
    pub fn parse(field: &BaseField, text: &str) -> Result<Self> {
        let codes = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad coefficient `{t}` in `{text}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_codes(field, &codes)
    }

    /// The polynomial whose radix-`q` digits (ascending) are those of `code`.
    pub fn from_index(field: &BaseField, mut code: u64) -> Self {
        let q = field.q();
        let mut coeffs = Vec::new();
        while code > 0 {
            coeffs.push(BaseElem((code % q) as u32));
            code /= q;
        }
        FqPoly { coeffs }
    }

    /// Monic polynomial of degree `d` whose lower coefficients are the
    /// radix-`q` digits of `index`, `0 <= index < q^d`. Ascending `index`
    /// enumerates the monic degree-`d` polynomials in canonical order.
    pub fn monic_from_index(field: &BaseField, d: usize, mut index: u64) -> Self {
        let q = field.q();
        let mut coeffs = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push(BaseElem((index % q) as u32));
            index /= q;
        }
        coeffs.push(BaseElem::ONE);
        FqPoly { coeffs }
    }

    /// Radix-`q` code `sum c_i q^i`; inverse of [`FqPoly::from_index`].
    pub fn index(&self, field: &BaseField) -> u128 {
        let q = field.q() as u128;
        self.coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, c| acc * q + c.0 as u128)
    }

    pub fn coeffs(&self) -> &[BaseElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BaseElem {
        self.coeffs.get(i).copied().unwrap_or(BaseElem::ZERO)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<BaseElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(BaseElem::ONE)
    }

    pub fn to_csv(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|c| c.0.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn add(&self, field: &BaseField, other: &FqPoly) -> FqPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| field.add(self.coeff(i), other.coeff(i)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, field: &BaseField, other: &FqPoly) -> FqPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| field.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, field: &BaseField, c: BaseElem) -> FqPoly {
        Self::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &BaseField, other: &FqPoly) -> FqPoly {
        if self.is_zero() || other.is_zero() {
            return FqPoly::zero();
        }
        let mut out = vec![BaseElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, field: &BaseField, mut e: u64) -> FqPoly {
        let mut base = self.clone();
        let mut acc = FqPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(field, &base);
            }
        }
        acc
    }

    /// Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, field: &BaseField, divisor: &FqPoly) -> Result<(FqPoly, FqPoly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::Domain("polynomial division by zero".into()))?;
        let lead_inv = field.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((FqPoly::zero(), self.clone()));
        }
        let mut quot = vec![BaseElem::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = field.mul(rem[i], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = field.sub(rem[k], field.mul(c, b));
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, field: &BaseField, divisor: &FqPoly) -> Result<FqPoly> {
        Ok(self.div_rem(field, divisor)?.1)
    }

    /// Scale to leading coefficient one; zero stays zero.
    pub fn make_monic(&self, field: &BaseField) -> FqPoly {
        match self.leading() {
            None => FqPoly::zero(),
            Some(l) => self.scale(field, field.inv(l).expect("leading coefficient is nonzero")),
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, field: &BaseField, other: &FqPoly) -> FqPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(field, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic(field)
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, field: &BaseField, mut e: u64, modulus: &FqPoly) -> FqPoly {
        let mut base = self.rem(field, modulus).expect("nonzero modulus");
        let mut acc = FqPoly::one().rem(field, modulus).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base).rem(field, modulus).expect("nonzero modulus");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(field, &base).rem(field, modulus).expect("nonzero modulus");
            }
        }
        acc
    }

    /// Ben-Or irreducibility test: a monic `g` of degree `d` is irreducible
    /// iff `gcd(g, X^(q^i) - X) = 1` for every `1 <= i <= d/2`.
    pub fn is_irreducible(&self, field: &BaseField) -> Result<bool> {
        let d = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::Precondition("irreducibility needs degree >= 1".into())),
        };
        if !self.is_monic() {
            return Err(Error::Precondition(format!(
                "irreducibility test expects a monic polynomial, got {}",
                self.to_csv()
            )));
        }
        if d == 1 {
            return Ok(true);
        }
        if self.coeffs[0].is_zero() {
            return Ok(false);
        }
        let x = FqPoly::x();
        let mut frob = x.clone();
        for _ in 1..=d / 2 {
            frob = frob.pow_mod(field, field.q(), self);
            let g = self.gcd(field, &frob.sub(field, &x));
            if g != FqPoly::one() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

impl Serialize for FqPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_csv())
    }
}
