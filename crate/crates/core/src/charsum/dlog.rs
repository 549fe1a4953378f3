//! Discrete logarithms in `F_{q^n}^*` with respect to a primitive element.

use crate::arith;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::ff::{code_of, BaseElem, ExtElem, FieldContext};

const NO_LOG: u32 = u32::MAX;

fn check_order(ctx: &FieldContext, caps: &Caps) -> Result<u64> {
    let order = ctx.group_order();
    let limit = caps.max_order.min(u32::MAX as u64 - 1);
    if order > limit {
        return Err(Error::cap("max_order", limit, order));
    }
    Ok(order)
}

/// First element in canonical code order whose multiplicative order is
/// `q^n - 1`, tested via `g^((q^n-1)/l) != 1` for every prime `l`.
pub fn find_primitive(ctx: &FieldContext, caps: &Caps) -> Result<ExtElem> {
    let order = ctx.group_order();
    let primes: Vec<u64> = arith::factorize(order, caps.max_factor)?
        .into_iter()
        .map(|(l, _)| l)
        .collect();
    let one = ctx.one();
    for code in 1..ctx.size() {
        let g = ctx.from_code(code)?;
        if primes.iter().all(|&l| ctx.pow(&g, order / l) != one) {
            return Ok(g);
        }
    }
    Err(Error::Internal("multiplicative group has no generator".into()))
}

/// Bijection `F_{q^n}^* <-> [0, q^n - 1)` given by `t <-> gamma^t`.
#[derive(Debug, Clone)]
pub struct DlogTable {
    generator: ExtElem,
    // exp[t] = code(gamma^t)
    exp: Vec<u32>,
    // log[code] = t, NO_LOG at code 0
    log: Vec<u32>,
}

impl DlogTable {
    pub fn build(ctx: &FieldContext, caps: &Caps) -> Result<Self> {
        let order = check_order(ctx, caps)?;
        let generator = find_primitive(ctx, caps)?;
        let step = ctx.const_mul(&generator);
        let q = ctx.q();
        let n = ctx.n();

        let mut exp = vec![0u32; order as usize];
        let mut log = vec![NO_LOG; ctx.size() as usize];
        let mut cur = vec![BaseElem::ZERO; n];
        let mut next = vec![BaseElem::ZERO; n];
        cur[0] = BaseElem::ONE;
        for (t, slot) in exp.iter_mut().enumerate() {
            let code = code_of(q, &cur) as usize;
            if log[code] != NO_LOG {
                return Err(Error::Internal(format!(
                    "generator {generator} repeats after {t} steps"
                )));
            }
            *slot = code as u32;
            log[code] = t as u32;
            step.apply(ctx, &cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        if code_of(q, &cur) != 1 {
            return Err(Error::Internal("generator power does not return to 1".into()));
        }
        Ok(DlogTable {
            generator,
            exp,
            log,
        })
    }

    pub fn generator(&self) -> &ExtElem {
        &self.generator
    }

    /// `q^n - 1`.
    pub fn order(&self) -> u64 {
        self.exp.len() as u64
    }

    /// Log of the element with canonical code `code`; `None` for zero.
    #[inline]
    pub fn log_code(&self, code: u64) -> Option<u64> {
        match self.log.get(code as usize) {
            Some(&t) if t != NO_LOG => Some(t as u64),
            _ => None,
        }
    }

    pub fn log(&self, ctx: &FieldContext, x: &ExtElem) -> Result<u64> {
        self.log_code(ctx.code(x))
            .ok_or_else(|| Error::Domain("discrete log of zero".into()))
    }

    #[inline]
    pub fn exp_code(&self, t: u64) -> u64 {
        self.exp[(t % self.order()) as usize] as u64
    }

    pub fn exp(&self, ctx: &FieldContext, t: u64) -> ExtElem {
        ctx.from_code(self.exp_code(t)).expect("table codes are in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_is_primitive_for_x3_x_1() {
        let ctx = FieldContext::with_q(2, 3, Some("1,1,0,1")).unwrap();
        assert_eq!(find_primitive(&ctx, &Caps::default()).unwrap(), ctx.alpha());
    }

    #[test]
    fn two_generates_f3() {
        let ctx = FieldContext::with_q(3, 1, None).unwrap();
        let g = find_primitive(&ctx, &Caps::default()).unwrap();
        assert_eq!(ctx.code(&g), 2);
    }

    #[test]
    fn generator_has_full_order() {
        for (q, n) in [(2u64, 4usize), (3, 3), (4, 2), (5, 2), (7, 2), (9, 2)] {
            let ctx = FieldContext::with_q(q, n, None).unwrap();
            let caps = Caps::default();
            let g = find_primitive(&ctx, &caps).unwrap();
            let order = ctx.group_order();
            for (l, _) in arith::factorize(order, u64::MAX).unwrap() {
                assert_ne!(ctx.pow(&g, order / l), ctx.one());
            }
            let table = DlogTable::build(&ctx, &caps).unwrap();
            for t in 0..order {
                assert_eq!(table.log_code(table.exp_code(t)), Some(t));
                assert_eq!(table.exp(&ctx, t), ctx.pow(&g, t));
            }
            assert_eq!(table.log_code(0), None);
        }
    }

    #[test]
    fn order_cap() {
        let ctx = FieldContext::with_q(2, 12, None).unwrap();
        let caps = Caps {
            max_order: 1000,
            ..Caps::default()
        };
        assert!(matches!(
            DlogTable::build(&ctx, &caps),
            Err(Error::ResourceCap { cap: "max_order", .. })
        ));
    }
}
