//! Orthogonality and multiplicativity of the characters `chi_j`.

use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::dlog::DlogTable;
use super::sums::{all_character_sums, Character};
use crate::error::Result;
use crate::ff::FieldContext;

/// Orders up to this size are summed directly; larger ones via one DFT.
const DIRECT_SUM_LIMIT: u64 = 4096;

/// Group orders up to this size get an exhaustive `(x, y, j)` sweep.
pub const EXHAUSTIVE_MULTIPLICATIVITY_LIMIT: u64 = 511;

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    pub order: u64,
    /// `|sum_t chi_0(gamma^t) - (q^n - 1)|`.
    pub principal_error: f64,
    /// `max_{j != 0} |sum_t chi_j(gamma^t)|`.
    pub max_nonprincipal: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `sum_t chi_j(gamma^t)` is `q^n - 1` for `j = 0` and `0` otherwise.
pub fn check_orthogonality(dlog: &DlogTable) -> OrthogonalityReport {
    let order = dlog.order();
    let sums: Vec<Complex64> = if order <= DIRECT_SUM_LIMIT {
        (0..order)
            .map(|j| {
                let chi = Character::new(j, order);
                (0..order).map(|t| chi.at_exponent(t)).sum()
            })
            .collect()
    } else {
        all_character_sums(&vec![1.0; order as usize])
    };
    let principal_error = (sums[0] - Complex64::new(order as f64, 0.0)).norm();
    let max_nonprincipal = sums.iter().skip(1).map(|s| s.norm()).fold(0.0, f64::max);
    let tolerance = 1e-6 * order as f64;
    OrthogonalityReport {
        order,
        principal_error,
        max_nonprincipal,
        tolerance,
        pass: principal_error <= tolerance && max_nonprincipal <= tolerance,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicativityReport {
    pub order: u64,
    pub exhaustive: bool,
    pub checks: u64,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `chi_j(xy) = chi_j(x) chi_j(y)`, with `xy` formed by field arithmetic.
/// Exhaustive over `x, y, j` for small orders, a fixed stride sample above.
pub fn check_multiplicativity(ctx: &FieldContext, dlog: &DlogTable) -> Result<MultiplicativityReport> {
    let order = dlog.order();
    let exhaustive = order <= EXHAUSTIVE_MULTIPLICATIVITY_LIMIT;
    let sample = |limit: u64| -> Vec<u64> {
        if order <= limit {
            (1..=order).collect()
        } else {
            let stride = order / limit;
            (0..limit).map(|i| 1 + i * stride).collect()
        }
    };
    let (xs, js) = if exhaustive {
        (sample(order), (0..order).collect::<Vec<_>>())
    } else {
        (sample(96), sample(64).into_iter().map(|j| j % order).collect())
    };
    let roots: Vec<Complex64> = (0..order)
        .map(|t| Character::new(1, order).at_exponent(t))
        .collect();
    let mut max_error = 0.0f64;
    let mut checks = 0u64;
    for &xc in &xs {
        let x = ctx.from_code(dlog.exp_code(xc))?;
        let lx = dlog.log(ctx, &x)?;
        for &yc in &xs {
            let y = ctx.from_code(dlog.exp_code(yc))?;
            let ly = dlog.log(ctx, &y)?;
            let lxy = dlog.log(ctx, &ctx.mul(&x, &y))?;
            if exhaustive {
                // j runs over 0..order, so step the root indices by the logs
                let (mut ix, mut iy, mut ixy) = (0u64, 0u64, 0u64);
                let mut worst = 0.0f64;
                for _ in 0..order {
                    let err = (roots[ix as usize] * roots[iy as usize] - roots[ixy as usize]).norm_sqr();
                    worst = worst.max(err);
                    ix = step(ix, lx, order);
                    iy = step(iy, ly, order);
                    ixy = step(ixy, lxy, order);
                }
                max_error = max_error.max(worst.sqrt());
                checks += order;
                continue;
            }
            for &j in &js {
                let at = |l: u64| roots[(j as u128 * l as u128 % order as u128) as usize];
                let err = (at(lx) * at(ly) - at(lxy)).norm();
                max_error = max_error.max(err);
                checks += 1;
            }
        }
    }
    let tolerance = 1e-6 * order as f64;
    Ok(MultiplicativityReport {
        order,
        exhaustive,
        checks,
        max_error,
        tolerance,
        pass: max_error <= tolerance,
    })
}

#[inline]
fn step(i: u64, by: u64, order: u64) -> u64 {
    let next = i + by;
    if next >= order {
        next - order
    } else {
        next
    }
}
