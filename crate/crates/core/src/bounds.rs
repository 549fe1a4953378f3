//! Closed-form upper bounds on `D(alpha, d)` with their preconditions.
//!
//! All logarithms are natural. A bound whose precondition fails evaluates to
//! [`Bound::NotApplicable`] rather than an error, so sweeps can record the
//! cell and move on.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::arith;
use crate::cayley;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::ff::FieldContext;

/// `m = ceil(n/d) - 1`, the largest `m` with `d m < n`.
pub fn moment_exponent(n: u64, d: u64) -> u64 {
    assert!(d >= 1, "d must be positive");
    n.div_ceil(d) - 1
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    Value(f64),
    NotApplicable(&'static str),
}

impl Bound {
    pub fn value(&self) -> Option<f64> {
        match self {
            Bound::Value(v) => Some(*v),
            Bound::NotApplicable(_) => None,
        }
    }

    pub fn floor(&self) -> Option<u64> {
        self.value().map(|v| v.floor() as u64)
    }

    /// `Some(true)` when `diameter` exceeds an applicable bound.
    pub fn violated_by(&self, diameter: u32) -> Option<bool> {
        self.value().map(|v| diameter as f64 > v)
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Value(v) => s.serialize_f64(*v),
            Bound::NotApplicable(_) => s.serialize_none(),
        }
    }
}

fn half_power_ok(q: u64, n: u64, d: u64) -> bool {
    arith::below_half_power_plus_one(n, q, d as u32)
}

/// `(2n/d) (1 + 2 log(n-1) / (d log q - 2 log(n-1))) + 1`, valid for
/// `n >= 2` and `n < q^(d/2) + 1`.
pub fn baseline_bound(q: u64, n: u64, d: u64) -> Bound {
    if q < 2 || d == 0 {
        return Bound::NotApplicable("needs q >= 2 and d >= 1");
    }
    if n < 2 {
        return Bound::NotApplicable("needs n >= 2");
    }
    if !half_power_ok(q, n, d) {
        return Bound::NotApplicable("needs n < q^(d/2) + 1");
    }
    let (n, d, lq) = (n as f64, d as f64, (q as f64).ln());
    let ln1 = (n - 1.0).ln();
    let denom = d * lq - 2.0 * ln1;
    Bound::Value(2.0 * n / d * (1.0 + 2.0 * ln1 / denom) + 1.0)
}

/// The improved bound for `d >= 2`:
/// `(2n/d)(1 + (log(n-1) - 1)/L) + (4 log(n-1) + 7)/L` with
/// `L = d log q - 2 log(n-1)`, valid for `2d + 1 <= n < q^(d/2) + 1`.
pub fn improved_bound(q: u64, n: u64, d: u64) -> Bound {
    if q < 2 {
        return Bound::NotApplicable("needs q >= 2");
    }
    if d < 2 {
        return Bound::NotApplicable("needs d >= 2");
    }
    if n < 2 * d + 1 {
        return Bound::NotApplicable("needs n >= 2d + 1");
    }
    if !half_power_ok(q, n, d) {
        return Bound::NotApplicable("needs n < q^(d/2) + 1");
    }
    let log_n1 = ((n - 1) as f64).ln();
    let l = d as f64 * (q as f64).ln() - 2.0 * log_n1;
    let main = (2 * n) as f64 / d as f64 * (1.0 + (log_n1 - 1.0) / l);
    Bound::Value(main + (4.0 * log_n1 + 7.0) / l)
}

/// The improved bound for `d = 1`:
/// `2n(1 + (log(n-1) - 1)/L) + (3 log(n-1) + 3)/L` with
/// `L = log q - 2 log(n-1)`, valid for `3 <= n < q^(1/2) + 1`.
pub fn improved_linear_bound(q: u64, n: u64) -> Bound {
    if n < 3 {
        return Bound::NotApplicable("needs n >= 3");
    }
    if q < 2 || (n - 1) * (n - 1) >= q {
        return Bound::NotApplicable("needs n < q^(1/2) + 1");
    }
    let nf = n as f64;
    let lg = (nf - 1.0).ln();
    let gap = (q as f64).ln() - 2.0 * lg;
    Bound::Value(2.0 * nf * (1.0 + (lg - 1.0) / gap) + (3.0 * lg + 3.0) / gap)
}

/// `#I_d >= q^d/d - 2 q^(d/2)/d`.
pub fn irreducible_lower_bound(q: u64, d: u64) -> f64 {
    let (q, d) = (q as f64, d as f64);
    (q.powf(d) - 2.0 * q.powf(d / 2.0)) / d
}

/// The cited large-`q` regime: `D(alpha, 1) <= n + 2` once
/// `q >= (n (n+2)!)^2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LargeFieldRegime {
    pub applicable: bool,
    pub threshold: String,
    pub bound: u64,
}

pub fn large_field_regime(q: u64, n: u64) -> LargeFieldRegime {
    let fact: BigUint = (1..=n + 2).fold(BigUint::one(), |acc, i| acc * i);
    let threshold = (fact * n).pow(2);
    LargeFieldRegime {
        applicable: BigUint::from(q) >= threshold,
        threshold: threshold.to_string(),
        bound: n + 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticConstants {
    pub theta: f64,
    /// `(2 - 2 theta) / (1 - 2 theta)`.
    pub improved: f64,
    /// `2 / (1 - 2 theta)`.
    pub old: f64,
}

/// Leading constants of `D <= (c + o(1)) n/d` when `n = q^(theta d)`.
pub fn asymptotic_constants(theta: f64) -> Result<AsymptoticConstants> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, 1/2)")));
    }
    Ok(AsymptoticConstants {
        theta,
        improved: (2.0 - 2.0 * theta) / (1.0 - 2.0 * theta),
        old: 2.0 / (1.0 - 2.0 * theta),
    })
}

/// `theta` with `n = q^(theta d)`, i.e. `log n / (d log q)`.
pub fn theta_of(q: u64, n: u64, d: u64) -> f64 {
    (n as f64).ln() / (d as f64 * (q as f64).ln())
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundInput {
    pub q: u64,
    pub n: u64,
    pub d: u64,
    pub m: u64,
}

impl BoundInput {
    pub fn new(q: u64, n: u64, d: u64) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::Precondition("n and d must be positive".into()));
        }
        Ok(BoundInput {
            q,
            n,
            d,
            m: moment_exponent(n, d),
        })
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ViolationFlags {
    pub lwwz: Option<bool>,
    pub thm1: Option<bool>,
    pub thm2: Option<bool>,
}

impl ViolationFlags {
    pub fn any(&self) -> bool {
        [self.lwwz, self.thm1, self.thm2].contains(&Some(true))
    }

    pub fn names(&self) -> Vec<&'static str> {
        [("bound_lwwz", self.lwwz), ("bound_thm1", self.thm1), ("bound_thm2", self.thm2)]
            .into_iter()
            .filter(|(_, v)| *v == Some(true))
            .map(|(k, _)| k)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub input: BoundInput,
    pub lwwz: Bound,
    pub lwwz_floor: Option<u64>,
    pub thm1: Bound,
    pub thm1_floor: Option<u64>,
    pub thm2: Bound,
    pub thm2_floor: Option<u64>,
    pub katz_cohen: LargeFieldRegime,
    pub theta: f64,
    /// Whether `n < q^(d/2) + 1`, under which connectivity is guaranteed.
    pub connectivity_guaranteed: bool,
    pub connected: Option<bool>,
    pub exact_diameter: Option<u32>,
    pub flags: Option<ViolationFlags>,
}

impl BoundReport {
    pub fn new(q: u64, n: u64, d: u64) -> Result<Self> {
        let input = BoundInput::new(q, n, d)?;
        let lwwz = baseline_bound(q, n, d);
        let thm1 = improved_bound(q, n, d);
        let thm2 = if d == 1 {
            improved_linear_bound(q, n)
        } else {
            Bound::NotApplicable("only for d = 1")
        };
        Ok(BoundReport {
            input,
            lwwz_floor: lwwz.floor(),
            thm1_floor: thm1.floor(),
            thm2_floor: thm2.floor(),
            lwwz,
            thm1,
            thm2,
            katz_cohen: large_field_regime(q, n),
            theta: theta_of(q, n, d),
            connectivity_guaranteed: n >= 1 && half_power_ok(q, n, d),
            connected: None,
            exact_diameter: None,
            flags: None,
        })
    }

    /// Attach an exact diameter (or `None` for a disconnected graph) and
    /// compute violation flags.
    pub fn with_diameter(mut self, connected: bool, diameter: Option<u32>) -> Self {
        self.connected = Some(connected);
        self.exact_diameter = diameter;
        self.flags = Some(match diameter {
            Some(dm) => ViolationFlags {
                lwwz: self.lwwz.violated_by(dm),
                thm1: self.thm1.violated_by(dm),
                thm2: self.thm2.violated_by(dm),
            },
            // an applicable bound on a disconnected graph is violated
            None => ViolationFlags {
                lwwz: self.lwwz.value().map(|_| true),
                thm1: self.thm1.value().map(|_| true),
                thm2: self.thm2.value().map(|_| true),
            },
        });
        self
    }
}

/// All bounds for one cell, plus the exact diameter when `run_bfs`.
pub fn compare(ctx: &FieldContext, d: usize, run_bfs: bool, caps: &Caps) -> Result<BoundReport> {
    let report = BoundReport::new(ctx.q(), ctx.n() as u64, d as u64)?;
    if !run_bfs {
        return Ok(report);
    }
    let r = cayley::diameter(ctx, d, caps)?;
    Ok(report.with_diameter(r.connected, r.diameter))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn anchor_values() {
        let b = baseline_bound(5, 5, 2).value().unwrap();
        assert!(close(b, 37.06, 0.01), "{b}");
        let t1 = improved_bound(5, 5, 2).value().unwrap();
        assert!(close(t1, 37.44, 0.01), "{t1}");
        let t2 = improved_linear_bound(11, 3).value().unwrap();
        assert!(close(t2, 9.20, 0.01), "{t2}");
    }

    #[test]
    fn n_equals_two_and_large_q() {
        assert_eq!(baseline_bound(7, 2, 1), Bound::Value(5.0));
        assert_eq!(baseline_bound(1 << 30, 2, 3), Bound::Value(2.0 * 2.0 / 3.0 + 1.0));
        let limit = 2.0 * 6.0 / 4.0 + 1.0;
        let gaps: Vec<f64> = [10u32, 20, 40, 62]
            .iter()
            .map(|&e| baseline_bound(1 << e, 6, 4).value().unwrap() - limit)
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0), "{gaps:?}");
        assert!(gaps[3] < 0.07);
    }

    #[test]
    fn preconditions() {
        assert!(improved_bound(5, 4, 2).value().is_none());
        assert!(improved_bound(5, 6, 2).value().is_none());
        assert!(improved_bound(5, 5, 1).value().is_none());
        assert!(improved_linear_bound(4, 3).value().is_none());
        assert!(improved_linear_bound(9, 3).value().is_some());
        assert!(improved_linear_bound(9, 4).value().is_none());
        assert!(improved_linear_bound(100, 2).value().is_none());
        assert!(baseline_bound(2, 3, 1).value().is_none());
    }

    #[test]
    fn linear_bound_decreases_in_q() {
        let a = improved_linear_bound(11, 3).value().unwrap();
        let b = improved_linear_bound(101, 3).value().unwrap();
        assert!(b < a);
    }

    #[test]
    fn large_field_threshold() {
        let r = large_field_regime(2, 3);
        assert_eq!(r.threshold, "129600");
        assert!(!r.applicable);
        assert_eq!(r.bound, 5);
        assert!(large_field_regime(129_600, 3).applicable);
    }

    #[test]
    fn asymptotics() {
        let c = asymptotic_constants(0.25).unwrap();
        assert!(close(c.improved, 3.0, 1e-12) && close(c.old, 4.0, 1e-12));
        let c = asymptotic_constants(0.4).unwrap();
        assert!(close(c.improved, 6.0, 1e-9) && close(c.old, 10.0, 1e-9));
        let c = asymptotic_constants(1e-9).unwrap();
        assert!(close(c.improved, 2.0, 1e-6) && close(c.old, 2.0, 1e-6));
        assert!(asymptotic_constants(0.5).is_err());
        assert!(asymptotic_constants(0.0).is_err());
        assert!(close(theta_of(4, 2, 1), 0.5, 1e-12));
    }

    #[test]
    fn report_flags() {
        let r = BoundReport::new(5, 5, 2).unwrap();
        assert!(r.flags.is_none());
        let ok = r.clone().with_diameter(true, Some(5));
        assert!(!ok.flags.as_ref().unwrap().any());
        let bad = r.with_diameter(true, Some(38));
        assert_eq!(bad.flags.unwrap().names(), ["bound_lwwz", "bound_thm1"]);
    }
}
