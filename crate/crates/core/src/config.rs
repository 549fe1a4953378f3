//! Resource caps shared by every pipeline stage.

use serde::{Deserialize, Serialize};

/// Environment variable overriding the default [`Caps::max_order`].
pub const MAX_ORDER_ENV: &str = "POLYDIAM_MAX_ORDER";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest multiplicative group order `q^n - 1` for BFS and dlog tables.
    pub max_order: u64,
    /// Largest number of candidate polynomials `q^d` scanned per degree.
    pub max_enumeration: u64,
    /// Largest trial divisor used when factoring group orders.
    pub max_factor: u64,
    /// Largest field size `q^n` for full character enumeration.
    pub max_character_field: u64,
    /// Largest field size `q^n` for the moment check.
    pub max_moment_field: u64,
    /// Largest `(#I_d)^(2m)` for the moment check.
    pub max_moment_tuples: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_order: 1 << 24,
            max_enumeration: 10_000_000,
            max_factor: 1 << 32,
            max_character_field: 100_000,
            max_moment_field: 10_000,
            max_moment_tuples: 100_000_000,
        }
    }
}

impl Caps {
    /// Defaults, with `max_order` taken from [`MAX_ORDER_ENV`] when set.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Some(v) = std::env::var(MAX_ORDER_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
        {
            caps.max_order = v;
        }
        caps
    }
}
