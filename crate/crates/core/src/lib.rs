//! Cayley graphs on `F_{q^n}^*` generated by the values at a root `alpha`
//! of monic prime-power polynomials of degree `d`, their exact diameters,
//! the multiplicative character sums that control them, and closed-form
//! diameter bounds.
//!
//! Layering, bottom up: [`ff`] (field arithmetic), [`poly_enum`] (`I_d`,
//! `P_d`, von Mangoldt weights), [`charsum`] (dlog tables, characters,
//! representation counts), [`cayley`] (generators, BFS diameter),
//! [`bounds`], [`report`] (cells, sweeps, output formats) and [`verify`]
//! (the acceptance battery).

pub mod arith;
pub mod bounds;
pub mod cayley;
pub mod charsum;
pub mod config;
pub mod error;
pub mod ff;
pub mod poly_enum;
pub mod report;
pub mod verify;

pub use config::Caps;
pub use error::{Error, Result};
