//! Multiplicative characters of `F_{q^n}^*`, the sums over `P_d` and `I_d`
//! they induce, and exact representation counters.

mod checks;
mod dlog;
mod repcount;
mod sums;

pub use checks::{
    check_multiplicativity, check_orthogonality, MultiplicativityReport, OrthogonalityReport,
    EXHAUSTIVE_MULTIPLICATIVITY_LIMIT,
};
pub use dlog::{find_primitive, DlogTable};
pub use repcount::{
    convolve, rep_count_mk, rep_count_nk, rep_count_plain, rep_count_weighted, summarize,
    RepCountSummary, RepCountVector,
};
pub use sums::{
    all_character_sums, cayley_spectrum, char_sum_records, compute_s, compute_t, log_weights,
    moment_report, multiset_collisions, s_spectrum, t_spectrum, verify_moment, verify_weil,
    weil_report, CharSumRecord, Character, MomentReport, WeilReport, FLOAT_REL_TOL,
};
