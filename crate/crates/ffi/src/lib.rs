//! C ABI over `polydiam`.
//!
//! Conventions:
//! - Every fallible function returns a [`PdStatus`] and writes its result
//!   through an out-pointer, which is left untouched on failure.
//! - Fields are opaque [`PdField`] handles from [`pd_field_new`], released
//!   with [`pd_field_free`].
//! - Strings returned to the caller are owned by the caller and must be
//!   released with [`pd_string_free`].
//! - After a non-`OK` status, [`pd_last_error_message`] describes the error
//!   for the calling thread.
//! - Panics never cross the boundary; they surface as `PD_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_traits::ToPrimitive;
use polydiam::bounds::{baseline_bound, improved_bound, improved_linear_bound, Bound};
use polydiam::charsum::verify_weil;
use polydiam::ff::FieldContext;
use polydiam::poly_enum::count_irreducibles;
use polydiam::{Caps, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Invalid input: not a prime power, reducible modulus, bad degree, ...
    InvalidArgument = 2,
    /// The request exceeds a resource cap (see the error message).
    ResourceCap = 3,
    /// The bound's precondition does not hold for these parameters.
    NotApplicable = 4,
    /// The result does not fit the output type.
    Overflow = 5,
    Internal = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Opaque handle to `F_{q^n}` with its modulus and resource caps.
pub struct PdField {
    ctx: FieldContext,
    caps: Caps,
}

/// Diameter of the Cayley digraph on `F_{q^n}^*`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PdDiameter {
    pub connected: bool,
    /// `UINT32_MAX` when the graph is disconnected.
    pub diameter: u32,
    /// Number of distinct generator values.
    pub distinct_generators: u64,
    /// Out-degree counted with multiplicity (`#P_d`).
    pub regularity: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: PdStatus, msg: impl Into<String>) -> PdStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> PdStatus {
    let status = match e {
        Error::Domain(_) | Error::Precondition(_) | Error::Parse(_) => PdStatus::InvalidArgument,
        Error::ResourceCap { .. } => PdStatus::ResourceCap,
        Error::Internal(_) => PdStatus::Internal,
    };
    fail(status, e.to_string())
}

/// Run `f`, converting panics to [`PdStatus::Panic`].
fn guard(f: impl FnOnce() -> PdStatus) -> PdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(PdStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn write_bound(b: Bound, out: *mut f64) -> PdStatus {
    match b {
        Bound::Value(v) => {
            // SAFETY: callers check `out` for null before calling.
            unsafe { *out = v };
            PdStatus::Ok
        }
        Bound::NotApplicable(why) => fail(PdStatus::NotApplicable, why),
    }
}

/// Create `F_{q^n}`. `modulus` is either null (use the first monic
/// irreducible of degree `n` in code order) or a NUL-terminated list of
/// ascending coefficient codes such as `"1,1,0,1"`.
///
/// # Safety
/// `modulus` must be null or a valid C string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_field_new(q: u64, n: u32, modulus: *const c_char, out: *mut *mut PdField) -> PdStatus {
    guard(|| {
        if out.is_null() {
            return fail(PdStatus::NullPointer, "out is null");
        }
        let modulus = if modulus.is_null() {
            None
        } else {
            match CStr::from_ptr(modulus).to_str() {
                Ok(s) => Some(s.to_owned()),
                Err(_) => return fail(PdStatus::InvalidArgument, "modulus is not UTF-8"),
            }
        };
        match FieldContext::with_q(q, n as usize, modulus.as_deref()) {
            Ok(ctx) => {
                *out = Box::into_raw(Box::new(PdField { ctx, caps: Caps::from_env() }));
                PdStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Release a field. Null is ignored.
///
/// # Safety
/// `field` must be null or a handle from [`pd_field_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_field_free(field: *mut PdField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of elements `q^n`.
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_field_order(field: *const PdField, out: *mut u64) -> PdStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return fail(PdStatus::NullPointer, "field or out is null");
        };
        *out = f.ctx.size();
        PdStatus::Ok
    })
}

/// The modulus as ascending coefficient codes, e.g. `"1,1,0,1"`. Release
/// with [`pd_string_free`].
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_field_modulus(field: *const PdField, out: *mut *mut c_char) -> PdStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return fail(PdStatus::NullPointer, "field or out is null");
        };
        match CString::new(f.ctx.modulus().to_csv()) {
            Ok(s) => {
                *out = s.into_raw();
                PdStatus::Ok
            }
            Err(_) => fail(PdStatus::Internal, "modulus string contains NUL"),
        }
    })
}

/// Override the largest group order `q^n - 1` accepted by [`pd_diameter`]
/// and [`pd_max_weil_ratio`] for this handle.
///
/// # Safety
/// `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_field_set_max_order(field: *mut PdField, max_order: u64) -> PdStatus {
    guard(|| {
        let Some(f) = field.as_mut() else {
            return fail(PdStatus::NullPointer, "field is null");
        };
        if max_order == 0 {
            return fail(PdStatus::InvalidArgument, "max_order must be positive");
        }
        f.caps.max_order = max_order;
        PdStatus::Ok
    })
}

/// Exact diameter of the Cayley digraph generated by the values at `alpha`
/// of the monic prime-power polynomials of degree `d` (`1 <= d < n`).
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_diameter(field: *const PdField, d: u32, out: *mut PdDiameter) -> PdStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return fail(PdStatus::NullPointer, "field or out is null");
        };
        match polydiam::cayley::diameter(&f.ctx, d as usize, &f.caps) {
            Ok(r) => {
                *out = PdDiameter {
                    connected: r.connected,
                    diameter: r.diameter.unwrap_or(u32::MAX),
                    distinct_generators: r.distinct_generators as u64,
                    regularity: r.regularity,
                };
                PdStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of monic irreducible polynomials of degree `d` over `F_q`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_count_irreducibles(q: u64, d: u32, out: *mut u64) -> PdStatus {
    guard(|| {
        if out.is_null() {
            return fail(PdStatus::NullPointer, "out is null");
        }
        match count_irreducibles(q, d) {
            Ok(c) => match c.to_u64() {
                Some(v) => {
                    *out = v;
                    PdStatus::Ok
                }
                None => fail(PdStatus::Overflow, format!("count {c} exceeds 64 bits")),
            },
            Err(e) => from_error(e),
        }
    })
}

/// The baseline diameter bound, valid for `n >= 2` and `n < q^(d/2) + 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_bound_baseline(q: u64, n: u64, d: u64, out: *mut f64) -> PdStatus {
    guard(|| {
        if out.is_null() {
            return fail(PdStatus::NullPointer, "out is null");
        }
        write_bound(baseline_bound(q, n, d), out)
    })
}

/// The improved bound for `d >= 2`, valid for `2d + 1 <= n < q^(d/2) + 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_bound_improved(q: u64, n: u64, d: u64, out: *mut f64) -> PdStatus {
    guard(|| {
        if out.is_null() {
            return fail(PdStatus::NullPointer, "out is null");
        }
        write_bound(improved_bound(q, n, d), out)
    })
}

/// The improved bound for `d = 1`, valid for `3 <= n < q^(1/2) + 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_bound_improved_linear(q: u64, n: u64, out: *mut f64) -> PdStatus {
    guard(|| {
        if out.is_null() {
            return fail(PdStatus::NullPointer, "out is null");
        }
        write_bound(improved_linear_bound(q, n), out)
    })
}

/// `max_{j != 0} |S(chi_j)| / ((n - 1) q^(d/2))`; at most 1 up to rounding.
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pd_max_weil_ratio(field: *const PdField, d: u32, out: *mut f64) -> PdStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return fail(PdStatus::NullPointer, "field or out is null");
        };
        if d == 0 || d as usize >= f.ctx.n() {
            return fail(PdStatus::InvalidArgument, "need 1 <= d < n");
        }
        match verify_weil(&f.ctx, d as usize, &f.caps) {
            Ok(w) => {
                *out = w.ratio;
                PdStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// A copy of the calling thread's last error message, or null if none.
/// Release with [`pd_string_free`].
#[no_mangle]
pub extern "C" fn pd_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(s) => s.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
