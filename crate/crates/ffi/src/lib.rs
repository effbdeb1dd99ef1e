//! C interface to `equideg`.
//!
//! Every function returns an [`EqdStatus`] and writes its result through an
//! out-pointer. On failure a message is kept per thread and can be read with
//! [`eqd_last_error`]. Handles are opaque; free them with the matching
//! `*_free` function. Strings returned by the library are NUL-terminated UTF-8
//! and must be released with [`eqd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use equideg::bessel::{self, BesselZeroTable, TableConfig};
use equideg::burnside::{self, BurnsideElement, OrbitType};
use equideg::caps::Caps;
use equideg::cli::{self, BifurcateArgs, Command, CommonArgs, ExistArgs};
use equideg::spectral::{DEFAULT_GUARD, DEFAULT_SPECTRAL_TOL};
use equideg::Error;

/// Result codes. Values 0 to 6 coincide with the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqdStatus {
    Ok = 0,
    Other = 1,
    InvalidInput = 2,
    NoCertificate = 3,
    Degenerate = 4,
    NonIsolated = 5,
    Capacity = 6,
    NullPointer = 7,
    Panic = 8,
}

/// Memoised table of Bessel zeros.
pub struct EqdZeroTable(BesselZeroTable);

/// An element of the tracked Burnside sublattice.
pub struct EqdElement(BurnsideElement);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> EqdStatus {
    match cli::exit_code(err) {
        2 => EqdStatus::InvalidInput,
        4 => EqdStatus::Degenerate,
        5 => EqdStatus::NonIsolated,
        6 => EqdStatus::Capacity,
        _ => EqdStatus::Other,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<EqdStatus, Fail>) -> EqdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer passed as `{what}`"));
            EqdStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            EqdStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(name))
}

unsafe fn modes_slice<'a>(modes: *const u32, len: usize) -> Result<&'a [u32], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if modes.is_null() {
        return Err(Fail::Null("modes"));
    }
    Ok(std::slice::from_raw_parts(modes, len))
}

unsafe fn input_str<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null("input"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail::Lib(Error::Schema("input is not valid UTF-8".into())))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eqd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn eqd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Bessel function of the first kind `J_m(x)`, for `x >= 0`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqd_bessel_j(m: u32, x: f64, out: *mut f64) -> EqdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = bessel::eval_bessel_j(m, x)?;
        Ok(EqdStatus::Ok)
    })
}

/// Creates a zero table. Zero for either cap selects the default.
///
/// # Safety
/// `out` must be a valid pointer; the handle written there must be freed with
/// [`eqd_table_free`].
#[no_mangle]
pub unsafe extern "C" fn eqd_table_new(mode_cap: u32, index_cap: u32, out: *mut *mut EqdZeroTable) -> EqdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let mut config = TableConfig::default();
        if mode_cap > 0 {
            config.mode_cap = mode_cap;
        }
        if index_cap > 0 {
            config.index_cap = index_cap;
        }
        *out = Box::into_raw(Box::new(EqdZeroTable(BesselZeroTable::new(config))));
        Ok(EqdStatus::Ok)
    })
}

/// # Safety
/// `table` must be NULL or a handle from [`eqd_table_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eqd_table_free(table: *mut EqdZeroTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// The `n`-th positive zero of `J_m` (`n >= 1`).
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqd_table_zero(table: *const EqdZeroTable, m: u32, n: u32, out: *mut f64) -> EqdStatus {
    guard(|| {
        let t = table.as_ref().ok_or(Fail::Null("table"))?;
        *out_ref(out, "out")? = t.0.zero(m, n)?;
        Ok(EqdStatus::Ok)
    })
}

/// Dirichlet eigenvalue `s_{m,n}` of the unit disc, the square of the zero.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqd_table_eigenvalue(table: *const EqdZeroTable, m: u32, n: u32, out: *mut f64) -> EqdStatus {
    guard(|| {
        let t = table.as_ref().ok_or(Fail::Null("table"))?;
        *out_ref(out, "out")? = t.0.laplacian_eigenvalue(m, n)?;
        Ok(EqdStatus::Ok)
    })
}

/// Compatibility predicate on a set of positive modes.
///
/// # Safety
/// `modes` must point to `len` values (it may be NULL when `len` is 0) and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqd_predicate_b(modes: *const u32, len: usize, out: *mut bool) -> EqdStatus {
    guard(|| {
        let modes = modes_slice(modes, len)?;
        *out_ref(out, "out")? = burnside::predicate_b(modes)?;
        Ok(EqdStatus::Ok)
    })
}

/// Coefficient of `(H_{m0})` in the product of basic degrees over `modes`,
/// from the closed-form sum.
///
/// # Safety
/// As for [`eqd_predicate_b`].
#[no_mangle]
pub unsafe extern "C" fn eqd_closed_form_coeff(modes: *const u32, len: usize, m0: u32, out: *mut i64) -> EqdStatus {
    guard(|| {
        let modes = modes_slice(modes, len)?;
        *out_ref(out, "out")? = burnside::closed_form_coeff(modes, m0)?;
        Ok(EqdStatus::Ok)
    })
}

/// Product of the basic degrees of `modes` (the empty product is the unit).
///
/// # Safety
/// `modes` as for [`eqd_predicate_b`]; the handle written to `out` must be
/// freed with [`eqd_element_free`].
#[no_mangle]
pub unsafe extern "C" fn eqd_element_product(modes: *const u32, len: usize, out: *mut *mut EqdElement) -> EqdStatus {
    guard(|| {
        let modes = modes_slice(modes, len)?;
        let out = out_ref(out, "out")?;
        let e = burnside::product_of_basic_degrees(modes)?;
        *out = Box::into_raw(Box::new(EqdElement(e)));
        Ok(EqdStatus::Ok)
    })
}

/// Ring product of two elements.
///
/// # Safety
/// `a` and `b` must be live handles; the result must be freed with
/// [`eqd_element_free`].
#[no_mangle]
pub unsafe extern "C" fn eqd_element_multiply(
    a: *const EqdElement,
    b: *const EqdElement,
    out: *mut *mut EqdElement,
) -> EqdStatus {
    guard(|| {
        let a = a.as_ref().ok_or(Fail::Null("a"))?;
        let b = b.as_ref().ok_or(Fail::Null("b"))?;
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(EqdElement(burnside::multiply(&a.0, &b.0)?)));
        Ok(EqdStatus::Ok)
    })
}

/// Coefficient of an orbit type: `m0 = 0` reads the unit `(G)`, `m0 >= 1`
/// reads `(H_{m0})`.
///
/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eqd_element_coeff(e: *const EqdElement, m0: u32, out: *mut i64) -> EqdStatus {
    guard(|| {
        let e = e.as_ref().ok_or(Fail::Null("element"))?;
        let orbit = if m0 == 0 {
            OrbitType::Unit
        } else {
            OrbitType::Dihedral(m0)
        };
        *out_ref(out, "out")? = e.0.coeff(orbit);
        Ok(EqdStatus::Ok)
    })
}

/// JSON form of an element.
///
/// # Safety
/// `e` must be a live handle; the string written to `out` must be freed with
/// [`eqd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn eqd_element_json(e: *const EqdElement, out: *mut *mut c_char) -> EqdStatus {
    guard(|| {
        let e = e.as_ref().ok_or(Fail::Null("element"))?;
        let out = out_ref(out, "out")?;
        *out = into_c_string(serde_json::to_string(&e.0).map_err(Error::from)?);
        Ok(EqdStatus::Ok)
    })
}

/// # Safety
/// `e` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eqd_element_free(e: *mut EqdElement) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

fn common(input: &str, assert_hypotheses: bool) -> Result<CommonArgs, Fail> {
    // only inline JSON; the command-line path and stdin forms stay in the binary
    if !input.trim_start().starts_with('{') {
        return Err(Fail::Lib(Error::Schema("input must be a JSON object".into())));
    }
    Ok(CommonArgs {
        input: input.to_string(),
        assert_hypotheses,
        guard: DEFAULT_GUARD,
        spectral_tol: DEFAULT_SPECTRAL_TOL,
    })
}

fn report(cmd: Command, out: &mut *mut c_char) -> Result<EqdStatus, Fail> {
    let o = cli::execute(&cmd, &Caps::default())?;
    *out = into_c_string(serde_json::to_string_pretty(&o.json).map_err(Error::from)?);
    Ok(if o.code == cli::EXIT_CERTIFIED {
        EqdStatus::Ok
    } else {
        EqdStatus::NoCertificate
    })
}

/// Existence report for a matrix or spectrum given as JSON, in the same
/// format as the `exist` command. Returns `NoCertificate` (with a report) when
/// the degree gives no certificate.
///
/// # Safety
/// `input` must be a NUL-terminated string; the report written to `out` must
/// be freed with [`eqd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn eqd_exist_json(
    input: *const c_char,
    assert_hypotheses: bool,
    out: *mut *mut c_char,
) -> EqdStatus {
    guard(|| {
        let input = input_str(input)?;
        let out = out_ref(out, "out")?;
        let cmd = Command::Exist(ExistArgs {
            common: common(input, assert_hypotheses)?,
        });
        report(cmd, out)
    })
}

/// Bifurcation report for a family given as JSON. When `lo < hi` the
/// interval `[lo, hi]` replaces any domain in the input; pass `lo = hi` to
/// use the input's own domain.
///
/// # Safety
/// As for [`eqd_exist_json`].
#[no_mangle]
pub unsafe extern "C" fn eqd_bifurcate_json(
    input: *const c_char,
    lo: f64,
    hi: f64,
    assert_hypotheses: bool,
    out: *mut *mut c_char,
) -> EqdStatus {
    guard(|| {
        let input = input_str(input)?;
        let out = out_ref(out, "out")?;
        let cmd = Command::Bifurcate(BifurcateArgs {
            common: common(input, assert_hypotheses)?,
            range: (lo != hi).then_some((lo, hi)),
            grid_step: None,
            tol: equideg::bifurcation::DEFAULT_REL_TOL,
        });
        report(cmd, out)
    })
}
