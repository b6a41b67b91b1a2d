//! C ABI over `hdx-core`.
//!
//! Every fallible function returns an [`HdxStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can be
//! read with [`hdx_last_error`]. Strings handed out by the library must be
//! released with [`hdx_string_free`], complexes with [`hdx_complex_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hdx_core::builders::complete_complex;
use hdx_core::cochain::TwoComplex;
use hdx_core::complex::PureComplex;
use hdx_core::error::HdxError;
use hdx_core::expansion::{h1_bruteforce, Mode};
use hdx_core::group::FiniteGroup;
use hdx_core::io::ComplexFile;
use hdx_core::spectral::lambda2;
use hdx_core::suites::{run_suite, Params};
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HdxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    TooLarge = 4,
    Failed = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HdxMode {
    Coboundary = 0,
    Cosystolic = 1,
}

/// Exact h^1 value. `defined` is false when no cochain constrains the constant.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HdxRational {
    pub numerator: i64,
    pub denominator: i64,
    pub defined: bool,
}

/// Opaque handle to a weighted pure complex.
pub struct HdxComplex {
    inner: PureComplex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &HdxError) -> HdxStatus {
    match e {
        HdxError::Parse(_) | HdxError::Json(_) | HdxError::Malformed(_) => HdxStatus::Parse,
        HdxError::TooLarge(_) => HdxStatus::TooLarge,
        HdxError::Range(_) | HdxError::InvalidGroup(_) | HdxError::InvalidWeights(_) | HdxError::NotAFace(_) => {
            HdxStatus::InvalidArgument
        }
        _ => HdxStatus::Failed,
    }
}

struct Fail(HdxStatus, String);

impl From<HdxError> for Fail {
    fn from(e: HdxError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HdxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HdxStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HdxStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(HdxStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(HdxStatus::InvalidArgument, "string is not UTF-8".into()))
}

unsafe fn complex<'a>(c: *const HdxComplex) -> Result<&'a PureComplex, Fail> {
    c.as_ref().map(|c| &c.inner).ok_or_else(null)
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(HdxStatus::Failed, "interior NUL in output".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn give_complex(x: PureComplex, out: *mut *mut HdxComplex) {
    unsafe { *out = Box::into_raw(Box::new(HdxComplex { inner: x })) };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hdx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn hdx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hdx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The `d`-skeleton of the simplex on `n` vertices with uniform weights.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdx_complex_complete(n: usize, d: usize, out: *mut *mut HdxComplex) -> HdxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        give_complex(complete_complex(n, d)?, out);
        Ok(())
    })
}

/// Parses a complex from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdx_complex_from_json(json: *const c_char, out: *mut *mut HdxComplex) -> HdxStatus {
    guard(|| {
        let text = read_str(json)?;
        if out.is_null() {
            return Err(null());
        }
        let file: ComplexFile = serde_json::from_str(text).map_err(HdxError::from)?;
        give_complex(file.build()?, out);
        Ok(())
    })
}

/// Serializes a complex; release the string with [`hdx_string_free`].
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdx_complex_to_json(c: *const HdxComplex, out: *mut *mut c_char) -> HdxStatus {
    guard(|| {
        let x = complex(c)?;
        if out.is_null() {
            return Err(null());
        }
        let text = serde_json::to_string_pretty(&ComplexFile::from_complex(x)).map_err(HdxError::from)?;
        give_string(text, out)
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hdx_complex_free(c: *mut HdxComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle; returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn hdx_complex_vertex_count(c: *const HdxComplex) -> usize {
    c.as_ref().map_or(0, |c| c.inner.vertex_count())
}

/// # Safety
/// `c` must be a live handle; returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn hdx_complex_dimension(c: *const HdxComplex) -> usize {
    c.as_ref().map_or(0, |c| c.inner.dim())
}

/// Second largest eigenvalue of the random walk on the underlying graph.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdx_complex_lambda2(c: *const HdxComplex, out: *mut f64) -> HdxStatus {
    guard(|| {
        let x = complex(c)?;
        if out.is_null() {
            return Err(null());
        }
        *out = lambda2(&x.underlying_graph()?)?.lambda2;
        Ok(())
    })
}

/// Exact h^1 of the 2-skeleton by exhaustive search. `group` is `z2`, `z:m` or `sym:l`.
///
/// # Safety
/// `c` must be a live handle, `group` a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdx_complex_h1(
    c: *const HdxComplex,
    group: *const c_char,
    mode: HdxMode,
    out: *mut HdxRational,
) -> HdxStatus {
    guard(|| {
        let x = complex(c)?;
        let g = FiniteGroup::parse(read_str(group)?)?;
        if out.is_null() {
            return Err(null());
        }
        if x.dim() < 2 {
            return Err(Fail(HdxStatus::InvalidArgument, "h1 needs a complex of dimension at least 2".into()));
        }
        let two = TwoComplex::from_complex(&x.skeleton(2)?)?;
        let mode = match mode {
            HdxMode::Coboundary => Mode::Coboundary,
            HdxMode::Cosystolic => Mode::Cosystolic,
        };
        let value = h1_bruteforce(&two, &g, mode)?.value;
        let r = match value {
            None => HdxRational { numerator: 0, denominator: 1, defined: false },
            Some(v) => {
                let narrow = |n: &i128| n.to_i64().ok_or_else(|| Fail(HdxStatus::TooLarge, "value does not fit in i64".into()));
                HdxRational { numerator: narrow(v.numer())?, denominator: narrow(v.denom())?, defined: true }
            }
        };
        *out = r;
        Ok(())
    })
}

/// Runs a named experiment suite and hands back its JSON report. `passed`
/// receives whether every asserted check held.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` and `passed` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hdx_suite_run(name: *const c_char, seed: u64, out: *mut *mut c_char, passed: *mut bool) -> HdxStatus {
    guard(|| {
        let name = read_str(name)?;
        if out.is_null() || passed.is_null() {
            return Err(null());
        }
        let report = run_suite(name, seed, &Params::new())?;
        *passed = report.pass;
        give_string(report.to_json(), out)
    })
}
