//! C ABI over `clusteralg`.
//!
//! Seeds and morphisms cross the boundary as opaque heap handles, created
//! by `*_from_json` / constructors and released with the matching `*_free`.
//! Every fallible call returns a [`CaStatus`]; on anything but `Ok` a
//! message is available from [`ca_last_error`] on the same thread.
//! Strings returned through `char **` out-parameters are owned by the
//! caller and must be released with [`ca_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use clusteralg::morphism::{self, MorphismFile, MorphismSpec};
use clusteralg::seed::{Seed, SeedFile};
use clusteralg::surface;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaStatus {
    Ok = 0,
    /// A CM3 check found a counterexample; the report is still returned.
    VerificationFailed = 1,
    /// Malformed JSON or a value out of range.
    InvalidInput = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    /// The seed was rejected or an operation on it failed.
    SeedError = 5,
    /// The morphism was rejected or an operation on it failed.
    MorphismError = 6,
    /// An internal panic was caught at the boundary.
    Internal = 7,
}

/// Opaque seed handle.
pub struct CaSeed(Seed);

/// Opaque morphism handle.
pub struct CaMorphism(MorphismSpec);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let c = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type FfiResult<T> = Result<T, CaStatus>;

fn fail<T>(status: CaStatus, msg: impl ToString) -> FfiResult<T> {
    set_error(msg);
    Err(status)
}

/// Runs `f`, converting panics and errors into status codes.
fn guard(f: impl FnOnce() -> FfiResult<CaStatus>) -> CaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            CaStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(CaStatus::NullPointer, "null string argument");
    }
    CStr::from_ptr(p).to_str().or_else(|e| fail(CaStatus::InvalidUtf8, e))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> FfiResult<&'a T> {
    p.as_ref().map_or_else(|| fail(CaStatus::NullPointer, "null handle"), Ok)
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> FfiResult<CaStatus> {
    if out.is_null() {
        return fail(CaStatus::NullPointer, "null out-parameter");
    }
    *out = Box::into_raw(Box::new(v));
    Ok(CaStatus::Ok)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FfiResult<CaStatus> {
    if out.is_null() {
        return fail(CaStatus::NullPointer, "null out-parameter");
    }
    *out = CString::new(s).or_else(|e| fail(CaStatus::Internal, e))?.into_raw();
    Ok(CaStatus::Ok)
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> FfiResult<T> {
    serde_json::from_str(text).or_else(|e| fail(CaStatus::InvalidInput, e))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn ca_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ca_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `{"variables", "exchangeable", "matrix"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_seed_from_json(json: *const c_char, out: *mut *mut CaSeed) -> CaStatus {
    guard(|| {
        let f: SeedFile = parse_json(str_arg(json)?)?;
        let s = Seed::from_file(&f).or_else(|e| fail(CaStatus::SeedError, e))?;
        put(out, CaSeed(s))
    })
}

/// Serialises the seed's matrix and labels (not the expansions).
///
/// # Safety
/// `seed` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_seed_to_json(seed: *const CaSeed, out: *mut *mut c_char) -> CaStatus {
    guard(|| {
        let s = ref_arg(seed)?;
        put_string(out, serde_json::to_string(&s.0.to_file()).expect("serialisable"))
    })
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `seed` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ca_seed_len(seed: *const CaSeed) -> usize {
    seed.as_ref().map_or(0, |s| s.0.len())
}

/// Current label of variable `i`.
///
/// # Safety
/// `seed` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_seed_label(seed: *const CaSeed, i: usize, out: *mut *mut c_char) -> CaStatus {
    guard(|| {
        let s = &ref_arg(seed)?.0;
        if i >= s.len() {
            return fail(CaStatus::InvalidInput, format!("index {} out of range", i));
        }
        put_string(out, s.label(i).to_string())
    })
}

/// Variable `i` as a fraction in the root variables, e.g.
/// `(1 + x2 + x1*x3)/(x1*x2)`.
///
/// # Safety
/// `seed` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_seed_variable(seed: *const CaSeed, i: usize, out: *mut *mut c_char) -> CaStatus {
    guard(|| {
        let s = &ref_arg(seed)?.0;
        if i >= s.len() {
            return fail(CaStatus::InvalidInput, format!("index {} out of range", i));
        }
        put_string(out, s.expansion(i).to_fraction_string())
    })
}

/// Mutates at the variable named `label` into a new handle; the input is
/// left untouched.
///
/// # Safety
/// `seed` must be a live handle, `label` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ca_seed_mutate(seed: *const CaSeed, label: *const c_char, out: *mut *mut CaSeed) -> CaStatus {
    guard(|| {
        let s = &ref_arg(seed)?.0;
        let name = str_arg(label)?;
        let k = s.index_of(name).or_else(|e| fail(CaStatus::SeedError, e))?;
        let m = s.mutate(k).or_else(|e| fail(CaStatus::SeedError, e))?;
        put(out, CaSeed(m))
    })
}

/// DOT rendering of the quiver.
///
/// # Safety
/// `seed` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_seed_to_dot(seed: *const CaSeed, out: *mut *mut c_char) -> CaStatus {
    guard(|| put_string(out, ref_arg(seed)?.0.to_dot()))
}

/// Seed of the fan triangulation of the m-gon.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_polygon_fan_seed(m: u32, out: *mut *mut CaSeed) -> CaStatus {
    guard(|| {
        let t = surface::fan_triangulation(m).or_else(|e| fail(CaStatus::InvalidInput, e))?;
        put(out, CaSeed(surface::polygon_seed(&t)))
    })
}

/// # Safety
/// `seed` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ca_seed_free(seed: *mut CaSeed) {
    if !seed.is_null() {
        drop(Box::from_raw(seed));
    }
}

/// Parses `{"source", "target", "map"}`; CM1 and CM2 are enforced.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_morphism_from_json(json: *const c_char, out: *mut *mut CaMorphism) -> CaStatus {
    guard(|| {
        let f: MorphismFile = parse_json(str_arg(json)?)?;
        let m = MorphismSpec::from_file(&f).or_else(|e| fail(CaStatus::MorphismError, e))?;
        put(out, CaMorphism(m))
    })
}

/// # Safety
/// `m` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_morphism_to_json(m: *const CaMorphism, out: *mut *mut c_char) -> CaStatus {
    guard(|| put_string(out, serde_json::to_string(&ref_arg(m)?.0.to_file()).expect("serialisable")))
}

/// CM3 on all biadmissible sequences up to `depth`. Writes the JSON report
/// to `report` (if non-null) and returns `Ok` or `VerificationFailed`.
///
/// # Safety
/// `m` must be a live handle; `report` null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_morphism_verify(m: *const CaMorphism, depth: usize, report: *mut *mut c_char) -> CaStatus {
    guard(|| {
        let r = ref_arg(m)?.0.verify_cm3(depth).or_else(|e| fail(CaStatus::MorphismError, e))?;
        if !report.is_null() {
            put_string(report, serde_json::to_string(&r).expect("serialisable"))?;
        }
        if r.verified() {
            Ok(CaStatus::Ok)
        } else {
            set_error("CM3 failed; see the report");
            Ok(CaStatus::VerificationFailed)
        }
    })
}

/// `g ∘ f` into a new handle.
///
/// # Safety
/// `g`, `f` must be live handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ca_morphism_compose(g: *const CaMorphism, f: *const CaMorphism, out: *mut *mut CaMorphism) -> CaStatus {
    guard(|| {
        let c = morphism::compose(&ref_arg(g)?.0, &ref_arg(f)?.0).or_else(|e| fail(CaStatus::MorphismError, e))?;
        put(out, CaMorphism(c))
    })
}

/// # Safety
/// `m` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ca_morphism_free(m: *mut CaMorphism) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}
