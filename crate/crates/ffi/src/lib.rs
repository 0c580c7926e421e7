//! C ABI over `plu`. Objects are opaque handles released with the matching
//! `*_free`. Strings returned through `char **` are released with
//! `plu_string_free`. Every call returns a `PluStatus`; on failure
//! `plu_last_error` describes it.

use plu::conditions::{check_star, check_star_n};
use plu::duality::dual_lattice;
use plu::io::{morphism_json, parse_morphism, parse_poset, poset_json};
use plu::morphism::factor_through_with;
use plu::product::odot;
use plu::typecheck::type_report;
use plu::witness::witness_chain_g;
use plu::{Budget, Error, PMorphism, Poset, Variety};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PluStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    BudgetExceeded = 5,
    TypeIsZero = 6,
    Mismatch = 7,
    Panic = 99,
}

pub struct PluPoset(Arc<Poset>);

pub struct PluMorphism(PMorphism);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PluStatus {
    match e {
        Error::Parse(_) => PluStatus::Parse,
        Error::SizeLimitExceeded(_) => PluStatus::BudgetExceeded,
        Error::TypeIsZero => PluStatus::TypeIsZero,
        Error::DomainMismatch(_)
        | Error::CodomainMismatch(_)
        | Error::VarietyMismatch(_)
        | Error::ContextMismatch(_)
        | Error::TargetNotG => PluStatus::Mismatch,
        _ => PluStatus::InvalidInput,
    }
}

struct Fail(PluStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PluStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PluStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            PluStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(PluStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(PluStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, Fail> {
    h.as_ref().ok_or_else(|| Fail(PluStatus::NullPointer, "null handle".into()))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(PluStatus::NullPointer, "null output pointer".into()))
}

fn variety(s: &str) -> Result<Variety, Fail> {
    Ok(s.parse::<Variety>()?)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(PluStatus::Panic, "interior nul in output".into()))?;
    *out_ptr(out)? = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn plu_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn plu_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn plu_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a poset document (`elements` plus `covers` or `leq`).
///
/// # Safety
/// `json` must be a nul-terminated string; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plu_poset_from_json(json: *const c_char, out: *mut *mut PluPoset) -> PluStatus {
    guard(|| {
        let p = parse_poset(str_arg(json)?)?;
        *out_ptr(out)? = Box::into_raw(Box::new(PluPoset(Arc::new(p))));
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn plu_poset_free(p: *mut PluPoset) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of elements, or 0 for a null handle.
///
/// # Safety
/// `p` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn plu_poset_len(p: *const PluPoset) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `p` must be a live handle; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plu_poset_to_json(p: *const PluPoset, out: *mut *mut c_char) -> PluStatus {
    guard(|| put_string(out, poset_json(&handle(p)?.0).to_string()))
}

/// Condition (*) when `n` is 0, otherwise (*_n).
///
/// # Safety
/// `p` must be a live handle; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plu_check_star(p: *const PluPoset, n: usize, out: *mut bool) -> PluStatus {
    guard(|| {
        let p = &handle(p)?.0;
        *out_ptr(out)? = if n == 0 { check_star(p) } else { check_star_n(p, n) };
        Ok(())
    })
}

/// Unification type as text: "1", "2", ..., or "0".
///
/// # Safety
/// `variety` is "b0", "b1", ..., "omega"; pointers as for the other calls.
#[no_mangle]
pub unsafe extern "C" fn plu_unification_type(
    p: *const PluPoset,
    variety: *const c_char,
    out: *mut *mut c_char,
) -> PluStatus {
    guard(|| {
        let v = self::variety(str_arg(variety)?)?;
        let r = type_report(&handle(p)?.0, v, &Budget::default())?;
        put_string(out, r.utype.to_string())
    })
}

/// Full type report with evidence, as JSON.
///
/// # Safety
/// As for `plu_unification_type`.
#[no_mangle]
pub unsafe extern "C" fn plu_type_report_json(
    p: *const PluPoset,
    variety: *const c_char,
    out: *mut *mut c_char,
) -> PluStatus {
    guard(|| {
        let v = self::variety(str_arg(variety)?)?;
        let r = type_report(&handle(p)?.0, v, &Budget::default())?;
        put_string(out, serde_json::to_string(&r).expect("reports serialize"))
    })
}

/// The product `x ⊙ y` as a new handle.
///
/// # Safety
/// `x`, `y` live handles; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plu_odot(x: *const PluPoset, y: *const PluPoset, out: *mut *mut PluPoset) -> PluStatus {
    guard(|| {
        let z = odot(&handle(x)?.0, &handle(y)?.0)?;
        *out_ptr(out)? = Box::into_raw(Box::new(PluPoset(Arc::new(z))));
        Ok(())
    })
}

/// The down-set algebra of `p` as an algebra document.
///
/// # Safety
/// `p` a live handle; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plu_dual_lattice_json(p: *const PluPoset, out: *mut *mut c_char) -> PluStatus {
    guard(|| put_string(out, dual_lattice(&handle(p)?.0)?.to_json().to_string()))
}

/// Parses a morphism document with inline posets and validates it.
///
/// # Safety
/// `json` nul-terminated; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plu_morphism_from_json(json: *const c_char, out: *mut *mut PluMorphism) -> PluStatus {
    guard(|| {
        let u = parse_morphism(str_arg(json)?, None)?;
        *out_ptr(out)? = Box::into_raw(Box::new(PluMorphism(u)));
        Ok(())
    })
}

/// # Safety
/// `u` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn plu_morphism_free(u: *mut PluMorphism) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// # Safety
/// `u` a live handle; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plu_morphism_to_json(u: *const PluMorphism, out: *mut *mut c_char) -> PluStatus {
    guard(|| put_string(out, morphism_json(&handle(u)?.0).to_string()))
}

/// The m-th unifier of the witness chain into G.
///
/// # Safety
/// `variety` nul-terminated; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plu_witness_chain_g(m: usize, variety: *const c_char, out: *mut *mut PluMorphism) -> PluStatus {
    guard(|| {
        let u = witness_chain_g(m, self::variety(str_arg(variety)?)?)?;
        *out_ptr(out)? = Box::into_raw(Box::new(PluMorphism(u)));
        Ok(())
    })
}

/// Whether `u` factors through `v` (u = v ∘ w for some p-morphism w).
///
/// # Safety
/// `u`, `v` live handles; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn plu_factor_through(u: *const PluMorphism, v: *const PluMorphism, out: *mut bool) -> PluStatus {
    guard(|| {
        let w = factor_through_with(&handle(u)?.0, &handle(v)?.0, &Budget::default())?;
        *out_ptr(out)? = w.is_some();
        Ok(())
    })
}
