//! C ABI over `legch`.
//!
//! Every fallible call returns a [`LegchStatus`] and writes its result through
//! an out-pointer. On failure the message is available from
//! [`legch_last_error`] on the same thread. Handles are opaque and owned by
//! the caller, who releases them with the matching `_free` function. Strings
//! returned through `char **` are released with [`legch_string_free`].

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use legch::holonomy::{kalman_monodromy, run_script};
use legch::knots::{connect_sum, is_even_delta_class, tangle_from_knot, torus_knot_dga, Tangle};
use legch::obstruction::family_verdicts;
use legch::schema::{
    dga_from_json, dga_to_json, script_from_json, tangle_from_json, tangle_to_json, to_json, MonodromyDoc,
    VerdictDoc, VerdictRowDoc,
};
use legch::{AlgebraMap, Dga, Error, Gen, Poly};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegchStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed text, JSON or names.
    Parse = 3,
    /// Well-formed input rejected by the algebra.
    Domain = 4,
    /// Exact answer too large to compute.
    Intractable = 5,
    Panic = 6,
}

/// A Z2 polynomial in the free algebra.
pub struct LegchPoly(Poly);

pub struct LegchDga(Dga);

pub struct LegchTangle(Tangle);

/// An algebra endomorphism.
pub struct LegchMap(AlgebraMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Failure {
    Null(&'static str),
    Utf8(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn classify(e: &Error) -> LegchStatus {
    match e {
        Error::InvalidName(_) | Error::InvalidPrefix(_) | Error::PolyParse { .. } | Error::Schema(_) => LegchStatus::Parse,
        Error::Intractable(_) => LegchStatus::Intractable,
        _ => LegchStatus::Domain,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LegchStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LegchStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} is null"));
            LegchStatus::NullPointer
        }
        Ok(Err(Failure::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            LegchStatus::InvalidUtf8
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            classify(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            LegchStatus::Panic
        }
    }
}

unsafe fn cstr<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    let c = CString::new(s).map_err(|_| Failure::Lib(Error::Schema("output contains a NUL byte".into())))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = value;
    Ok(())
}

fn to_u64(n: u128) -> Result<u64, Failure> {
    u64::try_from(n).map_err(|_| Failure::Lib(Error::Intractable(format!("{n} does not fit in 64 bits"))))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn legch_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn legch_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn legch_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses text such as `"1 + b1 b2"`.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_poly_parse(text: *const c_char, out: *mut *mut LegchPoly) -> LegchStatus {
    guard(|| {
        let p: Poly = cstr(text, "text")?.parse()?;
        put(out, LegchPoly(p))
    })
}

/// Canonical text of a polynomial.
///
/// # Safety
/// `poly` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_poly_to_string(poly: *const LegchPoly, out: *mut *mut c_char) -> LegchStatus {
    guard(|| put_string(out, handle(poly, "poly")?.0.to_string()))
}

/// # Safety
/// `a`, `b` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_poly_add(a: *const LegchPoly, b: *const LegchPoly, out: *mut *mut LegchPoly) -> LegchStatus {
    guard(|| put(out, LegchPoly(&handle(a, "a")?.0 + &handle(b, "b")?.0)))
}

/// # Safety
/// `a`, `b` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_poly_mul(a: *const LegchPoly, b: *const LegchPoly, out: *mut *mut LegchPoly) -> LegchStatus {
    guard(|| put(out, LegchPoly(&handle(a, "a")?.0 * &handle(b, "b")?.0)))
}

/// Number of words, not expanding abbreviations.
///
/// # Safety
/// `poly` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_poly_length(poly: *const LegchPoly, out: *mut u64) -> LegchStatus {
    guard(|| put_value(out, handle(poly, "poly")?.0.length() as u64))
}

/// # Safety
/// `poly` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn legch_poly_free(poly: *mut LegchPoly) {
    free(poly)
}

/// DGA of the (n, 2) torus knot.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_dga_torus_knot(n: u32, out: *mut *mut LegchDga) -> LegchStatus {
    guard(|| put(out, LegchDga(torus_knot_dga(n)?)))
}

/// Reads a `dga.v1` document.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_dga_from_json(json: *const c_char, out: *mut *mut LegchDga) -> LegchStatus {
    guard(|| put(out, LegchDga(dga_from_json(cstr(json, "json")?)?)))
}

/// # Safety
/// `dga` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_dga_to_json(dga: *const LegchDga, out: *mut *mut c_char) -> LegchStatus {
    guard(|| put_string(out, dga_to_json(&handle(dga, "dga")?.0)))
}

/// ∂ of one generator.
///
/// # Safety
/// `dga` is a live handle; `generator` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_dga_differential(
    dga: *const LegchDga,
    generator: *const c_char,
    out: *mut *mut LegchPoly,
) -> LegchStatus {
    guard(|| {
        let d = &handle(dga, "dga")?.0;
        let name = cstr(generator, "generator")?;
        let g = Gen::new(name)?;
        if !d.contains(g) {
            return Err(Error::UnknownGenerator(name.to_string()).into());
        }
        put(out, LegchPoly(d.differential(g).clone()))
    })
}

/// Writes whether d² = 0, degrees drop by one and the action decreases.
///
/// # Safety
/// `dga` is a live handle; `valid` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_dga_check(dga: *const LegchDga, valid: *mut bool) -> LegchStatus {
    guard(|| put_value(valid, handle(dga, "dga")?.0.check_dga().is_valid()))
}

/// # Safety
/// `dga` is a live handle; `even` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_dga_is_even_class(dga: *const LegchDga, even: *mut bool) -> LegchStatus {
    guard(|| put_value(even, is_even_delta_class(&handle(dga, "dga")?.0)?.0))
}

/// # Safety
/// `dga` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn legch_dga_free(dga: *mut LegchDga) {
    free(dga)
}

/// Cuts a knot open at the degree-1 crossing `closure`, renaming the rest
/// under `prefix` (may be empty).
///
/// # Safety
/// `dga` is a live handle; the strings are NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_tangle_from_knot(
    dga: *const LegchDga,
    closure: *const c_char,
    prefix: *const c_char,
    out: *mut *mut LegchTangle,
) -> LegchStatus {
    guard(|| {
        let d = &handle(dga, "dga")?.0;
        let c = Gen::new(cstr(closure, "closure")?)?;
        put(out, LegchTangle(tangle_from_knot(d, c, cstr(prefix, "prefix")?)?))
    })
}

/// Reads a `tangle.v1` document.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_tangle_from_json(json: *const c_char, out: *mut *mut LegchTangle) -> LegchStatus {
    guard(|| put(out, LegchTangle(tangle_from_json(cstr(json, "json")?)?)))
}

/// # Safety
/// `tangle` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_tangle_to_json(tangle: *const LegchTangle, out: *mut *mut c_char) -> LegchStatus {
    guard(|| put_string(out, tangle_to_json(&handle(tangle, "tangle")?.0)))
}

/// ℓ of the tangle's word.
///
/// # Safety
/// `tangle` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_tangle_word_length(tangle: *const LegchTangle, out: *mut u64) -> LegchStatus {
    guard(|| {
        let t = &handle(tangle, "tangle")?.0;
        put_value(out, to_u64(t.internal.length(&t.word)?)?)
    })
}

/// # Safety
/// `tangle` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn legch_tangle_free(tangle: *mut LegchTangle) {
    free(tangle)
}

/// Closes `count` tangles, in order, into one knot with closure crossing `closure`.
///
/// # Safety
/// `tangles` points to `count` live handles; `closure` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_connect_sum(
    tangles: *const *const LegchTangle,
    count: usize,
    closure: *const c_char,
    out: *mut *mut LegchDga,
) -> LegchStatus {
    guard(|| {
        if tangles.is_null() && count > 0 {
            return Err(Failure::Null("tangles"));
        }
        let list = if count == 0 { &[][..] } else { std::slice::from_raw_parts(tangles, count) };
        let owned = list
            .iter()
            .map(|&t| handle(t, "tangle").map(|t| t.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        put(out, LegchDga(connect_sum(&owned, cstr(closure, "closure")?)?))
    })
}

/// Monodromy of the j-th power of the Kálmán loop carrying `fly`.
///
/// # Safety
/// `fly` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_map_kalman(fly: *const LegchPoly, j: u32, out: *mut *mut LegchMap) -> LegchStatus {
    guard(|| put(out, LegchMap(kalman_monodromy(&handle(fly, "fly")?.0, j)?)))
}

/// # Safety
/// `map`, `poly` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_map_apply(map: *const LegchMap, poly: *const LegchPoly, out: *mut *mut LegchPoly) -> LegchStatus {
    guard(|| put(out, LegchPoly(handle(map, "map")?.0.apply(&handle(poly, "poly")?.0))))
}

/// The map `outer ∘ inner`.
///
/// # Safety
/// `outer`, `inner` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_map_compose(
    outer: *const LegchMap,
    inner: *const LegchMap,
    out: *mut *mut LegchMap,
) -> LegchStatus {
    guard(|| put(out, LegchMap(AlgebraMap::compose(&handle(outer, "outer")?.0, &handle(inner, "inner")?.0))))
}

/// # Safety
/// `map` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn legch_map_free(map: *mut LegchMap) {
    free(map)
}

/// Runs a `script.v1` document and writes the `monodromy.v1` result.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_script_run_json(json: *const c_char, out: *mut *mut c_char) -> LegchStatus {
    guard(|| {
        let script = script_from_json(cstr(json, "json")?)?;
        let m = run_script(&script)?;
        put_string(out, to_json(&MonodromyDoc::from_monodromy(&m)))
    })
}

/// Verdicts for a fly of (nᵢ, 2) torus knots under the given loop powers,
/// written as a `verdict.v1` document.
///
/// # Safety
/// `summands` points to `summand_count` values and `powers` to `power_count`
/// values (either may be null when its count is zero); `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn legch_verdicts_json(
    summands: *const u32,
    summand_count: usize,
    powers: *const u32,
    power_count: usize,
    out: *mut *mut c_char,
) -> LegchStatus {
    guard(|| {
        let slice = |p: *const u32, n: usize, what| -> Result<&[u32], Failure> {
            match (p.is_null(), n) {
                (_, 0) => Ok(&[]),
                (true, _) => Err(Failure::Null(what)),
                (false, n) => Ok(std::slice::from_raw_parts(p, n)),
            }
        };
        let fly = slice(summands, summand_count, "summands")?;
        let powers: BTreeSet<u32> = slice(powers, power_count, "powers")?.iter().copied().collect();
        let rows = family_verdicts(fly, &powers)?;
        let doc = VerdictDoc::new(rows.iter().map(VerdictRowDoc::from_row).collect());
        put_string(out, to_json(&doc))
    })
}
