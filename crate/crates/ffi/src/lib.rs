//! C ABI over `goe-core`.
//!
//! Objects cross the boundary as opaque handles, released with the matching
//! `*_free`. Every fallible call
//! returns a [`GoeStatus`]; on failure a message is available from
//! [`goe_last_error`] on the same thread. Strings returned through `char **`
//! out-parameters are owned by the caller and released with
//! [`goe_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use goe_core::ca::LinearCA;
use goe_core::codec::{self, GoeWitness, MepWitness};
use goe_core::eden;
use goe_core::ff::ext::ExtField;
use goe_core::group::GroupCtx;
use goe_core::lemma1;
use goe_core::ore::{self, GRElem};
use goe_core::synth::{self, Mode, SynthesisSpec};
use goe_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoeStatus {
    Ok = 0,
    /// The check ran and the answer is negative (nothing found).
    Negative = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    Decode = 4,
    NullPointer = 5,
    Internal = 6,
}

/// Opaque linear cellular automaton.
pub struct GoeCa(LinearCA);

/// Opaque group-ring element.
pub struct GoeGrElem(GRElem);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

enum Fail {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn status_of(e: &Fail) -> GoeStatus {
    match e {
        Fail::Null(_) => GoeStatus::NullPointer,
        Fail::Core(Error::CapExceeded(_)) => GoeStatus::CapExceeded,
        Fail::Core(Error::LadderExhausted(_)) => GoeStatus::Negative,
        Fail::Core(Error::Decode(_) | Error::Json(_)) => GoeStatus::Decode,
        Fail::Core(_) => GoeStatus::InvalidArgument,
    }
}

fn message(e: &Fail) -> String {
    match e {
        Fail::Null(name) => format!("null pointer: {name}"),
        Fail::Core(e) => e.to_string(),
    }
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<GoeStatus, Fail>) -> GoeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            if status == GoeStatus::Ok {
                set_error("");
            }
            status
        }
        Ok(Err(e)) => {
            set_error(message(&e));
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            GoeStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Core(Error::Decode(format!("{name}: not UTF-8"))))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn put_string(out: *mut *mut c_char, s: String) {
    *out = CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw();
}

fn check_out<T>(out: *mut *mut T, name: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(name));
    }
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn goe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn goe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn goe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn goe_ca_muller(p: u64, out: *mut *mut GoeCa) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        put(out, GoeCa(LinearCA::muller(p)?));
        Ok(GoeStatus::Ok)
    })
}

/// Identity automaton on a named group (`z`, `z2`, `w3`, `f2`, ...).
///
/// # Safety
/// `group` must be a NUL-terminated string, `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn goe_ca_identity(group: *const c_char, p: u64, m: usize, out: *mut *mut GoeCa) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        let ctx = GroupCtx::from_name(str_arg(group, "group")?)?;
        put(out, GoeCa(LinearCA::identity(ctx, p, m)?));
        Ok(GoeStatus::Ok)
    })
}

/// Decodes an automaton file (canonical JSON, digest checked when present).
///
/// # Safety
/// `json` must be a NUL-terminated string, `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn goe_ca_from_json(json: *const c_char, out: *mut *mut GoeCa) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        put(out, GoeCa(codec::decode(str_arg(json, "json")?)?));
        Ok(GoeStatus::Ok)
    })
}

/// # Safety
/// `ca` must be a live handle, `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn goe_ca_to_json(ca: *const GoeCa, out: *mut *mut c_char) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        put_string(out, codec::encode(&handle(ca, "ca")?.0)?);
        Ok(GoeStatus::Ok)
    })
}

/// Alphabet dimension `m`; 0 for a null handle.
///
/// # Safety
/// `ca` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn goe_ca_alphabet_dim(ca: *const GoeCa) -> usize {
    ca.as_ref().map_or(0, |c| c.0.m())
}

/// Group-ring matrix `Σ α_s s`, rendered as text.
///
/// # Safety
/// `ca` must be a live handle, `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn goe_ca_groupring_matrix(ca: *const GoeCa, out: *mut *mut c_char) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        put_string(out, handle(ca, "ca")?.0.to_groupring_matrix().pretty());
        Ok(GoeStatus::Ok)
    })
}

/// Garden-of-Eden search on `ball(window_radius)`. `Ok` with a witness file in
/// `out`, or `Negative` with `*out` set to null.
///
/// # Safety
/// `ca` must be a live handle, `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn goe_ca_goe_window(ca: *const GoeCa, window_radius: usize, out: *mut *mut c_char) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = ptr::null_mut();
        let ca = &handle(ca, "ca")?.0;
        let window = ca.ctx().ball(window_radius);
        match eden::goe_window(ca, &window, eden::MATRIX_CAP)? {
            Some(pattern) => {
                put_string(out, codec::encode(&GoeWitness { ctx: ca.ctx().clone(), p: ca.p(), pattern })?);
                Ok(GoeStatus::Ok)
            }
            None => Ok(GoeStatus::Negative),
        }
    })
}

/// Kernel search on `ball(radius)`. `Ok` with a witness file in `out`, or
/// `Negative` with `*out` set to null.
///
/// # Safety
/// `ca` must be a live handle, `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn goe_ca_mep_search(ca: *const GoeCa, radius: usize, out: *mut *mut c_char) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = ptr::null_mut();
        let ca = &handle(ca, "ca")?.0;
        match eden::mep_search(ca, radius)? {
            Some(pair) => {
                put_string(out, codec::encode(&MepWitness { ctx: ca.ctx().clone(), p: ca.p(), radius, pair })?);
                Ok(GoeStatus::Ok)
            }
            None => Ok(GoeStatus::Negative),
        }
    })
}

/// # Safety
/// `ca` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn goe_ca_free(ca: *mut GoeCa) {
    if !ca.is_null() {
        drop(Box::from_raw(ca));
    }
}

/// `#Y` of the cycle system for `n`, and whether every size identity holds.
///
/// # Safety
/// `size_y` and `passed` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn goe_lemma1_verify(n: usize, size_y: *mut usize, passed: *mut c_int) -> GoeStatus {
    guard(|| {
        if size_y.is_null() || passed.is_null() {
            return Err(Fail::Null("size_y/passed"));
        }
        let sys = lemma1::build(n)?;
        let report = lemma1::verify_counts(&sys)?;
        *size_y = sys.size_y();
        *passed = c_int::from(report.passed());
        Ok(if report.passed() { GoeStatus::Ok } else { GoeStatus::Negative })
    })
}

/// Synthesis from a preset (`tree5`). `samples == 0` selects certified mode.
/// On success `ca_out` receives the automaton and `cert_out` the certificate file.
///
/// # Safety
/// `preset` must be a NUL-terminated string; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn goe_synthesize(
    preset: *const c_char,
    seed: u64,
    samples: u64,
    ca_out: *mut *mut GoeCa,
    cert_out: *mut *mut c_char,
) -> GoeStatus {
    guard(|| {
        check_out(ca_out, "ca_out")?;
        check_out(cert_out, "cert_out")?;
        let mode = if samples == 0 { Mode::Certified } else { Mode::Sampled(samples) };
        let spec = SynthesisSpec::preset(str_arg(preset, "preset")?, seed, mode)?;
        let out = synth::synthesize(&spec)?;
        put_string(cert_out, codec::encode(&out.certificate)?);
        put(ca_out, GoeCa(out.ca));
        Ok(GoeStatus::Ok)
    })
}

/// Parses a group-ring element over `GF(p^d)`, e.g. `"1 + 2*u - u^-1 v"`.
///
/// # Safety
/// `group` and `text` must be NUL-terminated strings, `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn goe_grelem_parse(
    group: *const c_char,
    p: u64,
    d: usize,
    text: *const c_char,
    out: *mut *mut GoeGrElem,
) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        let ctx = GroupCtx::from_name(str_arg(group, "group")?)?;
        let field = ExtField::new(p, d)?;
        put(out, GoeGrElem(ore::parse_elem(&ctx, &field, str_arg(text, "text")?)?));
        Ok(GoeStatus::Ok)
    })
}

/// # Safety
/// `e` must be a live handle, `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn goe_grelem_to_string(e: *const GoeGrElem, out: *mut *mut c_char) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        put_string(out, handle(e, "e")?.0.pretty());
        Ok(GoeStatus::Ok)
    })
}

/// # Safety
/// `a`, `b` must be live handles, `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn goe_grelem_mul(a: *const GoeGrElem, b: *const GoeGrElem, out: *mut *mut GoeGrElem) -> GoeStatus {
    guard(|| {
        check_out(out, "out")?;
        put(out, GoeGrElem(ore::gr_mul(&handle(a, "a")?.0, &handle(b, "b")?.0)?));
        Ok(GoeStatus::Ok)
    })
}

/// 1 when equal, 0 otherwise (including null handles).
///
/// # Safety
/// `a`, `b` must be null or live handles.
#[no_mangle]
pub unsafe extern "C" fn goe_grelem_equal(a: *const GoeGrElem, b: *const GoeGrElem) -> c_int {
    match (a.as_ref(), b.as_ref()) {
        (Some(a), Some(b)) => c_int::from(a.0 == b.0),
        _ => 0,
    }
}

/// Ore solution `a t = b s` with `t != 0`, on a free abelian group.
///
/// # Safety
/// `a`, `s` must be live handles; `b_out`, `t_out` valid handle slots.
#[no_mangle]
pub unsafe extern "C" fn goe_ore_solve(
    a: *const GoeGrElem,
    s: *const GoeGrElem,
    b_out: *mut *mut GoeGrElem,
    t_out: *mut *mut GoeGrElem,
) -> GoeStatus {
    guard(|| {
        check_out(b_out, "b_out")?;
        check_out(t_out, "t_out")?;
        let sol = ore::ore_solve(&handle(a, "a")?.0, &handle(s, "s")?.0)?;
        put(b_out, GoeGrElem(sol.b));
        put(t_out, GoeGrElem(sol.t));
        Ok(GoeStatus::Ok)
    })
}

/// # Safety
/// `e` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn goe_grelem_free(e: *mut GoeGrElem) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Runs the command line with `argv[0..argc]` (program name first) and
/// stores its exit code; output goes to the process stdout and stderr.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `exit_code` must be valid.
#[no_mangle]
pub unsafe extern "C" fn goe_cli_dispatch(argc: c_int, argv: *const *const c_char, exit_code: *mut c_int) -> GoeStatus {
    guard(|| {
        if exit_code.is_null() || (argc > 0 && argv.is_null()) {
            return Err(Fail::Null("argv/exit_code"));
        }
        let mut args = Vec::with_capacity(argc.max(0) as usize);
        for i in 0..argc.max(0) as usize {
            args.push(str_arg(*argv.add(i), "argv[i]")?.to_string());
        }
        *exit_code = goe_core::cli::dispatch(args);
        Ok(GoeStatus::Ok)
    })
}
