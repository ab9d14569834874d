use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use goe_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { goe_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(goe_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn muller_through_the_abi() {
    unsafe {
        let mut ca = ptr::null_mut();
        assert_eq!(goe_ca_muller(2, &mut ca), GoeStatus::Ok);
        assert_eq!(goe_ca_alphabet_dim(ca), 2);

        let mut text = ptr::null_mut();
        assert_eq!(goe_ca_groupring_matrix(ca, &mut text), GoeStatus::Ok);
        assert_eq!(take(text), "[[x, y + z],[0, 0]]");

        let mut witness = ptr::null_mut();
        assert_eq!(goe_ca_goe_window(ca, 0, &mut witness), GoeStatus::Ok);
        assert!(take(witness).contains("\"artifact\":\"goe_witness\""));

        let mut pair = ptr::null_mut();
        assert_eq!(goe_ca_mep_search(ca, 1, &mut pair), GoeStatus::Negative);
        assert!(pair.is_null());
        assert_eq!(goe_ca_mep_search(ca, 2, &mut pair), GoeStatus::Ok);
        assert!(take(pair).contains("\"artifact\":\"mep_witness\""));

        let mut json = ptr::null_mut();
        assert_eq!(goe_ca_to_json(ca, &mut json), GoeStatus::Ok);
        let json = CString::new(take(json)).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(goe_ca_from_json(json.as_ptr(), &mut back), GoeStatus::Ok);
        assert_eq!(goe_ca_alphabet_dim(back), 2);
        goe_ca_free(back);
        goe_ca_free(ca);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut ca = ptr::null_mut();
        assert_eq!(goe_ca_muller(4, &mut ca), GoeStatus::InvalidArgument);
        assert!(last_error().contains("not prime"), "{}", last_error());
        assert!(ca.is_null());

        assert_eq!(goe_ca_muller(2, ptr::null_mut()), GoeStatus::NullPointer);
        assert!(last_error().contains("null pointer"));

        let bad = CString::new("{\"artifact\":\"ca\",").unwrap();
        assert_eq!(goe_ca_from_json(bad.as_ptr(), &mut ca), GoeStatus::Decode);
        assert!(!last_error().is_empty());

        assert_eq!(goe_ca_muller(3, &mut ca), GoeStatus::Ok);
        assert_eq!(last_error(), "");
        goe_ca_free(ca);
        goe_ca_free(ptr::null_mut());
        goe_string_free(ptr::null_mut());
        assert_eq!(goe_ca_alphabet_dim(ptr::null()), 0);
    }
}

#[test]
fn identity_has_no_kernel_and_no_goe() {
    unsafe {
        let group = CString::new("z2").unwrap();
        let mut ca = ptr::null_mut();
        assert_eq!(goe_ca_identity(group.as_ptr(), 3, 2, &mut ca), GoeStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(goe_ca_goe_window(ca, 1, &mut out), GoeStatus::Negative);
        assert_eq!(goe_ca_mep_search(ca, 2, &mut out), GoeStatus::Negative);
        goe_ca_free(ca);
    }
}

#[test]
fn lemma1_sizes() {
    let mut size_y = 0usize;
    let mut passed: c_int = 0;
    unsafe {
        assert_eq!(goe_lemma1_verify(4, &mut size_y, &mut passed), GoeStatus::Ok);
    }
    assert_eq!((size_y, passed), (50, 1));
}

#[test]
fn ore_solution_through_the_abi() {
    unsafe {
        let group = CString::new("z2").unwrap();
        let a_text = CString::new("1 + u + v").unwrap();
        let s_text = CString::new("u - 2*v^2").unwrap();
        let (mut a, mut s) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(goe_grelem_parse(group.as_ptr(), 5, 1, a_text.as_ptr(), &mut a), GoeStatus::Ok);
        assert_eq!(goe_grelem_parse(group.as_ptr(), 5, 1, s_text.as_ptr(), &mut s), GoeStatus::Ok);
        let (mut b, mut t) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(goe_ore_solve(a, s, &mut b, &mut t), GoeStatus::Ok);
        let (mut at, mut bs) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(goe_grelem_mul(a, t, &mut at), GoeStatus::Ok);
        assert_eq!(goe_grelem_mul(b, s, &mut bs), GoeStatus::Ok);
        assert_eq!(goe_grelem_equal(at, bs), 1);
        let mut text = ptr::null_mut();
        assert_eq!(goe_grelem_to_string(t, &mut text), GoeStatus::Ok);
        assert_ne!(take(text), "0");
        for e in [a, s, b, t, at, bs] {
            goe_grelem_free(e);
        }
    }
}

#[test]
fn cli_dispatch_returns_exit_codes() {
    let args: Vec<CString> = ["goe", "lemma1", "--n", "3"].iter().map(|a| CString::new(*a).unwrap()).collect();
    let ptrs: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let mut code: c_int = -1;
    unsafe {
        assert_eq!(goe_cli_dispatch(ptrs.len() as c_int, ptrs.as_ptr(), &mut code), GoeStatus::Ok);
    }
    assert_eq!(code, 0);
    let args: Vec<CString> = ["goe", "nope"].iter().map(|a| CString::new(*a).unwrap()).collect();
    let ptrs: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    unsafe {
        assert_eq!(goe_cli_dispatch(ptrs.len() as c_int, ptrs.as_ptr(), &mut code), GoeStatus::Ok);
    }
    assert_eq!(code, 2);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(goe_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/goe.h")).unwrap();
    for name in [
        "goe_last_error",
        "goe_version",
        "goe_string_free",
        "goe_ca_muller",
        "goe_ca_identity",
        "goe_ca_from_json",
        "goe_ca_to_json",
        "goe_ca_alphabet_dim",
        "goe_ca_groupring_matrix",
        "goe_ca_goe_window",
        "goe_ca_mep_search",
        "goe_ca_free",
        "goe_lemma1_verify",
        "goe_synthesize",
        "goe_grelem_parse",
        "goe_grelem_to_string",
        "goe_grelem_mul",
        "goe_grelem_equal",
        "goe_ore_solve",
        "goe_grelem_free",
        "goe_cli_dispatch",
        "typedef struct GoeCa GoeCa",
        "GOE_STATUS_NULL_POINTER = 5",
    ] {
        assert!(header.contains(name), "{name} missing from goe.h");
    }
}

/// The header must compile as C; skipped when no C compiler is on PATH.
#[test]
fn header_compiles_as_c() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let src = std::env::temp_dir().join(format!("goe_header_check_{}.c", std::process::id()));
    std::fs::write(&src, "#include \"goe.h\"\nint main(void) { GoeCa *ca = 0; return goe_ca_muller(2, &ca) == GOE_STATUS_OK ? 0 : 1; }\n").unwrap();
    let status = std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-I", dir]).arg(&src).status();
    let _ = std::fs::remove_file(&src);
    match status {
        Ok(s) => assert!(s.success(), "goe.h does not compile"),
        Err(_) => eprintln!("cc not found; header compile check skipped"),
    }
}
