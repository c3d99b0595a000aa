use std::ffi::{CStr, CString};
use std::ptr;

use eisgor_ffi::*;

fn last_error() -> String {
    let p = eisgor_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_json(s: *mut std::ffi::c_char) -> serde_json::Value {
    assert!(!s.is_null());
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { eisgor_string_free(s) };
    v
}

#[test]
fn bernoulli_residues() {
    let mut out = 0u64;
    // B_32 = -7709321041217/510, divisible by 37.
    assert_eq!(unsafe { eisgor_bernoulli_mod(37, 32, &mut out) }, EisgorStatus::Ok);
    assert_eq!(out, 0);
    // B_2 = 1/6 and 6 * 2 = 12 = 1 mod 11.
    assert_eq!(unsafe { eisgor_bernoulli_mod(11, 2, &mut out) }, EisgorStatus::Ok);
    assert_eq!(out, 2);
    assert_eq!(unsafe { eisgor_bernoulli_mod(12, 2, &mut out) }, EisgorStatus::InvalidArgument);
    assert!(last_error().contains("12"));
    assert_eq!(unsafe { eisgor_bernoulli_mod(11, 2, ptr::null_mut()) }, EisgorStatus::NullPointer);
}

#[test]
fn form_space_handle() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { eisgor_form_space_new(11, 1, 12, 6, &mut h) }, EisgorStatus::Ok);
    unsafe {
        assert_eq!(eisgor_form_space_dim(h), 2);
        assert_eq!(eisgor_form_space_precision(h), 6);
        let mut c = 0;
        // Delta = q - 24 q^2 + ..., and -24 = 9 mod 11.
        assert_eq!(eisgor_form_space_coeff(h, 1, 2, &mut c), EisgorStatus::Ok);
        assert_eq!(c, 9);
        assert_eq!(eisgor_form_space_coeff(h, 2, 0, &mut c), EisgorStatus::InvalidArgument);
        let v = take_json(eisgor_form_space_to_json(h));
        assert_eq!(v["k"], 12);
        eisgor_form_space_free(h);
    }
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { eisgor_form_space_new(11, 1, 3, 6, &mut h) }, EisgorStatus::OutOfScope);
    assert!(h.is_null());
}

#[test]
fn scan_handle_with_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("ck").to_str().unwrap()).unwrap();
    for _ in 0..2 {
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { eisgor_scan(5, 100, 3, path.as_ptr(), &mut h) }, EisgorStatus::Ok);
        unsafe {
            assert_eq!(eisgor_scan_primes_processed(h), 23);
            assert_eq!(eisgor_scan_pair_hits(h), 0);
            assert_eq!(eisgor_scan_irregular_count(h), 3);
            let v = take_json(eisgor_scan_to_json(h));
            assert_eq!(v["records"].as_array().unwrap().len(), 23);
            eisgor_scan_free(h);
        }
    }
}

#[test]
fn structure_handle() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { eisgor_structure_verify(37, 32, &mut h) }, EisgorStatus::Ok);
    unsafe {
        assert!(eisgor_structure_assertions_hold(h));
        assert!(eisgor_structure_gorenstein(h));
        assert_eq!(eisgor_structure_min_gens(h), 1);
        let v = take_json(eisgor_structure_to_json(h));
        assert_eq!(v["k_prime"], 6);
        eisgor_structure_free(h);
        eisgor_structure_free(ptr::null_mut());
        assert!(!eisgor_structure_assertions_hold(ptr::null()));
    }
}

#[test]
fn header_lists_every_export() {
    let header = include_str!("../include/eisgor.h");
    for name in [
        "eisgor_last_error",
        "eisgor_string_free",
        "eisgor_bernoulli_mod",
        "eisgor_form_space_new",
        "eisgor_form_space_free",
        "eisgor_scan",
        "eisgor_scan_free",
        "eisgor_structure_verify",
        "eisgor_structure_free",
        "EISGOR_STATUS_OK",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
