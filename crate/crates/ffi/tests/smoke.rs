//! Exercises the C entry points directly from Rust: handle lifecycle, error
//! codes, and a few numeric answers.

use std::ffi::{CStr, CString};
use std::ptr;

use twobridge_ffi::*;

fn parse(text: &str) -> *mut TbSlope {
    let c = CString::new(text).unwrap();
    let mut out: *mut TbSlope = ptr::null_mut();
    let status = tb_slope_parse(c.as_ptr(), &mut out);
    assert_eq!(status, TbStatus::Ok, "parse {text}");
    assert!(!out.is_null());
    out
}

fn string_of(s: *const TbSlope) -> String {
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(tb_slope_to_string(s, &mut out), TbStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    tb_string_free(out);
    text
}

#[test]
fn slope_roundtrip_and_canonicalization() {
    for (input, expect) in [("2/5", "2/5"), ("4/10", "2/5"), ("inf", "1/0"), ("3", "3/1")] {
        let s = parse(input);
        assert_eq!(string_of(s), expect);
        tb_slope_free(s);
    }

    let mut out: *mut TbSlope = ptr::null_mut();
    assert_eq!(tb_slope_from_fraction(7, 5, &mut out), TbStatus::Ok);
    assert_eq!(string_of(out), "7/5");
    tb_slope_free(out);
}

#[test]
fn invalid_input_reports_status_and_message() {
    let c = CString::new("1.5").unwrap();
    let mut out: *mut TbSlope = ptr::null_mut();
    assert_eq!(tb_slope_parse(c.as_ptr(), &mut out), TbStatus::InvalidSlope);
    assert!(out.is_null());

    let mut msg: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(tb_last_error(&mut msg), TbStatus::Ok);
    assert!(!msg.is_null());
    let text = unsafe { CStr::from_ptr(msg) }.to_str().unwrap().to_owned();
    tb_string_free(msg);
    assert!(text.contains("slope"), "message: {text}");

    assert_eq!(tb_slope_parse(ptr::null(), &mut out), TbStatus::NullPointer);
    let s = parse("2/5");
    let mut flag = false;
    assert_eq!(tb_is_null_homotopic(s, ptr::null(), &mut flag), TbStatus::NullPointer);
    tb_slope_free(s);
}

#[test]
fn relator_word_golden() {
    let r = parse("2/5");
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(tb_relator_word(r, &mut out), TbStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    tb_string_free(out);
    tb_slope_free(r);
    assert_eq!(text, "a b a b' a' b a b a' b'");
}

#[test]
fn normalize_and_decisions() {
    let r = parse("2/5");
    let s = parse("7/5");
    let mut nf: *mut TbSlope = ptr::null_mut();
    assert_eq!(tb_normalize(r, s, &mut nf), TbStatus::Ok);
    assert_eq!(string_of(nf), "3/5");
    tb_slope_free(nf);
    tb_slope_free(s);

    let inf = parse("inf");
    let mut flag = false;
    assert_eq!(tb_is_null_homotopic(r, inf, &mut flag), TbStatus::Ok);
    assert!(flag);
    tb_slope_free(inf);

    let fifth = parse("1/5");
    assert_eq!(tb_is_null_homotopic(r, fifth, &mut flag), TbStatus::Ok);
    assert!(!flag);
    assert_eq!(tb_is_peripheral(r, fifth, false, &mut flag), TbStatus::Ok);
    assert!(flag);
    tb_slope_free(fifth);

    let cube = parse("2/7");
    let mut power = 0u8;
    assert_eq!(tb_primitive_power(r, cube, false, &mut power), TbStatus::Ok);
    assert_eq!(power, 3);
    tb_slope_free(cube);

    let s = parse("1/6");
    let t = parse("3/10");
    let r38 = parse("3/8");
    assert_eq!(tb_are_homotopic(r38, s, t, false, &mut flag), TbStatus::Ok);
    assert!(flag);
    assert_eq!(tb_has_epimorphism(r38, s, &mut flag), TbStatus::Ok);
    tb_slope_free(r38);
    tb_slope_free(t);
    tb_slope_free(s);
    tb_slope_free(r);
}

#[test]
fn mirror_precondition_propagates() {
    let r = parse("3/5");
    let s = parse("1/5");
    let mut flag = false;
    assert_eq!(tb_is_peripheral(r, s, false, &mut flag), TbStatus::Precondition);
    assert_eq!(tb_is_peripheral(r, s, true, &mut flag), TbStatus::Ok);
    tb_slope_free(s);
    tb_slope_free(r);
}

#[test]
fn representation_and_series() {
    let r = parse("2/5");
    let mut rep: *mut TbRep = ptr::null_mut();
    assert_eq!(tb_rep_geometric(r, &mut rep), TbStatus::Ok);

    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(tb_rep_omega(rep, &mut re, &mut im), TbStatus::Ok);
    assert!((re - -0.5).abs() < 1e-12 && (im - 0.866_025_403_784_438_6).abs() < 1e-12);

    // peripheral slopes map to parabolic images
    let fifth = parse("1/5");
    assert_eq!(tb_trace(rep, fifth, &mut re, &mut im), TbStatus::Ok);
    assert!((re.abs() - 2.0).abs() < 1e-9 && im.abs() < 1e-9, "trace {re}+{im}i");
    tb_slope_free(fifth);

    let (mut sre, mut sim, mut tail) = (0.0, 0.0, 0.0);
    assert_eq!(tb_mcshane_sum(rep, 1e-8, 200, &mut sre, &mut sim, &mut tail), TbStatus::Ok);
    assert!((sre - -1.0).abs() < 0.1 && sim.abs() < 1e-6, "sum {sre}+{sim}i");
    assert!(tail > 0.0);

    tb_rep_free(rep);
    tb_slope_free(r);

    // the even-denominator slope has modulus exactly 2i
    let r = parse("3/8");
    assert_eq!(tb_rep_geometric(r, &mut rep), TbStatus::Ok);
    let (mut lre, mut lim) = (0.0, 0.0);
    assert_eq!(tb_cusp_modulus(rep, 1e-8, 128, &mut lre, &mut lim), TbStatus::Ok);
    assert!(lre.abs() < 1e-5 && (lim - 2.0).abs() < 1e-5, "lambda {lre}+{lim}i");
    tb_rep_free(rep);
    tb_slope_free(r);

    // non-hyperbolic slopes are rejected
    let r = parse("1/3");
    assert_eq!(tb_rep_geometric(r, &mut rep), TbStatus::Precondition);
    tb_slope_free(r);
}
