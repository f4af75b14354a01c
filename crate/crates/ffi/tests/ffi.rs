use std::ffi::{CStr, CString};
use std::ptr;

use liecurve_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { lc_string_free(p) };
    s
}

fn load(name: &str) -> *mut LcAlgebra {
    let n = CString::new(name).unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { lc_algebra_from_catalog(n.as_ptr(), &mut a) }, LcStatus::Ok);
    a
}

#[test]
fn hcf_tensor_of_standard_sl2c_metric() {
    let a = load("sl2c");
    assert_eq!(unsafe { lc_algebra_real_dim(a) }, 6);
    assert_eq!(unsafe { lc_algebra_complex_dim(a) }, 3);
    let mut re = [0.0; 9];
    let im = [0.0; 9];
    for i in 0..3 {
        re[i * 4] = 1.0;
    }
    let (mut kr, mut ki) = ([0.0; 9], [0.0; 9]);
    let st = unsafe { lc_hcf_tensor(a, re.as_ptr(), im.as_ptr(), 3, kr.as_mut_ptr(), ki.as_mut_ptr()) };
    assert_eq!(st, LcStatus::Ok);
    for i in 0..9 {
        let expect = if i % 4 == 0 { -0.5 } else { 0.0 };
        assert!((kr[i] - expect).abs() < 1e-14 && ki[i].abs() < 1e-14);
    }
    // wrong size
    let st = unsafe { lc_hcf_tensor(a, re.as_ptr(), im.as_ptr(), 2, kr.as_mut_ptr(), ki.as_mut_ptr()) };
    assert_eq!(st, LcStatus::InvalidArgument);
    unsafe { lc_algebra_free(a) };
}

#[test]
fn errors_carry_status_and_message() {
    let n = CString::new("no-such-algebra").unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { lc_algebra_from_catalog(n.as_ptr(), &mut a) }, LcStatus::Parse);
    assert!(a.is_null());
    assert!(take_string(lc_last_error_message()).contains("no-such-algebra"));
    assert_eq!(unsafe { lc_algebra_from_catalog(ptr::null(), &mut a) }, LcStatus::NullPointer);
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { lc_soliton_json(ptr::null(), ptr::null(), 0, LcOperator::M, ptr::null(), &mut out) },
        LcStatus::NullPointer
    );
    // a non-definite metric
    let h3 = load("h3c");
    let mut g = [0.0; 36];
    for i in 0..6 {
        g[i * 7] = if i == 0 { -1.0 } else { 1.0 };
    }
    let st = unsafe { lc_soliton_json(h3, g.as_ptr(), 6, LcOperator::Hcf, ptr::null(), &mut out) };
    assert_eq!(st, LcStatus::Numerical);
    unsafe { lc_algebra_free(h3) };
    unsafe { lc_algebra_free(ptr::null_mut()) };
    unsafe { lc_string_free(ptr::null_mut()) };
}

#[test]
fn soliton_and_report_json() {
    let a = load("h3c");
    let mut g = [0.0; 36];
    for i in 0..6 {
        g[i * 7] = 1.0;
    }
    let mut out = ptr::null_mut();
    let st = unsafe { lc_soliton_json(a, g.as_ptr(), 6, LcOperator::Hcf, ptr::null(), &mut out) };
    assert_eq!(st, LcStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["kind"], "soliton");
    let (re, im) = ([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], [0.0; 9]);
    let x = [1.0, 0.0, 0.0, 0.0];
    let st = unsafe { lc_curvature_report_json(a, re.as_ptr(), im.as_ptr(), 3, x.as_ptr(), &mut out) };
    assert_eq!(st, LcStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["x"][0], 1.0);
    unsafe { lc_algebra_free(a) };
}

#[test]
fn flow_trace_round_trip() {
    let a = load("s3lambda:1");
    let mut g = [0.0; 36];
    for i in 0..6 {
        g[i * 7] = 1.0;
    }
    let mut tr = ptr::null_mut();
    let st = unsafe { lc_flow_run(a, g.as_ptr(), 6, LcFlowKind::Hcf, ptr::null(), 5.0, &mut tr) };
    assert_eq!(st, LcStatus::Ok);
    let n = unsafe { lc_trace_len(tr) };
    assert!(n > 10);
    let len = unsafe { lc_trace_state_len(tr) };
    assert_eq!(len, 18);
    let mut state = vec![0.0; len];
    assert_eq!(unsafe { lc_trace_state(tr, 0, state.as_mut_ptr(), len) }, LcStatus::Ok);
    // [Re h, Im h] of a multiple of the identity
    assert!(state[0] > 0.0 && state[0] == state[4] && state[0] == state[8]);
    assert!(state[9..].iter().all(|v| *v == 0.0));
    assert_eq!(unsafe { lc_trace_state(tr, n, state.as_mut_ptr(), len) }, LcStatus::InvalidArgument);
    assert!(unsafe { lc_trace_time(tr, n) }.is_nan());
    let mut term = LcTermination { kind: LcTerminationKind::ReachedHorizon, t_est: 0.0, t_err: 0.0, last_t: 0.0 };
    assert_eq!(unsafe { lc_trace_termination(tr, &mut term) }, LcStatus::Ok);
    assert_eq!(term.kind, LcTerminationKind::Singularity);
    assert!((term.t_est - 1.0).abs() < 0.01);
    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { lc_trace_csv(tr, &mut csv) }, LcStatus::Ok);
    assert_eq!(take_string(csv).lines().count(), n + 1);
    unsafe { lc_trace_free(tr) };
    unsafe { lc_algebra_free(a) };
}

#[test]
fn algebra_from_json_text() {
    let text = CString::new(r#"{"name": "aff", "dim": 2, "entries": [[0, 1, 1, 1.0]]}"#).unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { lc_algebra_from_json(text.as_ptr(), &mut a) }, LcStatus::Ok);
    assert_eq!(unsafe { lc_algebra_real_dim(a) }, 2);
    assert_eq!(unsafe { lc_algebra_complex_dim(a) }, 0);
    let mut tr = ptr::null_mut();
    let g = [1.0, 0.0, 0.0, 1.0];
    // Chern-side flows need a complex structure
    assert_eq!(
        unsafe { lc_flow_run(a, g.as_ptr(), 2, LcFlowKind::Hcf, ptr::null(), 1.0, &mut tr) },
        LcStatus::InvalidArgument
    );
    unsafe { lc_algebra_free(a) };
    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { lc_algebra_from_json(bad.as_ptr(), &mut a) }, LcStatus::Parse);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(lc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/liecurve.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["lc_algebra_from_catalog", "lc_flow_run", "lc_trace_termination", "lc_last_error_message"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output()
    else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
