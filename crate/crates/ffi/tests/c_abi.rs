use std::f64::consts::{PI, SQRT_2};
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use seqwit_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe { sqw_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn canonical(kind: SqwScenarioKind) -> *mut SqwScenario {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sqw_scenario_canonical(kind, &mut s) }, SqwStatus::Ok);
    assert!(!s.is_null());
    s
}

fn table(s: *const SqwScenario, eps: f64) -> *mut SqwTable {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { sqw_table_build(s, eps, &mut t) }, SqwStatus::Ok);
    t
}

#[test]
fn witness_matches_closed_form() {
    let s = canonical(SqwScenarioKind::W1);
    let t = table(s, 1.0);
    let (mut ab, mut ac, mut ab_cf, mut ac_cf) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(sqw_witness(t, SqwWitnessKind::W1, SqwPair::Ab, &mut ab), SqwStatus::Ok);
        assert_eq!(sqw_witness(t, SqwWitnessKind::W1, SqwPair::Ac, &mut ac), SqwStatus::Ok);
        assert_eq!(sqw_closed_form(SqwClosedForm::W1Ab, 1.0, &mut ab_cf), SqwStatus::Ok);
        assert_eq!(sqw_closed_form(SqwClosedForm::W1Ac, 1.0, &mut ac_cf), SqwStatus::Ok);
    }
    assert!((ab - ab_cf).abs() < 1e-12);
    assert!((ac - ac_cf).abs() < 1e-12);
    assert!(ab > 2.0 && ac > 2.0);

    let mut z0 = 0.0;
    unsafe { assert_eq!(sqw_witness_given_z(t, SqwWitnessKind::W1, 0, &mut z0), SqwStatus::Ok) };
    assert!((z0 - SQRT_2 * (1.0f64.cos() + 1.0)).abs() < 1e-12);

    unsafe {
        sqw_table_free(t);
        sqw_scenario_free(s);
    }
}

#[test]
fn table_entries_normalize() {
    let s = canonical(SqwScenarioKind::W2);
    let t = table(s, 0.7);
    for x in 0..4 {
        for y in 0..2 {
            for z in 0..2 {
                let mut sum = 0.0;
                for b in 0..2 {
                    for c in 0..2 {
                        let mut p = -1.0;
                        assert_eq!(unsafe { sqw_table_get(t, x, y, z, b, c, &mut p) }, SqwStatus::Ok);
                        sum += p;
                    }
                }
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }
    let mut p = 0.0;
    assert_eq!(unsafe { sqw_table_get(t, 4, 0, 0, 0, 0, &mut p) }, SqwStatus::OutOfRange);
    assert!(last_error().contains("x = 4"));
    unsafe {
        sqw_table_free(t);
        sqw_scenario_free(s);
    }
}

#[test]
fn entropies_are_ordered() {
    let s = canonical(SqwScenarioKind::W2);
    let t = table(s, 0.5);
    let (mut global, mut local, mut bound) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(sqw_hmin_global_exact(t, &mut global), SqwStatus::Ok);
        assert_eq!(sqw_hmin_local_bob_exact(t, &mut local), SqwStatus::Ok);
        assert_eq!(sqw_hmin_global_bound(t, &mut bound), SqwStatus::Ok);
        sqw_table_free(t);
        sqw_scenario_free(s);
    }
    assert!(global >= local - 1e-12);
    assert!(bound <= global + 1e-12);
}

#[test]
fn certification_and_errors() {
    let mut h = 0.0;
    unsafe { assert_eq!(sqw_h_from_w1(2.0 * SQRT_2, &mut h), SqwStatus::Ok) };
    assert!((h + ((2.0 + SQRT_2) / 4.0).log2()).abs() < 1e-9);
    unsafe { assert_eq!(sqw_h_from_w1(3.0, &mut h), SqwStatus::SuperQuantum) };
    assert!(!last_error().is_empty());
    unsafe { assert_eq!(sqw_h_from_w2(0.0, &mut h), SqwStatus::Ok) };
    assert_eq!(h, 0.0);
    unsafe {
        assert_eq!(sqw_bob_certified(0.0, SqwWitnessKind::W1, &mut h), SqwStatus::Ok);
        assert!((h - 0.228446696836388).abs() < 1e-12);
        assert_eq!(sqw_charlie_certified(PI / 2.0, &mut h), SqwStatus::Ok);
        assert!((h - 0.228446696836388).abs() < 1e-9);
        assert_eq!(sqw_closed_form(SqwClosedForm::W2Ab, -0.1, &mut h), SqwStatus::Domain);
        assert_eq!(sqw_h_from_w1(2.0, ptr::null_mut()), SqwStatus::NullPointer);
        assert_eq!(sqw_table_build(ptr::null(), 0.0, &mut ptr::null_mut()), SqwStatus::NullPointer);
    }
}

#[test]
fn success_clears_last_error() {
    let mut h = 0.0;
    unsafe {
        assert_eq!(sqw_h_from_w1(5.0, &mut h), SqwStatus::SuperQuantum);
        assert_eq!(sqw_h_from_w1(2.5, &mut h), SqwStatus::Ok);
    }
    assert!(last_error().is_empty());
}

#[test]
fn window_endpoints() {
    let (mut lo, mut hi) = (0.0, 0.0);
    unsafe { assert_eq!(sqw_find_window(SqwWitnessKind::W1, 1e-13, &mut lo, &mut hi), SqwStatus::Ok) };
    assert!((lo - 2f64.powf(-0.25).asin()).abs() < 1e-9);
    assert!((hi - (SQRT_2 - 1.0).acos()).abs() < 1e-9);
}

#[test]
fn toml_round_trip() {
    let s = canonical(SqwScenarioKind::W1);
    let mut len = 0usize;
    assert_eq!(unsafe { sqw_scenario_to_toml(s, ptr::null_mut(), 0, &mut len) }, SqwStatus::BufferTooSmall);
    let mut buf = vec![0 as c_char; len + 1];
    assert_eq!(unsafe { sqw_scenario_to_toml(s, buf.as_mut_ptr(), buf.len(), &mut len) }, SqwStatus::Ok);
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_owned();
    assert_eq!(text.as_bytes().len(), len);

    let mut back = ptr::null_mut();
    assert_eq!(unsafe { sqw_scenario_from_toml(text.as_ptr(), &mut back) }, SqwStatus::Ok);
    let (t1, t2) = (table(s, 0.9), table(back, 0.9));
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        sqw_witness(t1, SqwWitnessKind::W1, SqwPair::Ab, &mut a);
        sqw_witness(t2, SqwWitnessKind::W1, SqwPair::Ab, &mut b);
    }
    assert_eq!(a, b);

    let bad = CString::new("preparations = 3").unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { sqw_scenario_from_toml(bad.as_ptr(), &mut none) }, SqwStatus::Parse);
    assert!(none.is_null());
    unsafe {
        sqw_table_free(t1);
        sqw_table_free(t2);
        sqw_scenario_free(s);
        sqw_scenario_free(back);
        sqw_scenario_free(ptr::null_mut());
    }
}

#[test]
fn optimize_is_deterministic() {
    let run = || {
        let mut v = 0.0;
        let mut s = ptr::null_mut();
        let st = unsafe { sqw_optimize(SqwWitnessKind::W2, SqwPair::Ab, 0.0, 7, 4, false, &mut v, &mut s) };
        assert_eq!(st, SqwStatus::Ok);
        unsafe { sqw_scenario_free(s) };
        v
    };
    let a = run();
    assert_eq!(a.to_bits(), run().to_bits());
    assert!(a <= 1.0 + 1e-9);
    let mut v = 0.0;
    assert_eq!(
        unsafe { sqw_optimize(SqwWitnessKind::W1, SqwPair::Ab, 0.0, 1, 0, false, &mut v, ptr::null_mut()) },
        SqwStatus::Config
    );
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/seqwit.h")).unwrap();
    for name in [
        "sqw_last_error_message",
        "sqw_scenario_canonical",
        "sqw_scenario_from_toml",
        "sqw_scenario_to_toml",
        "sqw_scenario_free",
        "sqw_table_build",
        "sqw_table_get",
        "sqw_table_free",
        "sqw_witness",
        "sqw_witness_given_z",
        "sqw_closed_form",
        "sqw_h_from_w1",
        "sqw_h_from_w2",
        "sqw_bob_certified",
        "sqw_charlie_certified",
        "sqw_hmin_global_exact",
        "sqw_hmin_local_bob_exact",
        "sqw_hmin_global_bound",
        "sqw_find_window",
        "sqw_optimize",
        "typedef struct SqwScenario SqwScenario;",
        "SQW_STATUS_SUPER_QUANTUM",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
