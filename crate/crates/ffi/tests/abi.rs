use std::ffi::{CStr, CString};
use std::ptr;

use ssm_ffi::*;

fn load(text: &str) -> *mut SsmGraph {
    let t = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ssm_graph_from_edge_list(t.as_ptr(), &mut g) }, SsmStatus::Ok);
    g
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ssm_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn path_round_trip() {
    let g = load("3\n0 1\n1 2\n");
    let (mut n, mut m) = (0, 0);
    unsafe {
        assert_eq!(ssm_graph_vertex_count(g, &mut n), SsmStatus::Ok);
        assert_eq!(ssm_graph_edge_count(g, &mut m), SsmStatus::Ok);
    }
    assert_eq!((n, m), (3, 2));

    let mut len = 0;
    let mut buf = [0u64; 8];
    assert_eq!(unsafe { ssm_ind_poly(g, ptr::null_mut(), 0, &mut len) }, SsmStatus::BufferTooSmall);
    assert_eq!(len, 3);
    assert_eq!(unsafe { ssm_ind_poly(g, buf.as_mut_ptr(), buf.len(), &mut len) }, SsmStatus::Ok);
    assert_eq!(&buf[..len], &[1, 3, 1]);

    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { ssm_eval_z(g, 1.0, 0.0, &mut re, &mut im) }, SsmStatus::Ok);
    assert_eq!((re, im), (5.0, 0.0));
    assert_eq!(unsafe { ssm_ratio_p(g, 1, 1.0, 0.0, &mut re, &mut im) }, SsmStatus::Ok);
    assert!((re - 0.2).abs() < 1e-15);

    let (mut sr, mut si) = ([0.0; 4], [0.0; 4]);
    for method in [0, 1] {
        let st = unsafe { ssm_ratio_series(g, 0, 3, method, sr.as_mut_ptr(), si.as_mut_ptr(), 4) };
        assert_eq!(st, SsmStatus::Ok);
        assert_eq!(sr, [0.0, 1.0, -2.0, 5.0]);
    }
    unsafe { ssm_graph_free(g) };
}

#[test]
fn conditional_probabilities() {
    let g = load("3\n0 1\n1 2\n");
    let sigma = CString::new("0 1\n").unwrap();
    let mut p = 0.0;
    assert_eq!(unsafe { ssm_cond_prob(g, 2, sigma.as_ptr(), 1.0, &mut p) }, SsmStatus::Ok);
    assert!((p - 0.5).abs() < 1e-15);
    let mut a = SsmApprox::default();
    let st = unsafe { ssm_approx_cond_prob(g, 2, sigma.as_ptr(), 1.0, 1e-4, 2.0, &mut a) };
    assert_eq!(st, SsmStatus::Ok, "{}", last_error());
    assert!((a.value - 0.5).abs() <= a.error_bound && a.error_bound <= 1e-4);
    unsafe { ssm_graph_free(g) };
}

#[test]
fn error_codes() {
    let bad = CString::new("2\n0 5\n").unwrap();
    let mut g = ptr::null_mut();
    assert_ne!(unsafe { ssm_graph_from_edge_list(bad.as_ptr(), &mut g) }, SsmStatus::Ok);
    assert!(g.is_null() && !last_error().is_empty());
    assert_eq!(unsafe { ssm_graph_from_edge_list(ptr::null(), &mut g) }, SsmStatus::NullPointer);

    let g = load("2\n0 1\n");
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { ssm_eval_z(g, 1.0, 0.0, ptr::null_mut(), &mut im) }, SsmStatus::NullPointer);
    assert_eq!(unsafe { ssm_ratio_p(g, 1, -0.5, 0.0, &mut re, &mut im) }, SsmStatus::NearZeroDenominator);
    assert!(last_error().contains("near-zero"));
    assert_eq!(unsafe { ssm_ratio_p(g, 9, 1.0, 0.0, &mut re, &mut im) }, SsmStatus::InvalidArgument);
    let (mut sr, mut si) = ([0.0; 2], [0.0; 2]);
    assert_eq!(
        unsafe { ssm_ratio_series(g, 0, 3, 0, sr.as_mut_ptr(), si.as_mut_ptr(), 2) },
        SsmStatus::BufferTooSmall
    );
    assert_eq!(
        unsafe { ssm_ratio_series(g, 0, 1, 7, sr.as_mut_ptr(), si.as_mut_ptr(), 2) },
        SsmStatus::InvalidArgument
    );
    let mut a = SsmApprox::default();
    // P_2 has its zero at -1/2, inside a wide strip at activity 1
    let st = unsafe { ssm_approx_cond_prob(g, 0, ptr::null(), 1.0, 1e-4, 2.0, &mut a) };
    assert_eq!(st, SsmStatus::ZeroRegionViolation);
    assert_eq!(unsafe { ssm_eval_z(g, 1.0, 0.0, &mut re, &mut im) }, SsmStatus::Ok);
    assert!(last_error().is_empty());
    unsafe { ssm_graph_free(g) };
    unsafe { ssm_graph_free(ptr::null_mut()) };
}

#[test]
fn header_declares_exports() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ssm.h")).unwrap();
    for name in [
        "ssm_last_error_message",
        "ssm_version",
        "ssm_graph_from_edge_list",
        "ssm_graph_free",
        "ssm_graph_vertex_count",
        "ssm_graph_edge_count",
        "ssm_ind_poly",
        "ssm_eval_z",
        "ssm_ratio_p",
        "ssm_ratio_series",
        "ssm_cond_prob",
        "ssm_approx_cond_prob",
        "typedef struct SsmGraph SsmGraph",
        "SSM_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
    let v = unsafe { CStr::from_ptr(ssm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
