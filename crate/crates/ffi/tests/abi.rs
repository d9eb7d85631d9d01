//! Exercises the C surface exactly as a foreign caller would: through
//! raw pointers and status codes.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use photon_logic_ffi::*;

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { pl_string_free(ptr) };
    text
}

fn last_error() -> String {
    take_string(pl_last_error_message())
}

fn preset(kind: &str, seed: u64) -> *mut PlConfig {
    let kind = CString::new(kind).unwrap();
    let mut cfg = ptr::null_mut();
    let status = unsafe { pl_config_preset(kind.as_ptr(), seed, &mut cfg) };
    assert_eq!(status, PlStatus::Ok, "{}", last_error());
    cfg
}

#[test]
fn version_is_a_static_string() {
    let v = pl_version();
    assert!(!v.is_null());
    let text = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
    assert!(text.split('.').count() >= 2, "unexpected version {text:?}");
}

#[test]
fn run_lifecycle_produces_metrics_and_json() {
    let cfg = preset("hbt", 3);
    assert_eq!(unsafe { pl_config_set_duration_ns(cfg, 2.0e9) }, PlStatus::Ok);

    let mut hash = 0u64;
    assert_eq!(unsafe { pl_config_hash(cfg, &mut hash) }, PlStatus::Ok);
    assert_ne!(hash, 0);

    let mut report = ptr::null_mut();
    assert_eq!(unsafe { pl_run(cfg, &mut report) }, PlStatus::Ok, "{}", last_error());

    let mut g2 = f64::NAN;
    let name = CString::new("g2_zero").unwrap();
    assert_eq!(unsafe { pl_report_metric(report, name.as_ptr(), &mut g2) }, PlStatus::Ok);
    assert!(g2.is_finite() && g2 >= 0.0, "g2_zero = {g2}");

    let mut clicks = 0.0;
    let name = CString::new("clicks").unwrap();
    assert_eq!(unsafe { pl_report_metric(report, name.as_ptr(), &mut clicks) }, PlStatus::Ok);
    assert!(clicks > 0.0);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { pl_report_json(report, &mut json) }, PlStatus::Ok);
    let json = take_string(json);
    assert!(json.contains("\"kind\""), "report json lacks provenance: {json}");
    assert!(json.contains(&format!("{hash:016x}")), "report json lacks the config hash");

    unsafe {
        pl_report_free(report);
        pl_config_free(cfg);
    }
}

#[test]
fn config_toml_round_trip_preserves_hash() {
    let cfg = preset("bell_xx", 11);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { pl_config_to_toml(cfg, &mut text) }, PlStatus::Ok);
    let text = take_string(text);

    let ctext = CString::new(text).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { pl_config_parse(ctext.as_ptr(), &mut back) }, PlStatus::Ok);

    let (mut h1, mut h2) = (0u64, 0u64);
    assert_eq!(unsafe { pl_config_hash(cfg, &mut h1) }, PlStatus::Ok);
    assert_eq!(unsafe { pl_config_hash(back, &mut h2) }, PlStatus::Ok);
    assert_eq!(h1, h2);

    unsafe {
        pl_config_free(cfg);
        pl_config_free(back);
    }
}

#[test]
fn bad_inputs_set_status_and_message() {
    // Unknown preset kind.
    let kind = CString::new("squeezed").unwrap();
    let mut cfg = ptr::null_mut();
    let status = unsafe { pl_config_preset(kind.as_ptr(), 0, &mut cfg) };
    assert_eq!(status, PlStatus::BadArgument);
    assert!(last_error().contains("squeezed"), "message should name the bad kind");

    // Null pointers.
    assert_eq!(unsafe { pl_config_preset(ptr::null(), 0, &mut cfg) }, PlStatus::NullPointer);
    assert_eq!(unsafe { pl_run(ptr::null(), ptr::null_mut()) }, PlStatus::NullPointer);
    unsafe { pl_config_free(ptr::null_mut()) };
    unsafe { pl_report_free(ptr::null_mut()) };
    unsafe { pl_string_free(ptr::null_mut()) };

    // Broken config text.
    let text = CString::new("kind = \"hbt\"").unwrap();
    let mut parsed = ptr::null_mut();
    assert_eq!(unsafe { pl_config_parse(text.as_ptr(), &mut parsed) }, PlStatus::BadConfig);
    assert!(!last_error().is_empty());

    // Rejected field values leave the config usable.
    let cfg = preset("hbt", 0);
    assert_eq!(unsafe { pl_config_set_duration_ns(cfg, -1.0) }, PlStatus::BadConfig);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { pl_config_set_duration_ns(cfg, 1.0e9) }, PlStatus::Ok);
    assert_eq!(unsafe { pl_run(cfg, &mut report) }, PlStatus::Ok, "{}", last_error());

    // Unknown metric name.
    let name = CString::new("entropy").unwrap();
    let mut value = 0.0;
    assert_eq!(
        unsafe { pl_report_metric(report, name.as_ptr(), &mut value) },
        PlStatus::BadArgument
    );

    unsafe {
        pl_report_free(report);
        pl_config_free(cfg);
    }
}

#[test]
fn figure_json_is_deterministic() {
    let id = CString::new("1d").unwrap();
    let mut first = ptr::null_mut();
    assert_eq!(unsafe { pl_figure_json(id.as_ptr(), 5, &mut first) }, PlStatus::Ok);
    let mut second = ptr::null_mut();
    assert_eq!(unsafe { pl_figure_json(id.as_ptr(), 5, &mut second) }, PlStatus::Ok);
    let (first, second) = (take_string(first), take_string(second));
    assert_eq!(first, second);
    assert!(first.contains("\"g2_zero\""));

    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { pl_figure_csv(id.as_ptr(), 5, &mut csv) }, PlStatus::Ok);
    let csv = take_string(csv);
    assert!(csv.starts_with("# figure 1d seed 5\n"));

    let bogus = CString::new("9z").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pl_figure_json(bogus.as_ptr(), 5, &mut out) }, PlStatus::BadArgument);
}

#[test]
fn transport_cross_check_is_callable() {
    let mut delta = f64::NAN;
    assert_eq!(unsafe { pl_permanent_cross_check(9, 5, &mut delta) }, PlStatus::Ok);
    assert!(delta < 1e-8, "max deviation {delta:.3e}");
    assert_eq!(unsafe { pl_permanent_cross_check(9, 5, ptr::null_mut()) }, PlStatus::NullPointer);
}

#[test]
fn generated_header_names_the_whole_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/photon_logic.h"
    ))
    .expect("header missing; build.rs should have written it");
    for symbol in [
        "pl_version",
        "pl_last_error_message",
        "pl_string_free",
        "pl_config_preset",
        "pl_config_parse",
        "pl_config_to_toml",
        "pl_config_set_seed",
        "pl_config_set_duration_ns",
        "pl_config_hash",
        "pl_config_free",
        "pl_run",
        "pl_report_json",
        "pl_report_metric",
        "pl_report_free",
        "pl_figure_json",
        "pl_figure_csv",
        "pl_permanent_cross_check",
        "PL_STATUS_OK",
        "typedef struct PlConfig PlConfig",
        "typedef struct PlReport PlReport",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}");
    }
}
