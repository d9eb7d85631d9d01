//! C ABI for the photon-logic simulator.
//!
//! Handles are opaque pointers owned by this library; every constructor
//! has a matching `*_free`. Functions return [`PlStatus`]; on any
//! non-zero status the thread-local message behind
//! [`pl_last_error_message`] describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use photon_logic::experiments::{
    preset, run, run_figure, ExperimentConfig, ExperimentKind, RunReport,
};
use photon_logic::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Config text failed to parse or validate.
    BadConfig = 3,
    /// Argument outside the supported range (unknown kind, figure id,
    /// metric name).
    BadArgument = 4,
    /// The simulation or analysis itself failed.
    RunFailed = 5,
}

/// Experiment description. Opaque; create via `pl_config_preset` or
/// `pl_config_parse`, release with `pl_config_free`.
pub struct PlConfig(ExperimentConfig);

/// Finished run: metrics plus provenance. Opaque; release with
/// `pl_report_free`.
pub struct PlReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let cstring = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn fail(status: PlStatus, err: Error) -> PlStatus {
    set_error(err.to_string());
    status
}

fn classify(err: &Error) -> PlStatus {
    match err {
        Error::Config(_) | Error::TomlParse(_) => PlStatus::BadConfig,
        Error::Argument(_) => PlStatus::BadArgument,
        _ => PlStatus::RunFailed,
    }
}

/// Reads a required C string argument.
///
/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn required_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, PlStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is null"));
        return Err(PlStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        PlStatus::InvalidUtf8
    })
}

fn write_out<T>(out: *mut *mut T, value: T, what: &str) -> PlStatus {
    if out.is_null() {
        set_error(format!("{what} output pointer is null"));
        return PlStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    PlStatus::Ok
}

fn write_string(out: *mut *mut c_char, text: String, what: &str) -> PlStatus {
    if out.is_null() {
        set_error(format!("{what} output pointer is null"));
        return PlStatus::NullPointer;
    }
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            PlStatus::Ok
        }
        Err(_) => {
            set_error(format!("{what} contains an interior NUL byte"));
            PlStatus::RunFailed
        }
    }
}

/// Library version as a static string. Do not free.
#[no_mangle]
pub extern "C" fn pl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or an empty
/// string. Caller frees with `pl_string_free`.
#[no_mangle]
pub extern "C" fn pl_last_error_message() -> *mut c_char {
    let msg = LAST_ERROR
        .with(|slot| slot.borrow().clone())
        .unwrap_or_default();
    msg.into_raw()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Builds one of the calibrated built-in configs. `kind` is one of
/// "hbt", "hom", "cnot_truth_table", "bell_zz", "bell_xx".
///
/// # Safety
/// `kind` must be a valid NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_config_preset(
    kind: *const c_char,
    seed: u64,
    out: *mut *mut PlConfig,
) -> PlStatus {
    let kind = match unsafe { required_str(kind, "kind") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    match ExperimentKind::parse(kind) {
        Ok(k) => write_out(out, PlConfig(preset(k, seed)), "config"),
        Err(e) => fail(PlStatus::BadArgument, e),
    }
}

/// Parses and validates a config from TOML text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_config_parse(
    text: *const c_char,
    out: *mut *mut PlConfig,
) -> PlStatus {
    let text = match unsafe { required_str(text, "config text") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    match ExperimentConfig::from_toml(text) {
        Ok(cfg) => write_out(out, PlConfig(cfg), "config"),
        Err(e) => fail(PlStatus::BadConfig, e),
    }
}

/// Renders a config back to TOML. Caller frees with `pl_string_free`.
///
/// # Safety
/// `cfg` must be a live config handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_config_to_toml(
    cfg: *const PlConfig,
    out: *mut *mut c_char,
) -> PlStatus {
    let Some(cfg) = (unsafe { cfg.as_ref() }) else {
        set_error("config is null");
        return PlStatus::NullPointer;
    };
    match cfg.0.to_toml() {
        Ok(text) => write_string(out, text, "config text"),
        Err(e) => fail(PlStatus::RunFailed, e),
    }
}

/// Overrides the seed.
///
/// # Safety
/// `cfg` must be a live config handle.
#[no_mangle]
pub unsafe extern "C" fn pl_config_set_seed(cfg: *mut PlConfig, seed: u64) -> PlStatus {
    match unsafe { cfg.as_mut() } {
        Some(cfg) => {
            cfg.0.seed = seed;
            PlStatus::Ok
        }
        None => {
            set_error("config is null");
            PlStatus::NullPointer
        }
    }
}

/// Overrides the per-log acquisition length, in nanoseconds.
///
/// # Safety
/// `cfg` must be a live config handle.
#[no_mangle]
pub unsafe extern "C" fn pl_config_set_duration_ns(cfg: *mut PlConfig, ns: f64) -> PlStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        set_error("config is null");
        return PlStatus::NullPointer;
    };
    let previous = cfg.0.duration_ns;
    cfg.0.duration_ns = ns;
    if let Err(e) = cfg.0.validate() {
        cfg.0.duration_ns = previous;
        return fail(PlStatus::BadConfig, e);
    }
    PlStatus::Ok
}

/// Stable fingerprint of the serialized config.
///
/// # Safety
/// `cfg` must be a live config handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_config_hash(cfg: *const PlConfig, out: *mut u64) -> PlStatus {
    let Some(cfg) = (unsafe { cfg.as_ref() }) else {
        set_error("config is null");
        return PlStatus::NullPointer;
    };
    if out.is_null() {
        set_error("hash output pointer is null");
        return PlStatus::NullPointer;
    }
    match cfg.0.hash() {
        Ok(h) => {
            unsafe { *out = h };
            PlStatus::Ok
        }
        Err(e) => fail(PlStatus::RunFailed, e),
    }
}

/// Releases a config handle.
///
/// # Safety
/// `cfg` must be null or a live config handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pl_config_free(cfg: *mut PlConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

/// Simulates and analyzes in one step.
///
/// # Safety
/// `cfg` must be a live config handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_run(cfg: *const PlConfig, out: *mut *mut PlReport) -> PlStatus {
    let Some(cfg) = (unsafe { cfg.as_ref() }) else {
        set_error("config is null");
        return PlStatus::NullPointer;
    };
    match run(&cfg.0) {
        Ok(res) => write_out(out, PlReport(res.report), "report"),
        Err(e) => {
            let status = classify(&e);
            fail(status, e)
        }
    }
}

/// Report as pretty JSON. Caller frees with `pl_string_free`.
///
/// # Safety
/// `report` must be a live report handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_report_json(
    report: *const PlReport,
    out: *mut *mut c_char,
) -> PlStatus {
    let Some(report) = (unsafe { report.as_ref() }) else {
        set_error("report is null");
        return PlStatus::NullPointer;
    };
    match report.0.to_json() {
        Ok(text) => write_string(out, text, "report json"),
        Err(e) => fail(PlStatus::RunFailed, e),
    }
}

/// Headline scalar lookup ("g2_zero", "visibility", "similarity",
/// "expectation", "pairs", "clicks", ...).
///
/// # Safety
/// `report` must be a live report handle; `name` a valid NUL-terminated
/// string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_report_metric(
    report: *const PlReport,
    name: *const c_char,
    out: *mut f64,
) -> PlStatus {
    let Some(report) = (unsafe { report.as_ref() }) else {
        set_error("report is null");
        return PlStatus::NullPointer;
    };
    let name = match unsafe { required_str(name, "metric name") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    if out.is_null() {
        set_error("metric output pointer is null");
        return PlStatus::NullPointer;
    }
    match report.0.metric(name) {
        Some(v) => {
            unsafe { *out = v };
            PlStatus::Ok
        }
        None => {
            set_error(format!("report carries no metric {name:?}"));
            PlStatus::BadArgument
        }
    }
}

/// Releases a report handle.
///
/// # Safety
/// `report` must be null or a live report handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pl_report_free(report: *mut PlReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Rebuilds one named figure ("1d", "1e", "2b", "2c", "3ab", "3e") and
/// returns its JSON document. Pure function of (id, seed). Caller frees
/// with `pl_string_free`.
///
/// # Safety
/// `id` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_figure_json(
    id: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
) -> PlStatus {
    let id = match unsafe { required_str(id, "figure id") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    match run_figure(id, seed).and_then(|fig| fig.to_json()) {
        Ok(text) => write_string(out, text, "figure json"),
        Err(e) => {
            let status = classify(&e);
            fail(status, e)
        }
    }
}

/// Same figure as CSV.
///
/// # Safety
/// `id` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_figure_csv(
    id: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
) -> PlStatus {
    let id = match unsafe { required_str(id, "figure id") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    match run_figure(id, seed) {
        Ok(fig) => write_string(out, fig.to_csv(), "figure csv"),
        Err(e) => {
            let status = classify(&e);
            fail(status, e)
        }
    }
}

/// Cross-checks sampled two-photon transport against the permanent
/// formula on `trials` random interferometers; writes the worst
/// probability deviation.
///
/// # Safety
/// `max_abs_delta` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_permanent_cross_check(
    seed: u64,
    trials: usize,
    max_abs_delta: *mut f64,
) -> PlStatus {
    if max_abs_delta.is_null() {
        set_error("max_abs_delta output pointer is null");
        return PlStatus::NullPointer;
    }
    match photon_logic::experiments::permanent_cross_check(seed, trials) {
        Ok(res) => {
            unsafe { *max_abs_delta = res.max_abs_delta };
            PlStatus::Ok
        }
        Err(e) => {
            let status = classify(&e);
            fail(status, e)
        }
    }
}
