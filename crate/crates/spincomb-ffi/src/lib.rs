//! C ABI for embedding the simulator in other languages.
//!
//! Conventions:
//! - Every fallible call returns a [`SpincombStatus`]; outputs go through
//!   pointer parameters that are written only on `SPINCOMB_STATUS_OK`.
//! - Handles ([`SpincombExperiment`], [`SpincombResult`]) are opaque and
//!   must be released with their matching `_free` function exactly once.
//! - On failure, a human-readable message for the calling thread is
//!   available via [`spincomb_last_error_message`] until the next
//!   failing call on that thread.
//! - Strings returned by `_json` functions are NUL-terminated UTF-8 owned
//!   by the caller; release them with [`spincomb_string_free`].

use spincomb::output::result_json;
use spincomb::{Error, Experiment, ExperimentConfig, RunResult};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result classes surfaced over the C ABI. Numeric values mirror the CLI
/// exit codes where one exists.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum SpincombStatus {
    Ok = 0,
    /// A pointer argument was null or otherwise unusable.
    InvalidArgument = 1,
    /// Bad configuration JSON, geometry, or call ordering.
    ConfigError = 2,
    /// Calibration references did not clear the noise floor.
    CalibrationError = 3,
    /// The requested step size cannot resolve the dynamics.
    StabilityError = 4,
    /// A panic was caught at the boundary; state may be stale.
    InternalError = 5,
}

/// Opaque simulator instance (configuration, cluster, calibration state).
pub struct SpincombExperiment {
    inner: Experiment,
}

/// Opaque run outcome (decoded word, slot amplitudes, report fields).
pub struct SpincombResult {
    inner: RunResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> =
        RefCell::new(CString::new("no error").unwrap());
}

fn set_error(message: &str) {
    let clean: String = message.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).unwrap_or_else(|_| {
            CString::new("error message unavailable").unwrap()
        });
    });
}

fn status_of(err: &Error) -> SpincombStatus {
    match err {
        Error::Calibration(_) => SpincombStatus::CalibrationError,
        Error::Stability(_) => SpincombStatus::StabilityError,
        _ => SpincombStatus::ConfigError,
    }
}

fn fail(err: &Error) -> SpincombStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn fail_invalid(message: &str) -> SpincombStatus {
    set_error(message);
    SpincombStatus::InvalidArgument
}

fn guarded(op: impl FnOnce() -> SpincombStatus) -> SpincombStatus {
    match catch_unwind(AssertUnwindSafe(op)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic caught at the language boundary");
            SpincombStatus::InternalError
        }
    }
}

/// ABI revision of this header/library pair.
#[no_mangle]
pub extern "C" fn spincomb_abi_version() -> u32 {
    1
}

/// Message describing this thread's most recent failure.
///
/// The pointer stays valid until the next failing `spincomb_*` call on
/// the same thread; do not free it.
#[no_mangle]
pub extern "C" fn spincomb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Build an experiment from configuration JSON (same schema as the CLI's
/// `--config` file). On success writes a handle to `out`.
///
/// # Safety
/// `config_json` must point to a NUL-terminated string; `out` must point
/// to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn spincomb_experiment_new(
    config_json: *const c_char,
    out: *mut *mut SpincombExperiment,
) -> SpincombStatus {
    guarded(|| {
        if config_json.is_null() || out.is_null() {
            return fail_invalid("config_json and out must be non-null");
        }
        let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
            Ok(text) => text,
            Err(_) => return fail_invalid("config_json must be valid UTF-8"),
        };
        let config = match ExperimentConfig::from_json(text) {
            Ok(config) => config,
            Err(err) => return fail(&err),
        };
        match Experiment::new(config) {
            Ok(inner) => {
                unsafe {
                    *out = Box::into_raw(Box::new(SpincombExperiment { inner }));
                }
                SpincombStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Release an experiment handle. Passing null is a no-op.
///
/// # Safety
/// `experiment` must be a handle from [`spincomb_experiment_new`] that
/// has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn spincomb_experiment_free(experiment: *mut SpincombExperiment) {
    if !experiment.is_null() {
        drop(unsafe { Box::from_raw(experiment) });
    }
}

/// Write the all-ones comb and store the slot references used by later
/// decodes. Must succeed before `spincomb_run_encode` / `spincomb_run_not`.
///
/// # Safety
/// `experiment` must be a live handle from [`spincomb_experiment_new`].
#[no_mangle]
pub unsafe extern "C" fn spincomb_calibrate(
    experiment: *mut SpincombExperiment,
) -> SpincombStatus {
    guarded(|| {
        let Some(exp) = (unsafe { experiment.as_mut() }) else {
            return fail_invalid("experiment must be non-null");
        };
        match exp.inner.run_calibration() {
            Ok(_) => SpincombStatus::Ok,
            Err(err) => fail(&err),
        }
    })
}

unsafe fn run_with(
    experiment: *mut SpincombExperiment,
    out: *mut *mut SpincombResult,
    op: impl FnOnce(&Experiment) -> spincomb::Result<RunResult>,
) -> SpincombStatus {
    guarded(|| {
        if out.is_null() {
            return fail_invalid("out must be non-null");
        }
        let Some(exp) = (unsafe { experiment.as_ref() }) else {
            return fail_invalid("experiment must be non-null");
        };
        match op(&exp.inner) {
            Ok(inner) => {
                unsafe {
                    *out = Box::into_raw(Box::new(SpincombResult { inner }));
                }
                SpincombStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Encode `value` and read it back. Writes a result handle to `out`.
///
/// # Safety
/// `experiment` must be a live handle; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn spincomb_run_encode(
    experiment: *mut SpincombExperiment,
    value: u64,
    out: *mut *mut SpincombResult,
) -> SpincombStatus {
    unsafe { run_with(experiment, out, |exp| exp.run_encode(value)) }
}

/// Run the parallel bitwise NOT of `value` (write all-ones, erase the
/// slots where `value` has ones). Writes a result handle to `out`.
///
/// # Safety
/// `experiment` must be a live handle; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn spincomb_run_not(
    experiment: *mut SpincombExperiment,
    value: u64,
    out: *mut *mut SpincombResult,
) -> SpincombStatus {
    unsafe { run_with(experiment, out, |exp| exp.run_not(value)) }
}

/// Release a result handle. Passing null is a no-op.
///
/// # Safety
/// `result` must be a handle from a `spincomb_run_*` call that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn spincomb_result_free(result: *mut SpincombResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// Decoded word as an integer (bit k of the word = slot k).
///
/// # Safety
/// `result` must be a live result handle; `value` must point to writable
/// storage for one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn spincomb_result_value(
    result: *const SpincombResult,
    value: *mut u64,
) -> SpincombStatus {
    guarded(|| {
        let Some(res) = (unsafe { result.as_ref() }) else {
            return fail_invalid("result must be non-null");
        };
        if value.is_null() {
            return fail_invalid("value must be non-null");
        }
        unsafe { *value = res.inner.value };
        SpincombStatus::Ok
    })
}

/// Number of bits in the decoded word.
///
/// # Safety
/// `result` must be a live result handle; `count` must point to writable
/// storage for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn spincomb_result_bit_count(
    result: *const SpincombResult,
    count: *mut usize,
) -> SpincombStatus {
    guarded(|| {
        let Some(res) = (unsafe { result.as_ref() }) else {
            return fail_invalid("result must be non-null");
        };
        if count.is_null() {
            return fail_invalid("count must be non-null");
        }
        unsafe { *count = res.inner.decoded_bits.len() };
        SpincombStatus::Ok
    })
}

/// Copy the decoded bits, least significant first, one byte per bit.
/// `len` must be at least the value from [`spincomb_result_bit_count`].
///
/// # Safety
/// `result` must be a live result handle; `buffer` must point to at
/// least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn spincomb_result_bits(
    result: *const SpincombResult,
    buffer: *mut u8,
    len: usize,
) -> SpincombStatus {
    guarded(|| {
        let Some(res) = (unsafe { result.as_ref() }) else {
            return fail_invalid("result must be non-null");
        };
        if buffer.is_null() {
            return fail_invalid("buffer must be non-null");
        }
        let bits = &res.inner.decoded_bits;
        if len < bits.len() {
            return fail_invalid("buffer is shorter than the decoded word");
        }
        unsafe { std::ptr::copy_nonoverlapping(bits.as_ptr(), buffer, bits.len()) };
        SpincombStatus::Ok
    })
}

/// Copy the per-slot spectral amplitudes. `len` must be at least the bit
/// count.
///
/// # Safety
/// `result` must be a live result handle; `buffer` must point to at
/// least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn spincomb_result_slot_amplitudes(
    result: *const SpincombResult,
    buffer: *mut f64,
    len: usize,
) -> SpincombStatus {
    guarded(|| {
        let Some(res) = (unsafe { result.as_ref() }) else {
            return fail_invalid("result must be non-null");
        };
        if buffer.is_null() {
            return fail_invalid("buffer must be non-null");
        }
        let amps = &res.inner.slot_amplitudes;
        if len < amps.len() {
            return fail_invalid("buffer is shorter than the slot count");
        }
        unsafe { std::ptr::copy_nonoverlapping(amps.as_ptr(), buffer, amps.len()) };
        SpincombStatus::Ok
    })
}

/// Full run summary as a JSON string (same shape as the CLI's
/// result.json). On success writes a caller-owned string to `out`;
/// release it with [`spincomb_string_free`].
///
/// # Safety
/// `result` must be a live result handle; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn spincomb_result_json(
    result: *const SpincombResult,
    out: *mut *mut c_char,
) -> SpincombStatus {
    guarded(|| {
        let Some(res) = (unsafe { result.as_ref() }) else {
            return fail_invalid("result must be non-null");
        };
        if out.is_null() {
            return fail_invalid("out must be non-null");
        }
        match result_json(&res.inner) {
            Ok(text) => match CString::new(text) {
                Ok(cstring) => {
                    unsafe { *out = cstring.into_raw() };
                    SpincombStatus::Ok
                }
                Err(_) => fail_invalid("summary contained an interior NUL"),
            },
            Err(err) => fail(&err),
        }
    })
}

/// Release a string returned by this library. Passing null is a no-op.
///
/// # Safety
/// `text` must be a pointer from a `spincomb_*_json` call that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn spincomb_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}
