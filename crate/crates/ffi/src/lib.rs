//! C ABI over the receiver simulator: opaque handles, status codes, and a
//! thread-local last-error message.
//!
//! Conventions:
//! - every fallible call returns a [`GmStatus`]; `GM_STATUS_OK` is zero;
//! - output parameters are written only on success;
//! - handles created by `*_new`/`*_preset`/`*_from_json` must be released
//!   with the matching `*_free`;
//! - [`gm_last_error_message`] retrieves detail for the calling thread's
//!   most recent failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use greenmachine::compare::{run_compare, CompareConfig};
use greenmachine::device::{
    and_gate_delay, dissipation_integral, power, turn_off_delay, turn_on_delay, DelayPolicy,
    GateDrive, MosfetDatasheet, OperatingPoint,
};
use greenmachine::digital::{
    decode_digital, encode_digital, propagate_digital, Polarity, Symbol, SymbolVector,
};
use greenmachine::emit::render_report_json;
use greenmachine::error::Error;
use greenmachine::fwht::{fwht_in_place, hadamard_entry, HadamardOrder};
use greenmachine::optical::{
    decode_optical, optical_latency, optical_power, propagate_optical_with, BeamsplitterSpec,
    ChipGeometry, Complex64, ModeVector, PropagationOptions,
};
use greenmachine::topology::{beamsplitter_count, build_butterfly, depth, HadamardPlan};

/// Result of an FFI call; zero means success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    DomainError = 3,
    DecodeFailure = 4,
    NoSignal = 5,
    ModeError = 6,
    NoTurnOn = 7,
    CalibrationError = 8,
    ConfigError = 9,
    IoError = 10,
    InternalError = 11,
    Panic = 12,
}

/// AND-gate delay aggregation selector for FFI calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmDelayPolicy {
    /// Sum of per-stage worst-case switching delays.
    StageWorstSum = 0,
    /// Use the `fixed_delay_s` argument as the aggregate delay.
    FixedDelay = 1,
}

/// Opaque butterfly plan handle.
pub struct GmPlan {
    inner: HadamardPlan,
}

/// Opaque device datasheet handle.
pub struct GmDatasheet {
    inner: MosfetDatasheet,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: GmStatus, message: &str) -> GmStatus {
    set_last_error(message);
    status
}

fn fail_err(err: &Error) -> GmStatus {
    let status = match err {
        Error::Domain(_) => GmStatus::DomainError,
        Error::InvalidSpec(_) => GmStatus::InvalidArgument,
        Error::NoSignal => GmStatus::NoSignal,
        Error::DecodeFailure(_) => GmStatus::DecodeFailure,
        Error::Mode(_) => GmStatus::ModeError,
        Error::NoTurnOn(_) => GmStatus::NoTurnOn,
        Error::Calibration(_) => GmStatus::CalibrationError,
        Error::Internal(_) => GmStatus::InternalError,
        Error::Config(_) => GmStatus::ConfigError,
        Error::Io { .. } => GmStatus::IoError,
    };
    fail(status, &err.to_string())
}

fn guarded(body: impl FnOnce() -> GmStatus) -> GmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(GmStatus::Panic, "panic across the FFI boundary"),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn gm_status_name(status: GmStatus) -> *const c_char {
    let name: &'static str = match status {
        GmStatus::Ok => "ok\0",
        GmStatus::NullArgument => "null argument\0",
        GmStatus::InvalidArgument => "invalid argument\0",
        GmStatus::DomainError => "domain error\0",
        GmStatus::DecodeFailure => "decode failure\0",
        GmStatus::NoSignal => "no signal\0",
        GmStatus::ModeError => "mode error\0",
        GmStatus::NoTurnOn => "no turn-on\0",
        GmStatus::CalibrationError => "calibration error\0",
        GmStatus::ConfigError => "configuration error\0",
        GmStatus::IoError => "i/o error\0",
        GmStatus::InternalError => "internal error\0",
        GmStatus::Panic => "panic\0",
    };
    name.as_ptr() as *const c_char
}

/// Copies the calling thread's last error message (NUL-terminated) into
/// `buffer` and returns the full message length including the terminator.
/// Call with a null buffer to query the required capacity.
///
/// # Safety
/// `buffer` must point to at least `capacity` writable bytes, or be null.
#[no_mangle]
pub unsafe extern "C" fn gm_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes_with_nul();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buffer as *mut u8, n);
            // Guarantee termination even on truncation.
            *buffer.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Builds the butterfly plan for `order` stages.
///
/// # Safety
/// `out_plan` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_plan_new(order: u32, out_plan: *mut *mut GmPlan) -> GmStatus {
    guarded(|| {
        if out_plan.is_null() {
            return fail(GmStatus::NullArgument, "out_plan is null");
        }
        match HadamardOrder::new(order) {
            Ok(ord) => {
                let plan = Box::new(GmPlan {
                    inner: build_butterfly(ord),
                });
                *out_plan = Box::into_raw(plan);
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Releases a plan handle. Null is ignored.
///
/// # Safety
/// `plan` must have come from [`gm_plan_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gm_plan_free(plan: *mut GmPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// # Safety
/// `plan` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gm_plan_order(plan: *const GmPlan) -> u32 {
    plan.as_ref().map_or(0, |p| p.inner.order().get())
}

/// # Safety
/// `plan` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gm_plan_modes(plan: *const GmPlan) -> u64 {
    plan.as_ref().map_or(0, |p| p.inner.modes() as u64)
}

/// # Safety
/// `plan` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gm_plan_depth(plan: *const GmPlan) -> u32 {
    plan.as_ref().map_or(0, |p| depth(p.inner.order()))
}

/// Number of couplers for an order-`order` network: `n · 2^(n-1)`.
///
/// # Safety
/// `out_count` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_beamsplitter_count(order: u32, out_count: *mut u64) -> GmStatus {
    guarded(|| {
        if out_count.is_null() {
            return fail(GmStatus::NullArgument, "out_count is null");
        }
        match HadamardOrder::new(order) {
            Ok(ord) => {
                *out_count = beamsplitter_count(ord);
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Transistor cost of the electronic receiver at this order.
///
/// # Safety
/// `out_count` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_transistor_count(order: u32, out_count: *mut u64) -> GmStatus {
    guarded(|| {
        if out_count.is_null() {
            return fail(GmStatus::NullArgument, "out_count is null");
        }
        match HadamardOrder::new(order) {
            Ok(ord) => {
                *out_count = greenmachine::compare::transistor_count(ord);
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Copies stage `stage` of the plan as interleaved `lo,hi` mode indices.
/// `capacity` counts u32 slots; the pair count times two is written through
/// `out_written`.
///
/// # Safety
/// `out_pairs` must hold `capacity` u32 slots; `out_written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_plan_stage_pairs(
    plan: *const GmPlan,
    stage: u32,
    out_pairs: *mut u32,
    capacity: usize,
    out_written: *mut usize,
) -> GmStatus {
    guarded(|| {
        let Some(plan) = plan.as_ref() else {
            return fail(GmStatus::NullArgument, "plan is null");
        };
        if out_pairs.is_null() || out_written.is_null() {
            return fail(GmStatus::NullArgument, "output pointer is null");
        }
        let Some(pairs) = plan.inner.stages().get(stage as usize) else {
            return fail(
                GmStatus::DomainError,
                &format!("stage {stage} out of range"),
            );
        };
        let needed = pairs.len() * 2;
        if capacity < needed {
            return fail(
                GmStatus::InvalidArgument,
                &format!("capacity {capacity} below required {needed}"),
            );
        }
        for (i, &(lo, hi)) in pairs.iter().enumerate() {
            *out_pairs.add(2 * i) = lo;
            *out_pairs.add(2 * i + 1) = hi;
        }
        *out_written = needed;
        GmStatus::Ok
    })
}

/// In-place unnormalized fast Walsh-Hadamard transform of `data`.
///
/// # Safety
/// `data` must point to `len` f64 values.
#[no_mangle]
pub unsafe extern "C" fn gm_fwht(data: *mut f64, len: usize) -> GmStatus {
    guarded(|| {
        if data.is_null() {
            return fail(GmStatus::NullArgument, "data is null");
        }
        let slice = std::slice::from_raw_parts_mut(data, len);
        match fwht_in_place(slice) {
            Ok(()) => GmStatus::Ok,
            Err(err) => fail_err(&err),
        }
    })
}

/// Hadamard matrix entry `(-1)^(j·k)` as ±1.
///
/// # Safety
/// `out_sign` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_hadamard_entry(
    j: u64,
    k: u64,
    order: u32,
    out_sign: *mut i32,
) -> GmStatus {
    guarded(|| {
        if out_sign.is_null() {
            return fail(GmStatus::NullArgument, "out_sign is null");
        }
        let ord = match HadamardOrder::new(order) {
            Ok(ord) => ord,
            Err(err) => return fail_err(&err),
        };
        match hadamard_entry(j as usize, k as usize, ord) {
            Ok(sign) => {
                *out_sign = i32::from(sign);
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Propagates `len` complex amplitudes (split into `re`/`im` arrays) through
/// every stage of the plan, in place.
///
/// # Safety
/// `re` and `im` must each point to `len` f64 values.
#[no_mangle]
pub unsafe extern "C" fn gm_optical_propagate(
    plan: *const GmPlan,
    re: *mut f64,
    im: *mut f64,
    len: usize,
    transmittance: f64,
    reflectance: f64,
    phase: f64,
    phase_correction: bool,
) -> GmStatus {
    guarded(|| {
        let Some(plan) = plan.as_ref() else {
            return fail(GmStatus::NullArgument, "plan is null");
        };
        if re.is_null() || im.is_null() {
            return fail(GmStatus::NullArgument, "amplitude buffer is null");
        }
        let spec = match BeamsplitterSpec::new(transmittance, reflectance, phase) {
            Ok(spec) => spec,
            Err(err) => return fail_err(&err),
        };
        let res = std::slice::from_raw_parts_mut(re, len);
        let ims = std::slice::from_raw_parts_mut(im, len);
        let amplitudes: Vec<Complex64> = res
            .iter()
            .zip(ims.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        let input = match ModeVector::new(amplitudes) {
            Ok(v) => v,
            Err(err) => return fail_err(&err),
        };
        let options = PropagationOptions { phase_correction };
        match propagate_optical_with(&plan.inner, &input, &spec, options) {
            Ok(output) => {
                for (k, amp) in output.amplitudes().iter().enumerate() {
                    res[k] = amp.re;
                    ims[k] = amp.im;
                }
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Picks the dominant output mode and its energy share.
///
/// # Safety
/// `re` and `im` must each point to `len` values; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_optical_decode(
    re: *const f64,
    im: *const f64,
    len: usize,
    out_index: *mut u64,
    out_share: *mut f64,
) -> GmStatus {
    guarded(|| {
        if re.is_null() || im.is_null() || out_index.is_null() || out_share.is_null() {
            return fail(GmStatus::NullArgument, "argument is null");
        }
        let res = std::slice::from_raw_parts(re, len);
        let ims = std::slice::from_raw_parts(im, len);
        let amplitudes: Vec<Complex64> = res
            .iter()
            .zip(ims.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        let vector = match ModeVector::new(amplitudes) {
            Ok(v) => v,
            Err(err) => return fail_err(&err),
        };
        match decode_optical(&vector) {
            Ok((index, share)) => {
                *out_index = index as u64;
                *out_share = share;
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Optical decoding latency for a chip with the given beamsplitter length
/// and refractive index.
///
/// # Safety
/// `out_seconds` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_optical_latency_s(
    plan: *const GmPlan,
    bs_traversal_length_m: f64,
    refractive_index: f64,
    out_seconds: *mut f64,
) -> GmStatus {
    guarded(|| {
        let Some(plan) = plan.as_ref() else {
            return fail(GmStatus::NullArgument, "plan is null");
        };
        if out_seconds.is_null() {
            return fail(GmStatus::NullArgument, "out_seconds is null");
        }
        match ChipGeometry::new(bs_traversal_length_m, refractive_index, None) {
            Ok(geometry) => {
                *out_seconds = optical_latency(&plan.inner, &geometry);
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Runtime power of the passive optical network (always 0 W).
#[no_mangle]
pub extern "C" fn gm_optical_runtime_power_w() -> f64 {
    optical_power().runtime_power_w
}

/// Whether the zero-power figure excludes the one-off tuning step (it does).
#[no_mangle]
pub extern "C" fn gm_optical_tuning_power_excluded() -> bool {
    optical_power().tuning_power_excluded
}

fn symbol_to_u8(symbol: Symbol) -> u8 {
    match symbol {
        Symbol::Vacuum => 0,
        Symbol::Plus => 1,
        Symbol::Minus => 2,
    }
}

fn symbol_from_u8(value: u8) -> Option<Symbol> {
    match value {
        0 => Some(Symbol::Vacuum),
        1 => Some(Symbol::Plus),
        2 => Some(Symbol::Minus),
        _ => None,
    }
}

/// Encodes message `j` as digital symbols (0 vacuum, 1 plus, 2 minus).
///
/// # Safety
/// `out_symbols` must hold `capacity` bytes; `out_written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_digital_encode(
    j: u64,
    order: u32,
    invert: bool,
    out_symbols: *mut u8,
    capacity: usize,
    out_written: *mut usize,
) -> GmStatus {
    guarded(|| {
        if out_symbols.is_null() || out_written.is_null() {
            return fail(GmStatus::NullArgument, "output pointer is null");
        }
        let ord = match HadamardOrder::new(order) {
            Ok(ord) => ord,
            Err(err) => return fail_err(&err),
        };
        if capacity < ord.modes() {
            return fail(
                GmStatus::InvalidArgument,
                &format!("capacity {capacity} below required {}", ord.modes()),
            );
        }
        match encode_digital(j as usize, ord, invert) {
            Ok(word) => {
                for (i, symbol) in word.symbols().iter().enumerate() {
                    *out_symbols.add(i) = symbol_to_u8(*symbol);
                }
                *out_written = word.len();
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Propagates `len` digital symbols through every stage of the plan, in place.
///
/// # Safety
/// `symbols` must point to `len` bytes valued 0, 1, or 2.
#[no_mangle]
pub unsafe extern "C" fn gm_digital_propagate(
    plan: *const GmPlan,
    symbols: *mut u8,
    len: usize,
) -> GmStatus {
    guarded(|| {
        let Some(plan) = plan.as_ref() else {
            return fail(GmStatus::NullArgument, "plan is null");
        };
        if symbols.is_null() {
            return fail(GmStatus::NullArgument, "symbols is null");
        }
        let raw = std::slice::from_raw_parts_mut(symbols, len);
        let mut decoded = Vec::with_capacity(len);
        for (i, value) in raw.iter().enumerate() {
            match symbol_from_u8(*value) {
                Some(symbol) => decoded.push(symbol),
                None => {
                    return fail(
                        GmStatus::InvalidArgument,
                        &format!("byte {i} is {value}, not a symbol code"),
                    )
                }
            }
        }
        let input = match SymbolVector::new(decoded) {
            Ok(v) => v,
            Err(err) => return fail_err(&err),
        };
        match propagate_digital(&plan.inner, &input) {
            Ok(output) => {
                for (i, symbol) in output.symbols().iter().enumerate() {
                    raw[i] = symbol_to_u8(*symbol);
                }
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Reads the decoded index and polarity (+1/-1) off a digital output word.
///
/// # Safety
/// `symbols` must point to `len` bytes; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_digital_decode(
    symbols: *const u8,
    len: usize,
    out_index: *mut u64,
    out_polarity: *mut i8,
) -> GmStatus {
    guarded(|| {
        if symbols.is_null() || out_index.is_null() || out_polarity.is_null() {
            return fail(GmStatus::NullArgument, "argument is null");
        }
        let raw = std::slice::from_raw_parts(symbols, len);
        let mut decoded = Vec::with_capacity(len);
        for (i, value) in raw.iter().enumerate() {
            match symbol_from_u8(*value) {
                Some(symbol) => decoded.push(symbol),
                None => {
                    return fail(
                        GmStatus::InvalidArgument,
                        &format!("byte {i} is {value}, not a symbol code"),
                    )
                }
            }
        }
        let vector = match SymbolVector::new(decoded) {
            Ok(v) => v,
            Err(err) => return fail_err(&err),
        };
        match decode_digital(&vector) {
            Ok((index, polarity)) => {
                *out_index = index as u64;
                *out_polarity = match polarity {
                    Polarity::Plus => 1,
                    Polarity::Minus => -1,
                };
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Electronic decoding latency: depth times the AND-gate delay.
///
/// # Safety
/// `out_seconds` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_electronic_latency_s(
    plan: *const GmPlan,
    and_delay_s: f64,
    out_seconds: *mut f64,
) -> GmStatus {
    guarded(|| {
        let Some(plan) = plan.as_ref() else {
            return fail(GmStatus::NullArgument, "plan is null");
        };
        if out_seconds.is_null() {
            return fail(GmStatus::NullArgument, "out_seconds is null");
        }
        match greenmachine::digital::electronic_latency(&plan.inner, and_delay_s) {
            Ok(latency) => {
                *out_seconds = latency;
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Loads a bundled device preset, calibrated for gate voltage `v_gs`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out_datasheet` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_datasheet_preset(
    name: *const c_char,
    v_gs: f64,
    out_datasheet: *mut *mut GmDatasheet,
) -> GmStatus {
    guarded(|| {
        if name.is_null() || out_datasheet.is_null() {
            return fail(GmStatus::NullArgument, "argument is null");
        }
        let Ok(name) = CStr::from_ptr(name).to_str() else {
            return fail(GmStatus::InvalidArgument, "preset name is not UTF-8");
        };
        let Some(preset) = greenmachine::device::preset(name) else {
            return fail(
                GmStatus::ConfigError,
                &format!("unknown device preset '{name}'"),
            );
        };
        match preset.datasheet_at(v_gs) {
            Ok(inner) => {
                *out_datasheet = Box::into_raw(Box::new(GmDatasheet { inner }));
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Parses a JSON datasheet (capacitances in picofarads).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_datasheet` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_datasheet_from_json(
    json: *const c_char,
    out_datasheet: *mut *mut GmDatasheet,
) -> GmStatus {
    guarded(|| {
        if json.is_null() || out_datasheet.is_null() {
            return fail(GmStatus::NullArgument, "argument is null");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(GmStatus::InvalidArgument, "datasheet JSON is not UTF-8");
        };
        match MosfetDatasheet::from_json_str(text) {
            Ok(inner) => {
                *out_datasheet = Box::into_raw(Box::new(GmDatasheet { inner }));
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Releases a datasheet handle. Null is ignored.
///
/// # Safety
/// `datasheet` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gm_datasheet_free(datasheet: *mut GmDatasheet) {
    if !datasheet.is_null() {
        drop(Box::from_raw(datasheet));
    }
}

unsafe fn delay_call(
    datasheet: *const GmDatasheet,
    r_gext_ohm: f64,
    v_gs: f64,
    out_seconds: *mut f64,
    f: impl Fn(&MosfetDatasheet, GateDrive, f64) -> greenmachine::Result<f64>,
) -> GmStatus {
    let Some(ds) = datasheet.as_ref() else {
        return fail(GmStatus::NullArgument, "datasheet is null");
    };
    if out_seconds.is_null() {
        return fail(GmStatus::NullArgument, "out_seconds is null");
    }
    let drive = match GateDrive::new(r_gext_ohm) {
        Ok(drive) => drive,
        Err(err) => return fail_err(&err),
    };
    match f(&ds.inner, drive, v_gs) {
        Ok(seconds) => {
            *out_seconds = seconds;
            GmStatus::Ok
        }
        Err(err) => fail_err(&err),
    }
}

/// Turn-on delay at the given drive.
///
/// # Safety
/// `datasheet` must be a live handle; `out_seconds` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_turn_on_delay_s(
    datasheet: *const GmDatasheet,
    r_gext_ohm: f64,
    v_gs: f64,
    out_seconds: *mut f64,
) -> GmStatus {
    guarded(|| delay_call(datasheet, r_gext_ohm, v_gs, out_seconds, turn_on_delay))
}

/// Turn-off delay at the given drive.
///
/// # Safety
/// `datasheet` must be a live handle; `out_seconds` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_turn_off_delay_s(
    datasheet: *const GmDatasheet,
    r_gext_ohm: f64,
    v_gs: f64,
    out_seconds: *mut f64,
) -> GmStatus {
    guarded(|| delay_call(datasheet, r_gext_ohm, v_gs, out_seconds, turn_off_delay))
}

/// Dissipated power `I_d · V_DS` at a bias point (zero in cutoff).
///
/// # Safety
/// `datasheet` must be a live handle; `out_watts` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_mosfet_power_w(
    datasheet: *const GmDatasheet,
    v_gs: f64,
    v_ds: f64,
    out_watts: *mut f64,
) -> GmStatus {
    guarded(|| {
        let Some(ds) = datasheet.as_ref() else {
            return fail(GmStatus::NullArgument, "datasheet is null");
        };
        if out_watts.is_null() {
            return fail(GmStatus::NullArgument, "out_watts is null");
        }
        let op = match OperatingPoint::new(v_gs, v_ds) {
            Ok(op) => op,
            Err(err) => return fail_err(&err),
        };
        match power(&ds.inner, op) {
            Ok(watts) => {
                *out_watts = watts;
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Closed-form triode dissipation integral between `v_off` and `v_ds`.
///
/// # Safety
/// `datasheet` must be a live handle; `out_watts` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_dissipation_integral_w(
    datasheet: *const GmDatasheet,
    v_gs: f64,
    v_ds: f64,
    v_off: f64,
    out_watts: *mut f64,
) -> GmStatus {
    guarded(|| {
        let Some(ds) = datasheet.as_ref() else {
            return fail(GmStatus::NullArgument, "datasheet is null");
        };
        if out_watts.is_null() {
            return fail(GmStatus::NullArgument, "out_watts is null");
        }
        match dissipation_integral(&ds.inner, v_gs, v_ds, v_off) {
            Ok(watts) => {
                *out_watts = watts;
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

fn ffi_policy(policy: GmDelayPolicy, fixed_delay_s: f64) -> greenmachine::Result<DelayPolicy> {
    match policy {
        GmDelayPolicy::StageWorstSum => Ok(DelayPolicy::StageWorstSum),
        GmDelayPolicy::FixedDelay => DelayPolicy::fixed_seconds(fixed_delay_s),
    }
}

/// Aggregated AND-gate (NAND + inverter) delay under the chosen policy.
///
/// # Safety
/// Both datasheets must be live handles; `out_seconds` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gm_and_gate_delay_s(
    nmos: *const GmDatasheet,
    pmos: *const GmDatasheet,
    r_gext_ohm: f64,
    v_gs: f64,
    policy: GmDelayPolicy,
    fixed_delay_s: f64,
    out_seconds: *mut f64,
) -> GmStatus {
    guarded(|| {
        let (Some(nmos), Some(pmos)) = (nmos.as_ref(), pmos.as_ref()) else {
            return fail(GmStatus::NullArgument, "datasheet is null");
        };
        if out_seconds.is_null() {
            return fail(GmStatus::NullArgument, "out_seconds is null");
        }
        let policy = match ffi_policy(policy, fixed_delay_s) {
            Ok(policy) => policy,
            Err(err) => return fail_err(&err),
        };
        let drive = match GateDrive::new(r_gext_ohm) {
            Ok(drive) => drive,
            Err(err) => return fail_err(&err),
        };
        match and_gate_delay(&nmos.inner, &pmos.inner, drive, v_gs, &policy) {
            Ok(delays) => {
                *out_seconds = delays.and_gate_delay_s;
                GmStatus::Ok
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Runs the full comparison with bundled presets and returns the JSON report
/// as a heap string; release it with [`gm_string_free`]. A non-positive
/// `stage_delay_ps` means "derive the per-stage delay from the default chip
/// geometry".
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gm_compare_report_json(
    order: u32,
    v_gs: f64,
    r_gext_ohm: f64,
    policy: GmDelayPolicy,
    fixed_delay_s: f64,
    stage_delay_ps: f64,
    out_json: *mut *mut c_char,
) -> GmStatus {
    guarded(|| {
        if out_json.is_null() {
            return fail(GmStatus::NullArgument, "out_json is null");
        }
        let policy = match ffi_policy(policy, fixed_delay_s) {
            Ok(policy) => policy,
            Err(err) => return fail_err(&err),
        };
        let config = CompareConfig {
            order,
            v_gs,
            r_gext_ohm,
            policy,
            stage_delay_ps: (stage_delay_ps > 0.0).then_some(stage_delay_ps),
            ..CompareConfig::default()
        };
        match run_compare(&config) {
            Ok(report) => {
                let json = render_report_json(&report);
                match CString::new(json) {
                    Ok(cstring) => {
                        *out_json = cstring.into_raw();
                        GmStatus::Ok
                    }
                    Err(_) => fail(GmStatus::InternalError, "report contained a NUL byte"),
                }
            }
            Err(err) => fail_err(&err),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `text` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gm_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
