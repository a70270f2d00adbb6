//! C ABI over the `multifield` core.
//!
//! Every entry point returns an [`MfStatus`]. On failure a message is kept
//! per thread and can be read back with [`mf_last_error`]. Objects are handed
//! out as opaque pointers and released with the matching `*_free` function.
//!
//! Frequencies cross the boundary in GHz (MHz for cavity widths) and times
//! in ns, the same units the JSON configs use.
//!
//! Pointer arguments must be null or valid for the access the function
//! documents. Handles must come from the matching constructor and be freed
//! once.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use multifield::counting::{g2_cross, simulate_trials, summarize, Channel, GateConfig};
use multifield::units::{ghz, mhz, to_ghz, CS_GROUND_SPLITTING_GHZ};
use multifield::{
    calibrate_stack, CollectionFactors, CountingError, DriveParams, DynamicsError, EmissionSet,
    EventStream, FilterError, FilterStack, LevelScheme, SourceModel,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The inputs were valid but the quantity is undefined, e.g. a
    /// degenerate dressed basis or a g² with zero singles.
    Numeric = 3,
    Panic = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(MfStatus, String);

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        let status = match e {
            DynamicsError::DegenerateLabeling(_) => MfStatus::Numeric,
            _ => MfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<FilterError> for Failure {
    fn from(e: FilterError) -> Self {
        let status = match e {
            FilterError::CalibrationDiverged(_) => MfStatus::Numeric,
            _ => MfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<CountingError> for Failure {
    fn from(e: CountingError) -> Self {
        let status = match e {
            CountingError::Undefined(_) => MfStatus::Numeric,
            _ => MfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(MfStatus::NullPointer, format!("{name} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MfStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MfStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn in_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

/// Message for the last failed call on this thread, or null after a
/// successful call. Valid until the next `mf_*` call on the same thread.
#[no_mangle]
pub extern "C" fn mf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

pub struct MfEmissionSet(EmissionSet);

/// Level scheme and drive for [`mf_emission_compute`]. GHz and ns.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MfDriveInput {
    pub splitting_31_ghz: f64,
    pub delta23_ghz: f64,
    pub gauge: f64,
    pub omega12_ghz: f64,
    pub omega23_ghz: f64,
    pub pulse_duration_ns: f64,
    pub d12: f64,
    pub d32: f64,
}

/// Cesium-like defaults at Δ₂₃ = 4 GHz with unit Rabi frequencies.
#[no_mangle]
pub unsafe extern "C" fn mf_drive_input_default(out: *mut MfDriveInput) -> MfStatus {
    guard(|| {
        *out_ref(out, "out")? = MfDriveInput {
            splitting_31_ghz: CS_GROUND_SPLITTING_GHZ,
            delta23_ghz: 4.0,
            gauge: LevelScheme::DEFAULT_GAUGE,
            omega12_ghz: 1.0,
            omega23_ghz: 1.0,
            pulse_duration_ns: 2.0,
            d12: 1.0,
            d32: 1.0,
        };
        Ok(())
    })
}

/// Solves the dressed system and builds the seven emission components.
/// `collection` points to 7 weights or is null for all ones.
#[no_mangle]
pub unsafe extern "C" fn mf_emission_compute(
    input: *const MfDriveInput,
    collection: *const f64,
    out: *mut *mut MfEmissionSet,
) -> MfStatus {
    guard(|| {
        let inp = in_ref(input, "input")?;
        let out = out_ref(out, "out")?;
        let weights = if collection.is_null() {
            [1.0; 7]
        } else {
            let mut w = [0.0; 7];
            w.copy_from_slice(std::slice::from_raw_parts(collection, 7));
            w
        };
        let scheme = LevelScheme::new(ghz(inp.splitting_31_ghz), ghz(inp.delta23_ghz), inp.gauge)?;
        let drive = DriveParams::new(ghz(inp.omega12_ghz), ghz(inp.omega23_ghz), inp.pulse_duration_ns)?
            .with_dipoles(inp.d12, inp.d32)?;
        let set = EmissionSet::compute(&scheme, &drive, &CollectionFactors::new(weights)?)?;
        *out = Box::into_raw(Box::new(MfEmissionSet(set)));
        Ok(())
    })
}

/// Component `j` in 1..=7: offset from ω₀ in GHz, signed amplitude and
/// collected intensity normalized to the strongest component. Any output
/// pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn mf_emission_component(
    set: *const MfEmissionSet,
    j: usize,
    offset_ghz: *mut f64,
    amplitude: *mut f64,
    intensity_norm: *mut f64,
) -> MfStatus {
    guard(|| {
        let set = &in_ref(set, "set")?.0;
        if !(1..=7).contains(&j) {
            return Err(Failure(MfStatus::InvalidArgument, format!("component index {j} is outside 1..=7")));
        }
        let c = set.component(j);
        if let Some(p) = offset_ghz.as_mut() {
            *p = to_ghz(c.offset);
        }
        if let Some(p) = amplitude.as_mut() {
            *p = c.amplitude;
        }
        if let Some(p) = intensity_norm.as_mut() {
            *p = set.normalized_intensity(j);
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mf_emission_free(set: *mut MfEmissionSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

pub struct MfFilterStack(FilterStack);

/// `n` identical cavities whose cascade has total FWHM `total_fwhm_mhz` and
/// peak transmission `total_peak`. `fsr_ghz` = 0 means a single Lorentzian
/// line without repeats.
#[no_mangle]
pub unsafe extern "C" fn mf_stack_calibrate(
    n: usize,
    total_fwhm_mhz: f64,
    total_peak: f64,
    fsr_ghz: f64,
    center_ghz: f64,
    out: *mut *mut MfFilterStack,
) -> MfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let stack = calibrate_stack(n, mhz(total_fwhm_mhz), total_peak, ghz(fsr_ghz), ghz(center_ghz))?;
        *out = Box::into_raw(Box::new(MfFilterStack(stack)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mf_stack_transmission(
    stack: *const MfFilterStack,
    freq_ghz: f64,
    out: *mut f64,
) -> MfStatus {
    guard(|| {
        let stack = &in_ref(stack, "stack")?.0;
        let out = out_ref(out, "out")?;
        if !freq_ghz.is_finite() {
            return Err(Failure(MfStatus::InvalidArgument, "freq_ghz must be finite".into()));
        }
        *out = stack.transmission(ghz(freq_ghz));
        Ok(())
    })
}

/// FWHM of the whole cascade in MHz, measured on its transmission curve.
#[no_mangle]
pub unsafe extern "C" fn mf_stack_fwhm_mhz(stack: *const MfFilterStack, out: *mut f64) -> MfStatus {
    guard(|| {
        let stack = &in_ref(stack, "stack")?.0;
        *out_ref(out, "out")? = multifield::units::to_mhz(stack.measured_fwhm());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mf_stack_free(stack: *mut MfFilterStack) {
    if !stack.is_null() {
        drop(Box::from_raw(stack));
    }
}

/// Photon-pair source. Times in ns.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MfSourceParams {
    pub mu: f64,
    pub eta_s: f64,
    pub eta_i: f64,
    pub noise_s: f64,
    pub noise_i: f64,
    pub purity: f64,
    pub cascade_lag_ns: f64,
    pub jitter_ns: f64,
    pub emission_window_ns: f64,
    pub record_start_ns: f64,
    pub record_stop_ns: f64,
    pub schmidt_modes: u32,
}

impl From<&SourceModel> for MfSourceParams {
    fn from(m: &SourceModel) -> Self {
        Self {
            mu: m.mu,
            eta_s: m.eta_s,
            eta_i: m.eta_i,
            noise_s: m.noise_s,
            noise_i: m.noise_i,
            purity: m.purity,
            cascade_lag_ns: m.cascade_lag,
            jitter_ns: m.jitter,
            emission_window_ns: m.emission_window,
            record_start_ns: m.record_window.0,
            record_stop_ns: m.record_window.1,
            schmidt_modes: m.schmidt_modes,
        }
    }
}

impl From<&MfSourceParams> for SourceModel {
    fn from(p: &MfSourceParams) -> Self {
        Self {
            mu: p.mu,
            eta_s: p.eta_s,
            eta_i: p.eta_i,
            noise_s: p.noise_s,
            noise_i: p.noise_i,
            purity: p.purity,
            cascade_lag: p.cascade_lag_ns,
            jitter: p.jitter_ns,
            emission_window: p.emission_window_ns,
            record_window: (p.record_start_ns, p.record_stop_ns),
            schmidt_modes: p.schmidt_modes,
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn mf_source_params_default(out: *mut MfSourceParams) -> MfStatus {
    guard(|| {
        *out_ref(out, "out")? = MfSourceParams::from(&SourceModel::default());
        Ok(())
    })
}

pub struct MfEventStream(EventStream);

/// Runs `n_trials` trials. The result depends only on `params`, `n_trials`
/// and `seed`, not on the thread count.
#[no_mangle]
pub unsafe extern "C" fn mf_simulate(
    params: *const MfSourceParams,
    n_trials: u64,
    seed: u64,
    out: *mut *mut MfEventStream,
) -> MfStatus {
    guard(|| {
        let model = SourceModel::from(in_ref(params, "params")?);
        let out = out_ref(out, "out")?;
        let stream = simulate_trials(&model, n_trials, seed)?;
        *out = Box::into_raw(Box::new(MfEventStream(stream)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mf_events_len(events: *const MfEventStream, out: *mut usize) -> MfStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(events, "events")?.0.events.len();
        Ok(())
    })
}

/// Event `i`: trial index, channel (0 = signal, 1 = idler) and time in ns.
#[no_mangle]
pub unsafe extern "C" fn mf_events_get(
    events: *const MfEventStream,
    i: usize,
    trial: *mut u64,
    channel: *mut u8,
    time_ns: *mut f64,
) -> MfStatus {
    guard(|| {
        let stream = &in_ref(events, "events")?.0;
        let ev = stream.events.get(i).ok_or_else(|| {
            Failure(MfStatus::InvalidArgument, format!("event index {i} out of range ({})", stream.events.len()))
        })?;
        *out_ref(trial, "trial")? = ev.trial;
        *out_ref(channel, "channel")? = match ev.channel {
            Channel::S => 0,
            Channel::I => 1,
        };
        *out_ref(time_ns, "time_ns")? = ev.time;
        Ok(())
    })
}

/// Gated signal-idler cross-correlation with its first-order uncertainty.
#[no_mangle]
pub unsafe extern "C" fn mf_events_g2_cross(
    events: *const MfEventStream,
    gate_s_width_ns: f64,
    gate_s_delay_ns: f64,
    gate_i_width_ns: f64,
    gate_i_delay_ns: f64,
    value: *mut f64,
    sigma: *mut f64,
) -> MfStatus {
    guard(|| {
        let stream = &in_ref(events, "events")?.0;
        let value = out_ref(value, "value")?;
        let sigma = out_ref(sigma, "sigma")?;
        let gs = GateConfig::new(gate_s_width_ns, gate_s_delay_ns)?;
        let gi = GateConfig::new(gate_i_width_ns, gate_i_delay_ns)?;
        let g = g2_cross(&summarize(stream, &gs, &gi))?;
        *value = g.value;
        *sigma = g.sigma;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mf_events_free(events: *mut MfEventStream) {
    if !events.is_null() {
        drop(Box::from_raw(events));
    }
}
