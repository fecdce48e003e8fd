//! C ABI for `rtn-entangle`.
//!
//! Every fallible function returns an [`RtnStatus`] and writes results through
//! out-pointers. On failure a description is kept per thread and can be read
//! with [`rtn_last_error_message`]. Panics never cross the boundary; they are
//! reported as [`RtnStatus::Panic`].
//!
//! Models and event reports are opaque handles owned by the caller and
//! released with their `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rtn_entangle::analysis::{events_for, ThresholdSearch, ZERO_TOL};
use rtn_entangle::{
    coherence_q, esd_time_analytic, find_g_threshold, initial_concurrence, k_function, EventReport,
    EwlFamily, EwlState, McConfig, RtnParams,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtnStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    DegenerateBranch = 3,
    Grid = 4,
    NonPhysical = 5,
    Resolution = 6,
    Bracket = 7,
    IndexOutOfRange = 8,
    Panic = 99,
}

/// Noise parameters of one qubit.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RtnQubit {
    pub omega: f64,
    pub v: f64,
    pub gamma: f64,
    pub delta_p0: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtnFamily {
    OneExcitation = 0,
    TwoExcitation = 1,
}

/// Werner-like initial state; `family` must hold one of the `RtnFamily` values.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RtnState {
    pub family: RtnFamily,
    pub r: f64,
    pub a_mod: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RtnComplex {
    pub re: f64,
    pub im: f64,
}

/// Initial state plus the two qubits' environments.
pub struct RtnModel {
    state: EwlState,
    qubit_a: RtnParams,
    qubit_b: RtnParams,
}

pub struct RtnEvents(EventReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &rtn_entangle::Error) -> RtnStatus {
    use rtn_entangle::Error as E;
    match err {
        E::Domain { .. } => RtnStatus::Domain,
        E::DegenerateBranch => RtnStatus::DegenerateBranch,
        E::Grid(_) => RtnStatus::Grid,
        E::NonPhysical(_) => RtnStatus::NonPhysical,
        E::Resolution { .. } => RtnStatus::Resolution,
        E::Bracket { .. } => RtnStatus::Bracket,
    }
}

struct Failure(RtnStatus, String);

impl From<rtn_entangle::Error> for Failure {
    fn from(e: rtn_entangle::Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(RtnStatus::NullPointer, format!("{name} is null"))
}

/// Runs `f`, records any error or panic and converts it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RtnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RtnStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            RtnStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, n: usize, name: &str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn slice_mut<'a, T>(p: *mut T, n: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if n == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

fn params(q: &RtnQubit) -> Result<RtnParams, Failure> {
    Ok(RtnParams::new(q.omega, q.v, q.gamma, q.delta_p0)?)
}

fn state(s: &RtnState) -> Result<EwlState, Failure> {
    let family = match s.family {
        RtnFamily::OneExcitation => EwlFamily::OneExcitation,
        RtnFamily::TwoExcitation => EwlFamily::TwoExcitation,
    };
    Ok(EwlState::new(family, s.r, s.a_mod)?)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length including the NUL, or
/// 0 if there is no message.
#[no_mangle]
pub unsafe extern "C" fn rtn_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Single-qubit coherence `q(t)`.
#[no_mangle]
pub unsafe extern "C" fn rtn_coherence(
    qubit: *const RtnQubit,
    t: f64,
    out: *mut RtnComplex,
) -> RtnStatus {
    guard(|| {
        let p = params(deref(qubit, "qubit")?)?;
        let q = coherence_q(t, &p)?;
        write(out, "out", RtnComplex { re: q.re, im: q.im })
    })
}

/// Concurrence of the initial Werner-like state.
#[no_mangle]
pub unsafe extern "C" fn rtn_initial_concurrence(r: f64, a_mod: f64, out: *mut f64) -> RtnStatus {
    guard(|| write(out, "out", initial_concurrence(r, a_mod)?))
}

/// Weak-coupling estimate of the sudden-death time (identical qubits, `δp0 = 0`).
#[no_mangle]
pub unsafe extern "C" fn rtn_esd_time_analytic(
    g: f64,
    r: f64,
    a_mod: f64,
    gamma: f64,
    out: *mut f64,
) -> RtnStatus {
    guard(|| write(out, "out", esd_time_analytic(g, r, a_mod, gamma)?))
}

/// Revival threshold `g_th` searched on `[g_lo, g_hi]` to `tol`, with the
/// library's default horizon and step.
#[no_mangle]
pub unsafe extern "C" fn rtn_find_g_threshold(
    r: f64,
    a_mod: f64,
    delta_p0: f64,
    g_lo: f64,
    g_hi: f64,
    tol: f64,
    out: *mut f64,
) -> RtnStatus {
    guard(|| {
        let search = ThresholdSearch {
            bracket: (g_lo, g_hi),
            tol,
            ..ThresholdSearch::default()
        };
        write(
            out,
            "out",
            find_g_threshold(r, a_mod, delta_p0, &search)?.g_th,
        )
    })
}

/// Monte Carlo average of `e^{iφ(t)}` over `n_trajectories` noise histories.
/// `mean_out` and `std_err_out` must hold `n_times` entries; `std_err_out`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn rtn_ensemble_coherence(
    qubit: *const RtnQubit,
    n_trajectories: usize,
    seed: u64,
    times: *const f64,
    n_times: usize,
    mean_out: *mut RtnComplex,
    std_err_out: *mut f64,
) -> RtnStatus {
    guard(|| {
        let p = params(deref(qubit, "qubit")?)?;
        let grid = slice(times, n_times, "times")?.to_vec();
        let cfg = McConfig::new(n_trajectories, seed, grid)?;
        let est = rtn_entangle::ensemble_coherence(&p, &cfg)?;
        let mean = slice_mut(mean_out, n_times, "mean_out")?;
        for (m, z) in mean.iter_mut().zip(&est.mean) {
            *m = RtnComplex { re: z.re, im: z.im };
        }
        if !std_err_out.is_null() {
            slice_mut(std_err_out, n_times, "std_err_out")?.copy_from_slice(&est.std_err);
        }
        Ok(())
    })
}

/// Creates a model; `qubit_b` may be null for identical qubits.
#[no_mangle]
pub unsafe extern "C" fn rtn_model_new(
    initial: *const RtnState,
    qubit_a: *const RtnQubit,
    qubit_b: *const RtnQubit,
    out: *mut *mut RtnModel,
) -> RtnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let state = state(deref(initial, "initial")?)?;
        let qubit_a = params(deref(qubit_a, "qubit_a")?)?;
        let qubit_b = match qubit_b.as_ref() {
            Some(q) => params(q)?,
            None => qubit_a,
        };
        *out = Box::into_raw(Box::new(RtnModel {
            state,
            qubit_a,
            qubit_b,
        }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rtn_model_free(model: *mut RtnModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Concurrence at time `t`.
#[no_mangle]
pub unsafe extern "C" fn rtn_model_concurrence(
    model: *const RtnModel,
    t: f64,
    out: *mut f64,
) -> RtnStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let k = k_function(t, &m.state, &m.qubit_a, &m.qubit_b)?;
        write(out, "out", 2.0 * k.max(0.0))
    })
}

/// Concurrence on `n` increasing, non-negative times.
#[no_mangle]
pub unsafe extern "C" fn rtn_model_series(
    model: *const RtnModel,
    times: *const f64,
    n: usize,
    out: *mut f64,
) -> RtnStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let times = slice(times, n, "times")?;
        let s = rtn_entangle::concurrence_series(&m.state, &m.qubit_a, &m.qubit_b, times)?;
        slice_mut(out, n, "out")?.copy_from_slice(&s.values);
        Ok(())
    })
}

/// Sudden death, dark intervals, revivals and final death up to `horizon`
/// (a non-positive horizon selects the default).
#[no_mangle]
pub unsafe extern "C" fn rtn_model_events(
    model: *const RtnModel,
    horizon: f64,
    out: *mut *mut RtnEvents,
) -> RtnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = deref(model, "model")?;
        let horizon = (horizon > 0.0).then_some(horizon);
        let report = events_for(&m.state, &m.qubit_a, &m.qubit_b, horizon, ZERO_TOL)?;
        *out = Box::into_raw(Box::new(RtnEvents(report)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rtn_events_free(events: *mut RtnEvents) {
    if !events.is_null() {
        drop(Box::from_raw(events));
    }
}

unsafe fn optional_time(
    events: *const RtnEvents,
    pick: fn(&EventReport) -> Option<f64>,
    found: *mut bool,
    out: *mut f64,
) -> RtnStatus {
    guard(|| {
        let e = deref(events, "events")?;
        let value = pick(&e.0);
        write(found, "found", value.is_some())?;
        write(out, "out", value.unwrap_or(f64::NAN))
    })
}

/// First time with zero concurrence; `*found` is false if there is none.
#[no_mangle]
pub unsafe extern "C" fn rtn_events_esd_time(
    events: *const RtnEvents,
    found: *mut bool,
    out: *mut f64,
) -> RtnStatus {
    optional_time(events, |r| r.esd_time, found, out)
}

/// Start of the dark interval reaching the horizon; `*found` is false if the
/// state is entangled at the horizon.
#[no_mangle]
pub unsafe extern "C" fn rtn_events_final_death_time(
    events: *const RtnEvents,
    found: *mut bool,
    out: *mut f64,
) -> RtnStatus {
    optional_time(events, |r| r.final_death_time, found, out)
}

/// Number of revivals; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn rtn_events_revival_count(events: *const RtnEvents) -> usize {
    events.as_ref().map_or(0, |e| e.0.revivals.len())
}

#[no_mangle]
pub unsafe extern "C" fn rtn_events_revival(
    events: *const RtnEvents,
    index: usize,
    t_peak: *mut f64,
    amplitude: *mut f64,
) -> RtnStatus {
    guard(|| {
        let e = deref(events, "events")?;
        let r = e.0.revivals.get(index).ok_or_else(|| {
            Failure(
                RtnStatus::IndexOutOfRange,
                format!("revival {index} of {}", e.0.revivals.len()),
            )
        })?;
        write(t_peak, "t_peak", r.t_peak)?;
        write(amplitude, "amplitude", r.amplitude)
    })
}

/// Number of dark intervals; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn rtn_events_dark_interval_count(events: *const RtnEvents) -> usize {
    events.as_ref().map_or(0, |e| e.0.dark_intervals.len())
}

#[no_mangle]
pub unsafe extern "C" fn rtn_events_dark_interval(
    events: *const RtnEvents,
    index: usize,
    start: *mut f64,
    end: *mut f64,
) -> RtnStatus {
    guard(|| {
        let e = deref(events, "events")?;
        let &(a, b) = e.0.dark_intervals.get(index).ok_or_else(|| {
            Failure(
                RtnStatus::IndexOutOfRange,
                format!("dark interval {index} of {}", e.0.dark_intervals.len()),
            )
        })?;
        write(start, "start", a)?;
        write(end, "end", b)
    })
}
