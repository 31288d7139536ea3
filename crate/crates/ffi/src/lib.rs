//! C ABI over `qcount-core`.
//!
//! Objects cross the boundary as opaque handles (`QcDensity`, `QcChannel`,
//! `QcMachine`) created by `*_new`/`*_from_json` functions and released by
//! the matching `*_free`. Every fallible call returns a [`QcStatus`]; on
//! failure `qc_last_error()` describes the problem for the calling thread.
//! Strings returned to the caller are owned by it and go back through
//! `qc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qcount::channels::{Channel, ChannelJson};
use qcount::counting::{self, SearchBudget};
use qcount::enumeration::{enumerate_outputs, NetConfig, StateNet};
use qcount::machine::{self, QuantumMachine};
use qcount::qis::{self, BitString, DensityOperator, MatrixJson, PureState, Space, VectorJson};
use qcount::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    /// A string argument was not UTF-8 or not valid JSON for its type.
    InvalidInput = 2,
    /// A matrix failed validation (shape, Hermiticity, positivity, trace).
    InvalidState = 3,
    /// A Kraus family or channel operation was rejected.
    InvalidChannel = 4,
    /// A tolerance or size parameter outside its domain.
    OutOfRange = 5,
    /// Operands live on incompatible spaces.
    Mismatch = 6,
    /// The computation ran but could not produce a result, e.g. an index
    /// past the end of a catalog.
    NotFound = 7,
    Panic = 8,
}

pub struct QcDensity(DensityOperator);
pub struct QcChannel(Channel);
pub struct QcMachine(QuantumMachine);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> QcStatus {
    use Error::*;
    match err {
        StringTooLong { .. } | InvalidBitString(_) | UnknownFamily(_) | Json(_) | Io(_) => QcStatus::InvalidInput,
        Shape { .. } | NotHermitian { .. } | NotPsd { .. } | TraceNotOne { .. } | NotNormalized { .. }
        | DegenerateOperator { .. } | InvalidEnsemble(_) | ZeroDimension => QcStatus::InvalidState,
        EmptyKraus | KrausShape | NotTracePreserving { .. } | NotOrthonormal { .. } => QcStatus::InvalidChannel,
        DimensionMismatch { .. } | SpaceMismatch { .. } | NotStringSpace => QcStatus::Mismatch,
        IndexBeyondOutputs { .. } | AdaptiveNoSettle { .. } | CoverageFailed { .. } => QcStatus::NotFound,
        IndexOutOfRange { .. } | BasisTooLarge { .. } | DeltaOutOfRange { .. } | MachineTooLarge { .. }
        | InputTooLong { .. } | DeltaBelowNetEpsilon { .. } | InvalidParameter(_) => QcStatus::OutOfRange,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (QcStatus, String)>) -> QcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QcStatus::Panic
        }
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T, (QcStatus, String)>;
}

impl<T> Lift<T> for qcount::Result<T> {
    fn lift(self) -> Result<T, (QcStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

impl<T> Lift<T> for serde_json::Result<T> {
    fn lift(self) -> Result<T, (QcStatus, String)> {
        self.map_err(|e| (QcStatus::InvalidInput, format!("json: {e}")))
    }
}

fn null(what: &str) -> (QcStatus, String) {
    (QcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QcStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (QcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (QcStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), (QcStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), (QcStatus, String)> {
    put(out, Box::into_raw(Box::new(value)), "out")
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (QcStatus, String)> {
    let c = CString::new(s).map_err(|_| (QcStatus::InvalidInput, "interior NUL".to_string()))?;
    put(out, c.into_raw(), "out")
}

fn parse_bits(s: &str) -> Result<BitString, (QcStatus, String)> {
    s.parse::<BitString>().lift()
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn qc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qc_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// # Safety
/// `s` must be null or a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn qc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- density operators ----

/// Parses `{"n": …, "re": [[…]], "im": [[…]]}`. With `n` present the
/// operator lives on the qubit strings of length ≤ n.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_density_from_json(json: *const c_char, out: *mut *mut QcDensity) -> QcStatus {
    guard(|| {
        let parsed: MatrixJson = serde_json::from_str(text(json, "json")?).lift()?;
        put_handle(out, QcDensity(DensityOperator::from_json(&parsed).lift()?))
    })
}

/// `|s⟩⟨s|` for a binary string `s` (empty string allowed) on strings of
/// length ≤ n.
///
/// # Safety
/// `bits` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_density_basis(n: usize, bits: *const c_char, out: *mut *mut QcDensity) -> QcStatus {
    guard(|| {
        let s = parse_bits(text(bits, "bits")?)?;
        let basis = qis::StringBasis::new(n).lift()?;
        put_handle(out, QcDensity(DensityOperator::basis_state(basis, &s).lift()?))
    })
}

/// `I/d` on the qubit strings of length ≤ n.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_density_maximally_mixed(n: usize, out: *mut *mut QcDensity) -> QcStatus {
    guard(|| put_handle(out, QcDensity(DensityOperator::maximally_mixed(Space::strings(n).lift()?))))
}

/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_density_dim(rho: *const QcDensity, out: *mut usize) -> QcStatus {
    guard(|| put(out, borrow(rho, "rho")?.0.dim(), "out"))
}

/// # Safety
/// `rho` must be a live handle; `out` receives a string for `qc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qc_density_to_json(rho: *const QcDensity, out: *mut *mut c_char) -> QcStatus {
    guard(|| {
        let json = serde_json::to_string(&borrow(rho, "rho")?.0.to_json()).lift()?;
        put_string(out, json)
    })
}

/// # Safety
/// `rho` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_density_free(rho: *mut QcDensity) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

// ---- measures and bounds ----

/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_trace_distance(a: *const QcDensity, b: *const QcDensity, out: *mut f64) -> QcStatus {
    guard(|| put(out, qis::trace_distance(&borrow(a, "a")?.0, &borrow(b, "b")?.0).lift()?, "out"))
}

/// Entropy in bits.
///
/// # Safety
/// `rho` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_von_neumann_entropy(rho: *const QcDensity, out: *mut f64) -> QcStatus {
    guard(|| put(out, qis::von_neumann_entropy(&borrow(rho, "rho")?.0), "out"))
}

/// `S(a‖b)` in bits; `+∞` when the support of `a` leaves that of `b`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_relative_entropy(a: *const QcDensity, b: *const QcDensity, out: *mut f64) -> QcStatus {
    guard(|| put(out, qis::relative_entropy(&borrow(a, "a")?.0, &borrow(b, "b")?.0).lift()?, "out"))
}

/// Largest count of orthonormal states a `d`-dimensional input can be
/// mapped within trace distance `delta` of, in bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_counting_bound(d: usize, delta: f64, out: *mut f64) -> QcStatus {
    guard(|| put(out, counting::counting_bound(d, delta).lift()?, "out"))
}

/// `2T log₂ d + η(2T)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_fannes_bound(t: f64, d: usize, out: *mut f64) -> QcStatus {
    guard(|| put(out, counting::fannes_bound(t, d), "out"))
}

// ---- channels ----

/// Parses `{"in_dim", "out_dim", "kraus": [{"re", "im"}, …]}` and checks
/// trace preservation.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_from_json(json: *const c_char, out: *mut *mut QcChannel) -> QcStatus {
    guard(|| {
        let parsed: ChannelJson = serde_json::from_str(text(json, "json")?).lift()?;
        put_handle(out, QcChannel(Channel::from_json(&parsed).lift()?))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_depolarizing_qubit(p: f64, out: *mut *mut QcChannel) -> QcStatus {
    guard(|| put_handle(out, QcChannel(Channel::depolarizing_qubit(p).lift()?)))
}

/// # Safety
/// `ch` must be live; `out` receives a string for `qc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_to_json(ch: *const QcChannel, out: *mut *mut c_char) -> QcStatus {
    guard(|| {
        let json = serde_json::to_string(&borrow(ch, "channel")?.0.to_json()).lift()?;
        put_string(out, json)
    })
}

/// # Safety
/// `ch` and `rho` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_apply(
    ch: *const QcChannel,
    rho: *const QcDensity,
    out: *mut *mut QcDensity,
) -> QcStatus {
    guard(|| {
        let image = borrow(ch, "channel")?.0.apply(&borrow(rho, "rho")?.0).lift()?;
        put_handle(out, QcDensity(image))
    })
}

/// Minimum Choi eigenvalue and `‖Σ K†K − I‖`.
///
/// # Safety
/// `ch` must be live; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_cptp(
    ch: *const QcChannel,
    min_choi_eigenvalue: *mut f64,
    completeness_residual: *mut f64,
) -> QcStatus {
    guard(|| {
        let report = borrow(ch, "channel")?.0.cptp_report();
        put(min_choi_eigenvalue, report.min_choi_eigenvalue, "min_choi_eigenvalue")?;
        put(completeness_residual, report.completeness_residual, "completeness_residual")
    })
}

/// Searches for inputs mapped near each target and reports the count
/// against the counting bound. `targets_json` is an array of
/// `{"re": […], "im": […]}` vectors; the result is a JSON report.
///
/// # Safety
/// `ch` must be live; `targets_json` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_verify_counting(
    ch: *const QcChannel,
    targets_json: *const c_char,
    delta: f64,
    seed: u64,
    out: *mut *mut c_char,
) -> QcStatus {
    guard(|| {
        let e = &borrow(ch, "channel")?.0;
        let raw: Vec<VectorJson> = serde_json::from_str(text(targets_json, "targets_json")?).lift()?;
        let targets = raw.iter().map(PureState::from_json).collect::<qcount::Result<Vec<_>>>().lift()?;
        let budget = SearchBudget { seed, ..SearchBudget::default() };
        let report = counting::verify_counting_instance(e, &targets, delta, &budget).lift()?;
        put_string(out, serde_json::to_string(&report).lift()?)
    })
}

/// # Safety
/// `ch` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_channel_free(ch: *mut QcChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

// ---- machines ----

/// Builds a machine of the named family (`identity`, `basis-permutation`,
/// `seeded-random-unitary`, `dephasing-compose`) on inputs of length ≤ n.
///
/// # Safety
/// `family` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_machine_new(
    family: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut QcMachine,
) -> QcStatus {
    guard(|| {
        let family = text(family, "family")?.parse::<machine::Family>().lift()?;
        put_handle(out, QcMachine(machine::make_machine(family, n, seed).lift()?))
    })
}

/// # Safety
/// `m` and `rho` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_machine_run(m: *const QcMachine, rho: *const QcDensity, out: *mut *mut QcDensity) -> QcStatus {
    guard(|| {
        let image = borrow(m, "machine")?.0.run(&borrow(rho, "rho")?.0).lift()?;
        put_handle(out, QcDensity(image))
    })
}

/// Catalog of strings the machine produces within `delta`, as JSON. A
/// non-positive `net_epsilon` selects the default net for the machine's n.
///
/// # Safety
/// `m` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qc_machine_enumerate(
    m: *const QcMachine,
    delta: f64,
    net_epsilon: f64,
    out: *mut *mut c_char,
) -> QcStatus {
    guard(|| {
        let m = &borrow(m, "machine")?.0;
        let config = if net_epsilon > 0.0 { NetConfig::new(m.n(), net_epsilon) } else { NetConfig::default_for(m.n()) };
        let net = StateNet::build(config).lift()?;
        let catalog = enumerate_outputs(m, delta, &net).lift()?;
        put_string(out, serde_json::to_string(&catalog).lift()?)
    })
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_machine_free(m: *mut QcMachine) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

// ---- classical reference machine ----

/// Output of a program on the classical reference machine. `halted` is 0
/// and `out` untouched when the program never halts within the step limit.
///
/// # Safety
/// `program` must be NUL-terminated; `halted` and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_classical_run(program: *const c_char, halted: *mut i32, out: *mut *mut c_char) -> QcStatus {
    guard(|| {
        let p = parse_bits(text(program, "program")?)?;
        match machine::run_classical(&p) {
            Some(x) => {
                put_string(out, x.to_bits_string())?;
                put(halted, 1, "halted")
            }
            None => put(halted, 0, "halted"),
        }
    })
}

/// Length of the shortest program of length ≤ `lmax` printing `x`, or −1.
///
/// # Safety
/// `x` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qc_classical_complexity(x: *const c_char, lmax: usize, out: *mut i64) -> QcStatus {
    guard(|| {
        let x = parse_bits(text(x, "x")?)?;
        let c = machine::classical_complexity(&x, lmax).lift()?;
        put(out, c.map_or(-1, |c| c as i64), "out")
    })
}
