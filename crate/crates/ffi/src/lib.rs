//! C ABI for `seqwit`.
//!
//! Every function returns an [`SqwStatus`] and writes results through out
//! pointers. Scenarios and probability tables are opaque handles owned by the
//! caller and released with the matching `*_free`. After a non-`Ok` status,
//! [`sqw_last_error_message`] returns a description of the failure on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use seqwit::explore::{find_violation_window, optimize_settings, OptimizeConfig, Target};
use seqwit::randomness;
use seqwit::scenario::Outcome;
use seqwit::witness::{self, ClosedForm, Pair, WitnessKind};
use seqwit::{build_table, Error, ProbTable, Scenario, ScenarioKind, WeakCoupling};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidState = 2,
    Config = 3,
    Domain = 4,
    SuperQuantum = 5,
    Parse = 6,
    Io = 7,
    OutOfRange = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqwScenarioKind {
    W1 = 0,
    W2 = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqwWitnessKind {
    W1 = 0,
    W2 = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqwPair {
    Ab = 0,
    Ac = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqwClosedForm {
    W1Ab = 0,
    W1Ac = 1,
    W2Ab = 2,
    W2Ac = 3,
    W1AbZ = 4,
    W2AbZ = 5,
}

/// Opaque scenario handle.
pub struct SqwScenario(Scenario);

/// Opaque probability table handle.
pub struct SqwTable(ProbTable);

impl From<SqwWitnessKind> for WitnessKind {
    fn from(k: SqwWitnessKind) -> Self {
        match k {
            SqwWitnessKind::W1 => WitnessKind::W1,
            SqwWitnessKind::W2 => WitnessKind::W2,
        }
    }
}

impl From<SqwPair> for Pair {
    fn from(p: SqwPair) -> Self {
        match p {
            SqwPair::Ab => Pair::AB,
            SqwPair::Ac => Pair::AC,
        }
    }
}

impl From<SqwClosedForm> for ClosedForm {
    fn from(c: SqwClosedForm) -> Self {
        match c {
            SqwClosedForm::W1Ab => ClosedForm::W1AB,
            SqwClosedForm::W1Ac => ClosedForm::W1AC,
            SqwClosedForm::W2Ab => ClosedForm::W2AB,
            SqwClosedForm::W2Ac => ClosedForm::W2AC,
            SqwClosedForm::W1AbZ => ClosedForm::W1ABz,
            SqwClosedForm::W2AbZ => ClosedForm::W2ABz,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(SqwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidState(_) => SqwStatus::InvalidState,
            Error::Config(_) => SqwStatus::Config,
            Error::Domain(_) => SqwStatus::Domain,
            Error::SuperQuantum { .. } => SqwStatus::SuperQuantum,
            Error::Parse(_) => SqwStatus::Parse,
            Error::Io(_) => SqwStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SqwStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SqwStatus {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".to_string());
        Err(Failure(SqwStatus::Panic, msg))
    });
    match result {
        Ok(()) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            SqwStatus::Ok
        }
        Err(Failure(status, msg)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = msg);
            status
        }
    }
}

fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null checked above; the caller guarantees it is writable.
    unsafe { out.write(v) };
    Ok(())
}

fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

fn check_index(what: &str, v: usize, n: usize) -> Result<(), Failure> {
    if v < n {
        Ok(())
    } else {
        Err(Failure(SqwStatus::OutOfRange, format!("{what} = {v} is outside 0..{n}")))
    }
}

fn coupling(eps: f64) -> Result<WeakCoupling, Failure> {
    Ok(WeakCoupling::new(eps)?)
}

/// Copies the current thread's last error message into `buf` as a
/// NUL-terminated string, truncating if needed. Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sqw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates one of the two canonical scenarios.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_scenario_canonical(kind: SqwScenarioKind, out: *mut *mut SqwScenario) -> SqwStatus {
    guard(|| {
        let s = match kind {
            SqwScenarioKind::W1 => ScenarioKind::W1.canonical(),
            SqwScenarioKind::W2 => ScenarioKind::W2.canonical(),
        };
        if out.is_null() {
            return Err(null("out"));
        }
        write(out, Box::into_raw(Box::new(SqwScenario(s))), "out")
    })
}

/// Parses a scenario from a NUL-terminated UTF-8 TOML document.
///
/// # Safety
/// `toml` must be null or a valid C string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_scenario_from_toml(toml: *const c_char, out: *mut *mut SqwScenario) -> SqwStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|e| Failure(SqwStatus::Parse, format!("scenario is not UTF-8: {e}")))?;
        let s = Scenario::from_toml_str(text)?;
        write(out, Box::into_raw(Box::new(SqwScenario(s))), "out")
    })
}

/// Serializes a scenario to TOML as a NUL-terminated string. The text length
/// (without terminator) is always stored in `out_len`; if `buf` cannot hold
/// it plus the terminator, nothing is copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `s` must be null or a live handle; `buf` must be null or point to `len`
/// writable bytes; `out_len` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_scenario_to_toml(
    s: *const SqwScenario,
    buf: *mut c_char,
    len: usize,
    out_len: *mut usize,
) -> SqwStatus {
    guard(|| {
        let text = borrow(s, "scenario")?.0.to_toml_string()?;
        write(out_len, text.len(), "out_len")?;
        if buf.is_null() || len <= text.len() {
            return Err(Failure(SqwStatus::BufferTooSmall, format!("need {} bytes, buffer has {len}", text.len() + 1)));
        }
        ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sqw_scenario_free(s: *mut SqwScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Simulates all 64 outcome probabilities at coupling `eps`.
///
/// # Safety
/// `s` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_table_build(s: *const SqwScenario, eps: f64, out: *mut *mut SqwTable) -> SqwStatus {
    guard(|| {
        let s = borrow(s, "scenario")?;
        let eps = coupling(eps)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write(out, Box::into_raw(Box::new(SqwTable(build_table(&s.0, eps)))), "out")
    })
}

/// Reads `p(b,c|x,y,z)`. `x` is in 0..3, `y`, `z` in 0..1; outcome index 0
/// is +1 and 1 is -1.
///
/// # Safety
/// `t` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_table_get(
    t: *const SqwTable,
    x: usize,
    y: usize,
    z: usize,
    b: usize,
    c: usize,
    out: *mut f64,
) -> SqwStatus {
    guard(|| {
        let t = borrow(t, "table")?;
        check_index("x", x, 4)?;
        check_index("y", y, 2)?;
        check_index("z", z, 2)?;
        check_index("b", b, 2)?;
        check_index("c", c, 2)?;
        let outcome = |i| if i == 0 { Outcome::Plus } else { Outcome::Minus };
        write(out, t.0.get(x, y, z, outcome(b), outcome(c)), "out")
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sqw_table_free(t: *mut SqwTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Witness value of a table for one observer pair.
///
/// # Safety
/// `t` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_witness(
    t: *const SqwTable,
    kind: SqwWitnessKind,
    pair: SqwPair,
    out: *mut f64,
) -> SqwStatus {
    guard(|| {
        let t = borrow(t, "table")?;
        write(out, witness::evaluate(&t.0, kind.into(), pair.into()).value, "out")
    })
}

/// Alice–Bob witness value conditioned on Charlie's setting `z`.
///
/// # Safety
/// `t` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_witness_given_z(
    t: *const SqwTable,
    kind: SqwWitnessKind,
    z: usize,
    out: *mut f64,
) -> SqwStatus {
    guard(|| {
        let t = borrow(t, "table")?;
        check_index("z", z, 2)?;
        let v = match WitnessKind::from(kind) {
            WitnessKind::W1 => witness::w1_given_z(&t.0, z),
            WitnessKind::W2 => witness::w2_given_z(&t.0, z),
        };
        write(out, v.value, "out")
    })
}

/// Analytic witness curve of the canonical scenarios at `eps`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_closed_form(form: SqwClosedForm, eps: f64, out: *mut f64) -> SqwStatus {
    guard(|| write(out, witness::closed_form(form.into(), eps)?, "out"))
}

/// Certified min-entropy from a `W1` value.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_h_from_w1(w: f64, out: *mut f64) -> SqwStatus {
    guard(|| write(out, randomness::h_from_w1(w)?, "out"))
}

/// Certified min-entropy from a `W2` value.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_h_from_w2(w: f64, out: *mut f64) -> SqwStatus {
    guard(|| write(out, randomness::h_from_w2(w)?, "out"))
}

/// Bob's certified randomness for the canonical scenario of `kind`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_bob_certified(eps: f64, kind: SqwWitnessKind, out: *mut f64) -> SqwStatus {
    guard(|| write(out, randomness::bob_certified(eps, kind.into())?, "out"))
}

/// Charlie's certified randomness for the canonical `W1` scenario.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_charlie_certified(eps: f64, out: *mut f64) -> SqwStatus {
    guard(|| write(out, randomness::charlie_certified(eps)?, "out"))
}

/// Exact global min-entropy of the joint outcome `(b, c)`.
///
/// # Safety
/// `t` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_hmin_global_exact(t: *const SqwTable, out: *mut f64) -> SqwStatus {
    guard(|| write(out, randomness::hmin_global_exact(&borrow(t, "table")?.0), "out"))
}

/// Exact min-entropy of Bob's outcome alone.
///
/// # Safety
/// `t` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_hmin_local_bob_exact(t: *const SqwTable, out: *mut f64) -> SqwStatus {
    guard(|| write(out, randomness::hmin_local_bob_exact(&borrow(t, "table")?.0), "out"))
}

/// Factorized lower estimate of the global min-entropy.
///
/// # Safety
/// `t` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_hmin_global_bound(t: *const SqwTable, out: *mut f64) -> SqwStatus {
    guard(|| write(out, randomness::hmin_global_bound(&borrow(t, "table")?.0), "out"))
}

/// Coupling interval where both observer pairs violate the classical bound
/// of `kind`, located to width `tol`.
///
/// # Safety
/// `lo` and `hi` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_find_window(kind: SqwWitnessKind, tol: f64, lo: *mut f64, hi: *mut f64) -> SqwStatus {
    guard(|| {
        if lo.is_null() {
            return Err(null("lo"));
        }
        if hi.is_null() {
            return Err(null("hi"));
        }
        let w = find_violation_window(kind.into(), tol)?;
        write(lo, w.lo, "lo")?;
        write(hi, w.hi, "hi")
    })
}

/// Multi-start maximization of a witness over all settings at fixed `eps`.
/// The best value goes to `out_value`; when `out_scenario` is non-null it
/// receives a new handle with the maximizing settings.
///
/// # Safety
/// `out_value` must be null or writable; `out_scenario` null or writable.
#[no_mangle]
pub unsafe extern "C" fn sqw_optimize(
    kind: SqwWitnessKind,
    pair: SqwPair,
    eps: f64,
    seed: u64,
    restarts: usize,
    allow_mixed: bool,
    out_value: *mut f64,
    out_scenario: *mut *mut SqwScenario,
) -> SqwStatus {
    guard(|| {
        if out_value.is_null() {
            return Err(null("out_value"));
        }
        let target = Target { kind: kind.into(), pair: pair.into() };
        let mut cfg = OptimizeConfig::new(target, coupling(eps)?);
        cfg.seed = seed;
        cfg.restarts = restarts;
        cfg.allow_mixed = allow_mixed;
        let result = optimize_settings(&cfg)?;
        write(out_value, result.value, "out_value")?;
        if !out_scenario.is_null() {
            out_scenario.write(Box::into_raw(Box::new(SqwScenario(result.scenario))));
        }
        Ok(())
    })
}
