//! C interface to `dmab`.
//!
//! Every fallible function returns a [`DmabStatus`]. On failure the message
//! is kept in thread-local storage and can be read with [`dmab_last_error`].
//! Objects are opaque handles released with their `_free` function; strings
//! returned by the library are released with [`dmab_string_free`].

use dmab::arms::MarkovArm;
use dmab::bounds;
use dmab::harness::{bounds_only, run_batch, write_bound_csv, write_csv, SimConfig};
use dmab::matching::{brute_force_matching, run_auction, ValueMatrix};
use dmab::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Config = 4,
    UndefinedBound = 5,
    Io = 6,
    Runtime = 7,
    Panic = 8,
}

/// Exact statistics of a Markov chain.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DmabChainStats {
    pub mean: f64,
    /// Second-largest eigenvalue of `P^2`.
    pub lambda2: f64,
    /// `1 - lambda2`.
    pub rho: f64,
    pub pi_min: f64,
    pub states: usize,
}

/// Opaque Markov chain handle.
pub struct DmabChain(MarkovArm);

/// Opaque parsed simulation config.
pub struct DmabConfig(SimConfig);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NUL bytes were removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DmabStatus {
    match e {
        Error::Config { .. } => DmabStatus::Config,
        Error::UndefinedBound(_) => DmabStatus::UndefinedBound,
        Error::Io { .. } => DmabStatus::Io,
        Error::Seed { source, .. } => status_of(source),
        e if e.is_validation() => DmabStatus::InvalidArgument,
        _ => DmabStatus::Runtime,
    }
}

struct Failure(DmabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DmabStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DmabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DmabStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            DmabStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(DmabStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(DmabStatus::Runtime, e.to_string()))
}

unsafe fn matrix(values: *const f64, players: usize, arms: usize) -> Result<ValueMatrix, Failure> {
    let flat = slice(values, players.checked_mul(arms).ok_or_else(|| Failure(DmabStatus::InvalidArgument, "matrix too large".into()))?, "values")?;
    Ok(ValueMatrix::from_flat(players, arms, flat.to_vec())?)
}

/// Message of the last failed call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dmab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dmab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Two-state on/off chain with rewards 0 and 1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dmab_chain_new_two_state(p01: f64, p10: f64, out: *mut *mut DmabChain) -> DmabStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let arm = MarkovArm::two_state(p01, p10)?;
        *out = Box::into_raw(Box::new(DmabChain(arm)));
        Ok(())
    })
}

/// Chain with `states` rewards in `(0, 1]` and a row-major transition matrix.
///
/// # Safety
/// `rewards` must hold `states` values, `transition` `states * states`.
#[no_mangle]
pub unsafe extern "C" fn dmab_chain_new(
    rewards: *const f64,
    transition: *const f64,
    states: usize,
    out: *mut *mut DmabChain,
) -> DmabStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let r = slice(rewards, states, "rewards")?.to_vec();
        let p = slice(transition, states * states, "transition")?;
        let rows = p.chunks(states.max(1)).map(<[f64]>::to_vec).collect();
        let arm = MarkovArm::new(r, rows, None)?;
        *out = Box::into_raw(Box::new(DmabChain(arm)));
        Ok(())
    })
}

/// # Safety
/// `chain` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dmab_chain_stats(chain: *const DmabChain, out: *mut DmabChainStats) -> DmabStatus {
    guard(|| {
        let chain = chain.as_ref().ok_or_else(|| null("chain"))?;
        let out = out_ref(out, "out")?;
        let s = chain.0.chain_stats()?;
        *out = DmabChainStats { mean: s.mean, lambda2: s.lambda2, rho: s.rho, pi_min: s.pi_min, states: s.cardinality };
        Ok(())
    })
}

/// Copies the stationary distribution into `out`, which holds `len` values.
///
/// # Safety
/// `chain` must be valid and `out` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn dmab_chain_stationary(chain: *const DmabChain, out: *mut f64, len: usize) -> DmabStatus {
    guard(|| {
        let chain = chain.as_ref().ok_or_else(|| null("chain"))?;
        let pi = chain.0.stationary();
        if len < pi.len() {
            return Err(Failure(DmabStatus::InvalidArgument, format!("buffer holds {len} values, need {}", pi.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(pi.as_ptr(), out, pi.len());
        Ok(())
    })
}

/// # Safety
/// `chain` must come from a `dmab_chain_new*` call and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dmab_chain_free(chain: *mut DmabChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Parses and validates a TOML simulation config.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dmab_config_parse(toml: *const c_char, out: *mut *mut DmabConfig) -> DmabStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let cfg = SimConfig::from_toml(string(toml, "toml")?)?;
        cfg.validate()?;
        *out = Box::into_raw(Box::new(DmabConfig(cfg)));
        Ok(())
    })
}

/// Runs every seed and returns the aggregate CSV in `*out`.
///
/// # Safety
/// `config` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dmab_config_run_csv(config: *const DmabConfig, out: *mut *mut c_char) -> DmabStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let out = out_ref(out, "out")?;
        let result = run_batch(&cfg.0)?;
        let mut buf = Vec::new();
        write_csv(&result.rows, &mut buf).map_err(|e| Failure(DmabStatus::Runtime, e.to_string()))?;
        *out = into_c_string(String::from_utf8(buf).expect("CSV is ASCII"))?;
        Ok(())
    })
}

/// Returns the bound curve of a config as `t,bound` CSV in `*out`.
///
/// # Safety
/// `config` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dmab_config_bounds_csv(config: *const DmabConfig, out: *mut *mut c_char) -> DmabStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let out = out_ref(out, "out")?;
        let curve = bounds_only(&cfg.0)?;
        let mut buf = Vec::new();
        write_bound_csv(&curve, &mut buf).map_err(|e| Failure(DmabStatus::Runtime, e.to_string()))?;
        *out = into_c_string(String::from_utf8(buf).expect("CSV is ASCII"))?;
        Ok(())
    })
}

/// # Safety
/// `config` must come from `dmab_config_parse` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dmab_config_free(config: *mut DmabConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Auction on a row-major `players x arms` value matrix. Writes the arm of
/// each player to `assignment` (length `players`).
///
/// # Safety
/// `values` must hold `players * arms` values; `assignment` must hold
/// `players` writable entries; `surplus` and `rounds` may be null.
#[no_mangle]
pub unsafe extern "C" fn dmab_auction(
    values: *const f64,
    players: usize,
    arms: usize,
    eps: f64,
    assignment: *mut usize,
    surplus: *mut f64,
    rounds: *mut u64,
) -> DmabStatus {
    guard(|| {
        let v = matrix(values, players, arms)?;
        if assignment.is_null() {
            return Err(null("assignment"));
        }
        let (m, state) = run_auction(&v, eps)?;
        ptr::copy_nonoverlapping(m.assignment().as_ptr(), assignment, players);
        if let Some(s) = surplus.as_mut() {
            *s = m.surplus(&v);
        }
        if let Some(r) = rounds.as_mut() {
            *r = state.rounds;
        }
        Ok(())
    })
}

/// Exact maximum-surplus matching by enumeration.
///
/// # Safety
/// As for [`dmab_auction`].
#[no_mangle]
pub unsafe extern "C" fn dmab_brute_force_matching(
    values: *const f64,
    players: usize,
    arms: usize,
    assignment: *mut usize,
    surplus: *mut f64,
) -> DmabStatus {
    guard(|| {
        let v = matrix(values, players, arms)?;
        if assignment.is_null() {
            return Err(null("assignment"));
        }
        let (m, s) = brute_force_matching(&v)?;
        ptr::copy_nonoverlapping(m.assignment().as_ptr(), assignment, players);
        if let Some(out) = surplus.as_mut() {
            *out = s;
        }
        Ok(())
    })
}

/// Regret bound of UCB1 recomputed every `l` slots, for arm means `means`.
///
/// # Safety
/// `means` must hold `arms` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dmab_bound_t1(means: *const f64, arms: usize, l: u64, t: f64, out: *mut f64) -> DmabStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let g = bounds::gap_stats_single(slice(means, arms, "means")?)?;
        *out = bounds::bound_t1(&g, l, t)?;
        Ok(())
    })
}

/// Regret bound of UCB4 with cost `c` per computation.
///
/// # Safety
/// `means` must hold `arms` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dmab_bound_t2(means: *const f64, arms: usize, c: f64, t: f64, out: *mut f64) -> DmabStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let g = bounds::gap_stats_single(slice(means, arms, "means")?)?;
        *out = bounds::bound_t2(&g, c, arms, t)?;
        Ok(())
    })
}
