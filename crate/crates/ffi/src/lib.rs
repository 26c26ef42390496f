//! C ABI over `kcayley`.
//!
//! Every fallible call returns a [`KcStatus`]; results go through out
//! pointers that are written only on `KC_STATUS_OK`. The message of the last
//! failure on the calling thread is available from [`kc_last_error`].
//! Chains are opaque handles owned by the caller and released with
//! [`kc_chain_free`]. Strings returned by the library are released with
//! [`kc_string_free`]. Complex matrices are row-major arrays of interleaved
//! `(re, im)` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kcayley::boundary::{self, GAP_GRID};
use kcayley::cli;
use kcayley::kasparov::{bulk_class, BulkOptions};
use kcayley::models::{self, TightBindingModel};
use kcayley::{cayley, pairing, Error, Matrix, ToleranceProfile};
use num_complex::Complex64;

/// Longest open chain and momentum grid accepted, matching the CLI.
pub const KC_MAX_CELLS: usize = 400;
pub const KC_MAX_MOMENTA: usize = 1024;
/// Largest matrix accepted by the matrix-level calls.
pub const KC_MAX_DIM: usize = 512;

const GAPLESS_BELOW: f64 = 1e-6;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// A Rust panic was caught at the boundary; the handle may be unusable.
    Panic = 3,
    NotSquare = 10,
    Shape = 11,
    NonFinite = 12,
    Structural = 13,
    Singularity = 14,
    IllConditioned = 15,
    Capacity = 16,
    Parity = 17,
    Domain = 18,
    Precondition = 19,
    Composition = 20,
    Gapless = 21,
    BulkGapless = 22,
    Normalization = 23,
    Refinement = 24,
    DegenerateEndpoint = 25,
    Inconsistent = 26,
    Verification = 27,
}

impl From<&Error> for KcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotSquare { .. } => KcStatus::NotSquare,
            Error::Shape(_) => KcStatus::Shape,
            Error::NonFinite => KcStatus::NonFinite,
            Error::Structural { .. } => KcStatus::Structural,
            Error::Singularity { .. } => KcStatus::Singularity,
            Error::IllConditioned { .. } => KcStatus::IllConditioned,
            Error::Capacity { .. } => KcStatus::Capacity,
            Error::Parity { .. } => KcStatus::Parity,
            Error::Domain(_) => KcStatus::Domain,
            Error::Precondition(_) => KcStatus::Precondition,
            Error::Composition(_) => KcStatus::Composition,
            Error::Gapless { .. } => KcStatus::Gapless,
            Error::BulkGapless { .. } => KcStatus::BulkGapless,
            Error::Normalization { .. } => KcStatus::Normalization,
            Error::Refinement { .. } => KcStatus::Refinement,
            Error::DegenerateEndpoint { .. } => KcStatus::DegenerateEndpoint,
            Error::Inconsistent { .. } => KcStatus::Inconsistent,
            Error::Verification { .. } => KcStatus::Verification,
        }
    }
}

/// A one-dimensional tight-binding chain.
pub struct KcChain {
    model: TightBindingModel,
    kind: ChainKind,
}

#[derive(Clone, Copy)]
enum ChainKind {
    Ssh,
    Kitaev,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    // interior NULs cannot cross the boundary
    let c = CString::new(message.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: KcStatus, message: impl Into<String>) -> KcStatus {
    set_last_error(message.into());
    status
}

/// Runs `f` behind a panic guard and records the message of any failure.
fn guard(f: impl FnOnce() -> Result<(), KcStatus>) -> KcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KcStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(KcStatus::Panic, msg)
        }
    }
}

fn check<T>(r: kcayley::Result<T>) -> Result<T, KcStatus> {
    r.map_err(|e| fail(KcStatus::from(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), KcStatus> {
    if p.is_null() {
        Err(fail(KcStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn capped(requested: usize, limit: usize) -> Result<(), KcStatus> {
    if requested > limit {
        let e = Error::Capacity { requested, limit };
        return Err(fail(KcStatus::Capacity, e.to_string()));
    }
    Ok(())
}

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null after a
/// success. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn kc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Short name of a status code, e.g. `"bulk_gapless"`. Never null.
#[no_mangle]
pub extern "C" fn kc_status_name(status: KcStatus) -> *const c_char {
    let s: &'static str = match status {
        KcStatus::Ok => "ok\0",
        KcStatus::NullPointer => "null_pointer\0",
        KcStatus::InvalidUtf8 => "invalid_utf8\0",
        KcStatus::Panic => "panic\0",
        KcStatus::NotSquare => "not_square\0",
        KcStatus::Shape => "shape\0",
        KcStatus::NonFinite => "non_finite\0",
        KcStatus::Structural => "structural\0",
        KcStatus::Singularity => "singularity\0",
        KcStatus::IllConditioned => "ill_conditioned\0",
        KcStatus::Capacity => "capacity\0",
        KcStatus::Parity => "parity\0",
        KcStatus::Domain => "domain\0",
        KcStatus::Precondition => "precondition\0",
        KcStatus::Composition => "composition\0",
        KcStatus::Gapless => "gapless\0",
        KcStatus::BulkGapless => "bulk_gapless\0",
        KcStatus::Normalization => "normalization\0",
        KcStatus::Refinement => "refinement\0",
        KcStatus::DegenerateEndpoint => "degenerate_endpoint\0",
        KcStatus::Inconsistent => "inconsistent\0",
        KcStatus::Verification => "verification\0",
    };
    s.as_ptr().cast()
}

fn new_chain(out: *mut *mut KcChain, params: &[f64], make: impl FnOnce() -> KcChain) -> KcStatus {
    guard(|| {
        non_null(out, "out")?;
        if params.iter().any(|p| !p.is_finite()) {
            return Err(fail(KcStatus::NonFinite, "chain parameters must be finite"));
        }
        let chain = Box::new(make());
        // SAFETY: `out` is non-null and the caller provides writable storage.
        unsafe { *out = Box::into_raw(chain) };
        Ok(())
    })
}

/// SSH chain with intra-cell hopping `t1` and inter-cell hopping `t2`.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kc_ssh_new(t1: f64, t2: f64, out: *mut *mut KcChain) -> KcStatus {
    new_chain(out, &[t1, t2], || KcChain {
        model: models::ssh_model(t1, t2),
        kind: ChainKind::Ssh,
    })
}

/// Kitaev chain with chemical potential `mu`, hopping `t` and pairing
/// `delta`, in the Majorana basis.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kc_kitaev_new(mu: f64, t: f64, delta: f64, out: *mut *mut KcChain) -> KcStatus {
    new_chain(out, &[mu, t, delta], || KcChain {
        model: models::kitaev_chain(mu, t, delta),
        kind: ChainKind::Kitaev,
    })
}

/// Releases a chain. Null is ignored.
///
/// # Safety
/// `chain` must come from a constructor of this library and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn kc_chain_free(chain: *mut KcChain) {
    if !chain.is_null() {
        // SAFETY: the caller hands back a pointer from `Box::into_raw`.
        drop(unsafe { Box::from_raw(chain) });
    }
}

/// # Safety
/// `chain` must be null or a live handle.
unsafe fn chain_ref<'a>(chain: *const KcChain) -> Result<&'a KcChain, KcStatus> {
    non_null(chain, "chain")?;
    // SAFETY: non-null and live by the caller's contract.
    Ok(unsafe { &*chain })
}

/// Orbitals per unit cell.
///
/// # Safety
/// `chain` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kc_chain_cell_dim(chain: *const KcChain, out: *mut usize) -> KcStatus {
    guard(|| {
        let c = unsafe { chain_ref(chain) }?;
        non_null(out, "out")?;
        unsafe { *out = c.model.cell_dim };
        Ok(())
    })
}

fn bulk_gap(model: &TightBindingModel) -> Result<f64, KcStatus> {
    let hs = check(model.halfspace(8, &tol()))?;
    Ok(check(hs.bulk_gap(GAP_GRID, &tol()))?.0)
}

/// Smallest absolute Bloch eigenvalue over the Brillouin zone.
///
/// # Safety
/// `chain` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kc_chain_bulk_gap(chain: *const KcChain, out: *mut f64) -> KcStatus {
    guard(|| {
        let c = unsafe { chain_ref(chain) }?;
        non_null(out, "out")?;
        let gap = bulk_gap(&c.model)?;
        unsafe { *out = gap };
        Ok(())
    })
}

/// Bulk invariant: the winding number of an SSH chain over `momenta`
/// Bloch samples, or the Majorana number (`-1` topological) of a Kitaev
/// chain, for which `momenta` is ignored. Fails with
/// `KC_STATUS_BULK_GAPLESS` when the gap closes.
///
/// # Safety
/// `chain` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kc_chain_invariant(chain: *const KcChain, momenta: usize, out: *mut i64) -> KcStatus {
    guard(|| {
        let c = unsafe { chain_ref(chain) }?;
        non_null(out, "out")?;
        let gap = bulk_gap(&c.model)?;
        if gap < GAPLESS_BELOW {
            return Err(fail(KcStatus::BulkGapless, format!("bulk gap {gap:.3e} is closed")));
        }
        let tol = tol();
        let value = match c.kind {
            ChainKind::Ssh => {
                capped(momenta, KC_MAX_MOMENTA)?;
                if momenta < 8 {
                    return Err(fail(KcStatus::Domain, "at least 8 momenta are needed"));
                }
                let ins = check(c.model.family_insulator(momenta, &tol))?;
                let class = check(bulk_class(&ins, &BulkOptions::default(), &tol))?;
                match class.invariants.winding {
                    Some(w) => w,
                    None => return Err(fail(KcStatus::Precondition, "the chain has no chiral winding")),
                }
            }
            ChainKind::Kitaev => check(c.model.majorana_number(&tol))?,
        };
        unsafe { *out = value };
        Ok(())
    })
}

/// In-gap end modes of the open chain with `cells` unit cells, counted
/// within a fixed fraction of the bulk gap and split by position.
///
/// # Safety
/// `chain` must be a live handle; `left` and `right` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kc_chain_end_modes(
    chain: *const KcChain,
    cells: usize,
    left: *mut usize,
    right: *mut usize,
) -> KcStatus {
    guard(|| {
        let c = unsafe { chain_ref(chain) }?;
        non_null(left, "left")?;
        non_null(right, "right")?;
        capped(cells, KC_MAX_CELLS)?;
        let hs = check(c.model.halfspace(cells, &tol()))?;
        let (l, r) = check(boundary::gapped_end_modes(&hs, &tol()))?;
        unsafe {
            *left = l;
            *right = r;
        }
        Ok(())
    })
}

/// # Safety
/// `data` must hold `2 n²` readable doubles.
unsafe fn read_matrix(n: usize, data: *const f64) -> Result<Matrix, KcStatus> {
    non_null(data, "input")?;
    // SAFETY: length guaranteed by the caller.
    let s = unsafe { std::slice::from_raw_parts(data, 2 * n * n) };
    Ok(Matrix::from_row_iterator(n, n, s.chunks_exact(2).map(|p| Complex64::new(p[0], p[1]))))
}

/// Cayley transform `(T + i)(T - i)^{-1}` of a Hermitian `n × n` matrix.
///
/// # Safety
/// `input` must hold `2 n²` readable and `output` `2 n²` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn kc_cayley(n: usize, input: *const f64, output: *mut f64) -> KcStatus {
    guard(|| {
        non_null(output, "output")?;
        capped(n, KC_MAX_DIM)?;
        let t = unsafe { read_matrix(n, input) }?;
        let v = check(cayley::cayley(&t, &tol()))?;
        // SAFETY: length guaranteed by the caller.
        let out = unsafe { std::slice::from_raw_parts_mut(output, 2 * n * n) };
        for i in 0..n {
            for j in 0..n {
                let z = v[(i, j)];
                out[2 * (i * n + j)] = z.re;
                out[2 * (i * n + j) + 1] = z.im;
            }
        }
        Ok(())
    })
}

/// Winding number of a closed loop of `count` nonzero complex samples,
/// given as interleaved `(re, im)` pairs.
///
/// # Safety
/// `samples` must hold `2 count` readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn kc_winding_of_phases(count: usize, samples: *const f64, out: *mut i64) -> KcStatus {
    guard(|| {
        non_null(samples, "samples")?;
        non_null(out, "out")?;
        // SAFETY: length guaranteed by the caller.
        let s = unsafe { std::slice::from_raw_parts(samples, 2 * count) };
        let z: Vec<Complex64> = s.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let w = check(pairing::winding_of_phases(&z))?;
        unsafe { *out = w };
        Ok(())
    })
}

/// Runs one command-line invocation, e.g. `{"invariant", "--model",
/// "ssh"}` without the program name, and returns the rendered report
/// in `*report` and the command's exit code in `*exit_code`. `--out` is
/// honoured only through the returned text; nothing is written to disk.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `report` and
/// `exit_code` must be writable. Free the report with `kc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn kc_run(
    argc: usize,
    argv: *const *const c_char,
    report: *mut *mut c_char,
    exit_code: *mut c_int,
) -> KcStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(exit_code, "exit_code")?;
        if argc > 0 {
            non_null(argv, "argv")?;
        }
        let mut args = vec!["kcayley".to_string()];
        for i in 0..argc {
            // SAFETY: `argv` holds `argc` entries.
            let p = unsafe { *argv.add(i) };
            non_null(p, "argv entry")?;
            let s = unsafe { CStr::from_ptr(p) }
                .to_str()
                .map_err(|_| fail(KcStatus::InvalidUtf8, format!("argv[{i}] is not UTF-8")))?;
            args.push(s.to_string());
        }
        let cli::Captured { text, exit_code: code, error } = cli::capture(&args);
        if let Some(message) = error {
            set_last_error(message);
        }
        let c = CString::new(text.replace('\0', " ")).expect("no interior NUL");
        unsafe {
            *report = c.into_raw();
            *exit_code = code;
        }
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kc_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the caller hands back a pointer from `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_names_are_terminated() {
        for s in [KcStatus::Ok, KcStatus::BulkGapless, KcStatus::Verification] {
            let name = unsafe { CStr::from_ptr(kc_status_name(s)) };
            assert!(!name.to_bytes().is_empty());
        }
        assert_eq!(unsafe { CStr::from_ptr(kc_version()) }.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn errors_map_to_their_codes() {
        assert_eq!(KcStatus::from(&Error::Domain("x".into())), KcStatus::Domain);
        let e = Error::Capacity { requested: 2, limit: 1 };
        assert_eq!(KcStatus::from(&e), KcStatus::Capacity);
    }

    #[test]
    fn panics_are_caught() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, KcStatus::Panic);
        let msg = unsafe { CStr::from_ptr(kc_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "boom");
        assert_eq!(guard(|| Ok(())), KcStatus::Ok);
        assert!(kc_last_error().is_null());
    }
}
