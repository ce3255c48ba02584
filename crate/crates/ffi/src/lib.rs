//! C ABI for `vimetric`.
//!
//! Distributions cross the boundary as opaque [`VimDistribution`] handles.
//! Every fallible function returns a [`VimStatus`]; on failure a message for
//! the calling thread is available from [`vim_last_error`]. Panics never
//! unwind into C and are reported as `VIM_STATUS_PANIC`.
//!
//! The generated header is `include/vimetric.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vimetric::{entropy, exact_metric, greedy_metric_bound, greedy_reduce, Distribution, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    SizeCapExceeded = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque probability distribution.
pub struct VimDistribution(Distribution);

/// Distances between two distributions, in nats.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VimDistance {
    /// Conditional entropy of the second variable given the first.
    pub v_phi_psi: f64,
    /// Conditional entropy of the first variable given the second.
    pub v_psi_phi: f64,
    pub d: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: VimStatus, message: impl Into<String>) -> VimStatus {
    set_error(message.into());
    status
}

fn from_error(e: Error) -> VimStatus {
    let status = match e {
        Error::SizeCapExceeded { .. } => VimStatus::SizeCapExceeded,
        _ => VimStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> VimStatus) -> VimStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(VimStatus::Panic, "internal panic"),
    }
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn vim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a distribution from `len` doubles. With `renormalize` set, any
/// nonnegative weights are rescaled; otherwise they must sum to 1 within 1e-6.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn vim_distribution_new(
    values: *const f64,
    len: usize,
    renormalize: bool,
    out: *mut *mut VimDistribution,
) -> VimStatus {
    guard(|| {
        if values.is_null() || out.is_null() {
            return fail(VimStatus::NullPointer, "null argument");
        }
        let raw = std::slice::from_raw_parts(values, len).to_vec();
        let built = if renormalize {
            Distribution::from_weights(raw)
        } else {
            Distribution::new(raw)
        };
        match built {
            Ok(d) => {
                *out = Box::into_raw(Box::new(VimDistribution(d)));
                VimStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a distribution. Null is ignored.
///
/// # Safety
/// `dist` must come from [`vim_distribution_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vim_distribution_free(dist: *mut VimDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Number of symbols, or 0 for null.
///
/// # Safety
/// `dist` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vim_distribution_len(dist: *const VimDistribution) -> usize {
    dist.as_ref().map_or(0, |d| d.0.len())
}

/// Copies the (normalized) probabilities into `buf`.
///
/// # Safety
/// `dist` must be a live handle and `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn vim_distribution_values(
    dist: *const VimDistribution,
    buf: *mut f64,
    cap: usize,
) -> VimStatus {
    guard(|| {
        let (Some(d), false) = (dist.as_ref(), buf.is_null()) else {
            return fail(VimStatus::NullPointer, "null argument");
        };
        if cap < d.0.len() {
            return fail(
                VimStatus::BufferTooSmall,
                format!("need {} slots", d.0.len()),
            );
        }
        std::slice::from_raw_parts_mut(buf, d.0.len()).copy_from_slice(d.0.as_slice());
        VimStatus::Ok
    })
}

/// Shannon entropy in nats.
///
/// # Safety
/// `dist` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vim_entropy(dist: *const VimDistribution, out: *mut f64) -> VimStatus {
    guard(|| {
        let (Some(d), false) = (dist.as_ref(), out.is_null()) else {
            return fail(VimStatus::NullPointer, "null argument");
        };
        *out = entropy(&d.0);
        VimStatus::Ok
    })
}

unsafe fn pair<'a>(
    phi: *const VimDistribution,
    psi: *const VimDistribution,
    out: *mut VimDistance,
) -> Option<(&'a Distribution, &'a Distribution)> {
    if out.is_null() {
        return None;
    }
    Some((&phi.as_ref()?.0, &psi.as_ref()?.0))
}

/// Exact distance by vertex enumeration. Fails with
/// `VIM_STATUS_SIZE_CAP_EXCEEDED` when the number of spanning trees of the
/// bipartite graph exceeds `size_cap`.
///
/// # Safety
/// `phi` and `psi` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vim_distance_exact(
    phi: *const VimDistribution,
    psi: *const VimDistribution,
    size_cap: u64,
    out: *mut VimDistance,
) -> VimStatus {
    guard(|| {
        let Some((phi, psi)) = pair(phi, psi, out) else {
            return fail(VimStatus::NullPointer, "null argument");
        };
        match exact_metric(phi, psi, size_cap) {
            Ok(r) => {
                *out = VimDistance {
                    v_phi_psi: r.v_phi_psi,
                    v_psi_phi: r.v_psi_phi,
                    d: r.d,
                };
                VimStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Greedy upper bound on the distance.
///
/// # Safety
/// `phi` and `psi` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vim_distance_greedy(
    phi: *const VimDistribution,
    psi: *const VimDistribution,
    out: *mut VimDistance,
) -> VimStatus {
    guard(|| {
        let Some((phi, psi)) = pair(phi, psi, out) else {
            return fail(VimStatus::NullPointer, "null argument");
        };
        match greedy_metric_bound(phi, psi) {
            Ok(t) => {
                *out = VimDistance {
                    v_phi_psi: t.v_bound,
                    v_psi_phi: t.u_bound,
                    d: t.d_bound,
                };
                VimStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Best-fit reduction of `phi` to `m` symbols. Writes the block of every
/// symbol (zero-based) into `partition`, which must hold `len(phi)` entries,
/// and the entropy of the reduced distribution into `entropy_out`.
///
/// # Safety
/// `phi` must be a live handle, `partition` must hold `partition_len`
/// entries and `entropy_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vim_reduce_greedy(
    phi: *const VimDistribution,
    m: usize,
    presort: bool,
    partition: *mut usize,
    partition_len: usize,
    entropy_out: *mut f64,
) -> VimStatus {
    guard(|| {
        let (Some(phi), false, false) = (phi.as_ref(), partition.is_null(), entropy_out.is_null())
        else {
            return fail(VimStatus::NullPointer, "null argument");
        };
        if partition_len < phi.0.len() {
            return fail(
                VimStatus::BufferTooSmall,
                format!("need {} slots", phi.0.len()),
            );
        }
        match greedy_reduce(&phi.0, m, presort) {
            Ok(g) => {
                let blocks = &g.reduction.aggregation.partition;
                std::slice::from_raw_parts_mut(partition, blocks.len()).copy_from_slice(blocks);
                *entropy_out = g.reduction.entropy;
                VimStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
