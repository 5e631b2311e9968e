//! C ABI over the spectral-statistics library: an opaque ensemble
//! handle, status codes, and flat-buffer entry points for the finite-n
//! kernel routes, the three limiting kernels, the parametric density
//! curves, and reproducible sampling.
//!
//! Conventions: every fallible function returns [`PsStatus`] and writes
//! its outputs through caller-owned pointers only on success. The most
//! recent failure message is kept per thread and read back with
//! [`ps_last_error`]. Every fallible entry point catches panics at the
//! boundary and reports them as `PS_STATUS_NUMERIC_FAILURE`.

use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use prodspec::finite_kernel::{kernel_biortho, kernel_contour, EnsembleParams, KernelEval};
use prodspec::freeprob::{density_parametric_a0, density_parametric_a1};
use prodspec::limits::{
    kernel_critical, kernel_subcritical, kernel_supercritical, CriticalParams,
    SupercriticalParams,
};
use prodspec::sampler::{rng_for, sample_spectrum};
use prodspec::{Error, NuVector};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    /// Success; all requested outputs were written.
    Ok = 0,
    /// Input rejected before evaluation (domain, validation, or a source
    /// construction that the requested route cannot handle).
    InvalidArgument = 1,
    /// Evaluation started but did not produce a trusted value
    /// (non-convergence, geometry failure, or a caught panic).
    NumericFailure = 2,
    /// A required pointer was NULL.
    NullPointer = 3,
}

/// Opaque ensemble handle: matrix size n, factor shape ν_1..ν_M, and the
/// n source eigenvalues. Create with [`ps_ensemble_new`], release with
/// [`ps_ensemble_free`].
pub struct PsEnsemble {
    inner: EnsembleParams,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.push_str(msg);
    });
}

fn clear_error() {
    LAST_ERROR.with(|e| e.borrow_mut().clear());
}

fn fail(err: Error) -> PsStatus {
    let status = match err {
        Error::Validation(_) | Error::Domain(_) | Error::CoincidentSource(_) => {
            PsStatus::InvalidArgument
        }
        _ => PsStatus::NumericFailure,
    };
    set_error(&err.to_string());
    status
}

fn null_arg(what: &str) -> PsStatus {
    set_error(&format!("{what} is NULL"));
    PsStatus::NullPointer
}

fn guarded(f: impl FnOnce() -> PsStatus) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("caught a panic at the C boundary");
            PsStatus::NumericFailure
        }
    }
}

/// NULL is accepted only together with length zero.
unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

unsafe fn finish_eval(
    res: prodspec::Result<KernelEval>,
    value: *mut f64,
    abs_err: *mut f64,
) -> PsStatus {
    match res {
        Ok(ev) => {
            *value = ev.value;
            if !abs_err.is_null() {
                *abs_err = ev.abs_error_estimate;
            }
            clear_error();
            PsStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ps_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the current thread's last error message into `buf` (truncated
/// to `cap` bytes including the NUL terminator) and returns the full
/// message length in bytes. `buf` may be NULL to query the length.
#[no_mangle]
pub unsafe extern "C" fn ps_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Creates an ensemble handle for matrix size `n`, factor shape
/// `nus[0..nus_len]` (`nus_len` = M; both may be empty for M = 0), and
/// source eigenvalues `b[0..b_len]` (`b_len` must equal `n`). On success
/// writes the handle to `*out`.
#[no_mangle]
pub unsafe extern "C" fn ps_ensemble_new(
    n: usize,
    nus: *const u32,
    nus_len: usize,
    b: *const f64,
    b_len: usize,
    out: *mut *mut PsEnsemble,
) -> PsStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("output handle pointer");
        }
        let (nus, b) = match unsafe { (slice_arg(nus, nus_len), slice_arg(b, b_len)) } {
            (Some(nus), Some(b)) => (nus, b),
            _ => return null_arg("array argument with nonzero length"),
        };
        match EnsembleParams::new(n, NuVector::new(nus.to_vec()), b.to_vec()) {
            Ok(p) => {
                unsafe { *out = Box::into_raw(Box::new(PsEnsemble { inner: p })) };
                clear_error();
                PsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases an ensemble handle. NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ps_ensemble_free(ens: *mut PsEnsemble) {
    if !ens.is_null() {
        drop(unsafe { Box::from_raw(ens) });
    }
}

/// Matrix size of the ensemble (the number of eigenvalues each sample
/// yields); 0 for a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn ps_ensemble_n(ens: *const PsEnsemble) -> usize {
    if ens.is_null() {
        0
    } else {
        unsafe { (*ens).inner.n }
    }
}

unsafe fn kernel_entry(
    ens: *const PsEnsemble,
    value: *mut f64,
    abs_err: *mut f64,
    eval: impl FnOnce(&EnsembleParams) -> prodspec::Result<KernelEval>,
) -> PsStatus {
    guarded(|| {
        if ens.is_null() || value.is_null() {
            return null_arg("ensemble handle or value pointer");
        }
        let p = unsafe { &(*ens).inner };
        unsafe { finish_eval(eval(p), value, abs_err) }
    })
}

/// Finite-n kernel K_n(x, y) via the double-contour route (any source,
/// any n). Writes the value and, when `abs_err` is non-NULL, the error
/// estimate.
#[no_mangle]
pub unsafe extern "C" fn ps_kernel_contour(
    ens: *const PsEnsemble,
    x: f64,
    y: f64,
    value: *mut f64,
    abs_err: *mut f64,
) -> PsStatus {
    unsafe { kernel_entry(ens, value, abs_err, |p| kernel_contour(p, x, y)) }
}

/// Finite-n kernel K_n(x, y) via biorthogonal inversion (distinct source
/// eigenvalues, n ≤ 12, y ≠ 0).
#[no_mangle]
pub unsafe extern "C" fn ps_kernel_biortho(
    ens: *const PsEnsemble,
    x: f64,
    y: f64,
    value: *mut f64,
    abs_err: *mut f64,
) -> PsStatus {
    unsafe { kernel_entry(ens, value, abs_err, |p| kernel_biortho(p, x, y)) }
}

/// Limiting kernel at the origin in the subcritical regime (hard-edge
/// Meijer-G form; the M = 0 case is the sine kernel).
#[no_mangle]
pub unsafe extern "C" fn ps_limit_subcritical(
    nus: *const u32,
    nus_len: usize,
    x: f64,
    y: f64,
    value: *mut f64,
    abs_err: *mut f64,
) -> PsStatus {
    guarded(|| {
        if value.is_null() {
            return null_arg("value pointer");
        }
        let Some(nus) = (unsafe { slice_arg(nus, nus_len) }) else {
            return null_arg("nus with nonzero length");
        };
        let nv = NuVector::new(nus.to_vec());
        unsafe { finish_eval(kernel_subcritical(&nv, x, y), value, abs_err) }
    })
}

/// Limiting kernel at the critical coupling: Pearcey-type double
/// integral with transition parameter `tau` and `spikes_len` spike
/// locations of which the first `p0` are negative.
#[no_mangle]
pub unsafe extern "C" fn ps_limit_critical(
    nus: *const u32,
    nus_len: usize,
    tau: f64,
    spikes: *const f64,
    spikes_len: usize,
    p0: usize,
    x: f64,
    y: f64,
    value: *mut f64,
    abs_err: *mut f64,
) -> PsStatus {
    guarded(|| {
        if value.is_null() {
            return null_arg("value pointer");
        }
        let (nus, spikes) =
            match unsafe { (slice_arg(nus, nus_len), slice_arg(spikes, spikes_len)) } {
                (Some(nus), Some(spikes)) => (nus, spikes),
                _ => return null_arg("array argument with nonzero length"),
            };
        let nv = NuVector::new(nus.to_vec());
        let reg = CriticalParams { tau, spikes: spikes.to_vec(), p0 };
        unsafe { finish_eval(kernel_critical(&nv, &reg, x, y), value, abs_err) }
    })
}

/// Limiting kernel in the supercritical regime: rank-`spikes_len`
/// perturbation of the Gaussian factor at coupling `a` > 1.
#[no_mangle]
pub unsafe extern "C" fn ps_limit_supercritical(
    nus: *const u32,
    nus_len: usize,
    a: f64,
    spikes: *const f64,
    spikes_len: usize,
    x: f64,
    y: f64,
    value: *mut f64,
    abs_err: *mut f64,
) -> PsStatus {
    guarded(|| {
        if value.is_null() {
            return null_arg("value pointer");
        }
        let (nus, spikes) =
            match unsafe { (slice_arg(nus, nus_len), slice_arg(spikes, spikes_len)) } {
                (Some(nus), Some(spikes)) => (nus, spikes),
                _ => return null_arg("array argument with nonzero length"),
            };
        let nv = NuVector::new(nus.to_vec());
        let reg = SupercriticalParams { a, spikes: spikes.to_vec() };
        unsafe { finish_eval(kernel_supercritical(&nv, &reg, x, y), value, abs_err) }
    })
}

/// Global limiting density in parametric form for M = `m` product
/// factors. `a` selects the branch and must be exactly 0.0 or 1.0 (the
/// two couplings with closed parametrisations). Evaluates the curve at
/// `phis[0..len]` and writes abscissae to `xs_out` and densities to
/// `rhos_out`, each with room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn ps_density_parametric(
    m: usize,
    a: f64,
    phis: *const f64,
    len: usize,
    xs_out: *mut f64,
    rhos_out: *mut f64,
) -> PsStatus {
    guarded(|| {
        if len > 0 && (xs_out.is_null() || rhos_out.is_null()) {
            return null_arg("output array");
        }
        let Some(phis) = (unsafe { slice_arg(phis, len) }) else {
            return null_arg("phis with nonzero length");
        };
        let res = if a == 0.0 {
            density_parametric_a0(m, phis)
        } else if a == 1.0 {
            density_parametric_a1(m, phis)
        } else {
            Err(Error::Domain(format!(
                "parametric density curves exist at a = 0 and a = 1 only, got a = {a}"
            )))
        };
        match res {
            Ok(curve) => {
                for (i, &(x, rho)) in curve.points.iter().enumerate() {
                    unsafe {
                        *xs_out.add(i) = x;
                        *rhos_out.add(i) = rho;
                    }
                }
                clear_error();
                PsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Draws sample `sample_index` of the run keyed by `seed` and writes the
/// ascending eigenvalues to `eigs_out` (room for [`ps_ensemble_n`]
/// values). The same (seed, index) pair always yields the same spectrum.
#[no_mangle]
pub unsafe extern "C" fn ps_sample_spectrum(
    ens: *const PsEnsemble,
    seed: u64,
    sample_index: usize,
    eigs_out: *mut f64,
) -> PsStatus {
    guarded(|| {
        if ens.is_null() || eigs_out.is_null() {
            return null_arg("ensemble handle or output array");
        }
        let p = unsafe { &(*ens).inner };
        let mut rng = rng_for(seed, sample_index);
        match sample_spectrum(p, &mut rng) {
            Ok(eigs) => {
                unsafe { std::ptr::copy_nonoverlapping(eigs.as_ptr(), eigs_out, eigs.len()) };
                clear_error();
                PsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
