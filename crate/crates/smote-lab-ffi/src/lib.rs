//! C ABI for the synthetic sampling and distance library.
//!
//! Conventions:
//!
//! - Samples are opaque handles created by [`smote_sample_new`] and
//!   released by [`smote_sample_free`]. Functions returning a handle
//!   return null on failure.
//! - Functions returning a status code return [`SMOTE_OK`] (0) on
//!   success. On any failure the thread's last-error message is set;
//!   fetch it with [`smote_last_error_message`].
//! - Pointers are read only for the duration of the call; output buffers
//!   are written only on success.
//!
//! The generated header lives in `include/smote_lab.h` and is refreshed
//! by the build script.

use smote_lab::dist::DistributionSpec;
use smote_lab::metrics::{kl_histogram, ks_one_sample, ks_two_sample, wasserstein1};
use smote_lab::sampling::{generate_batch, Sample, SmoteConfig, SmoteVariant};
use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// The call succeeded.
pub const SMOTE_OK: c_int = 0;
/// A required pointer was null or a buffer was too small.
pub const SMOTE_ERR_ARGUMENT: c_int = 1;
/// The library rejected the inputs; the message has the details.
pub const SMOTE_ERR_COMPUTE: c_int = 2;
/// The call panicked; treat the handle state as poisoned.
pub const SMOTE_ERR_PANIC: c_int = 3;

/// Uniform(a, b): `param0` = a, `param1` = b.
pub const SMOTE_DIST_UNIFORM: c_int = 0;
/// Gaussian(mean, std): `param0` = mean, `param1` = std.
pub const SMOTE_DIST_GAUSSIAN: c_int = 1;
/// Exponential(rate): `param0` = rate, `param1` ignored.
pub const SMOTE_DIST_EXPONENTIAL: c_int = 2;

/// Interpolate toward the neighbor of exactly the configured rank.
pub const SMOTE_VARIANT_FIXED_RANK: c_int = 0;
/// Draw the rank uniformly from {1, ..., configured rank} per draw.
pub const SMOTE_VARIANT_RANDOM_FROM_POOL: c_int = 1;

/// An immutable set of points, row major. Opaque to callers.
pub struct SmoteSample {
    inner: Sample,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes stripped");
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::default();
    });
}

/// The message for the current thread's most recent failure, or an empty
/// string after a success. The pointer stays valid until this thread's
/// next call into the library.
#[no_mangle]
pub extern "C" fn smote_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Null-checks an input handle, recording the failure for the caller.
macro_rules! require {
    ($ptr:expr, $name:literal) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error(concat!($name, " must not be null"));
                return SMOTE_ERR_ARGUMENT;
            }
        }
    };
}

fn guard(body: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            SMOTE_ERR_PANIC
        }
    }
}

fn spec_from(kind: c_int, param0: c_double, param1: c_double) -> Result<DistributionSpec, String> {
    let spec = match kind {
        SMOTE_DIST_UNIFORM => DistributionSpec::uniform(param0, param1),
        SMOTE_DIST_GAUSSIAN => DistributionSpec::gaussian(param0, param1),
        SMOTE_DIST_EXPONENTIAL => DistributionSpec::exponential(param0),
        other => return Err(format!("unknown distribution kind {other}")),
    };
    spec.map_err(|e| e.to_string())
}

/// Creates a sample of `len` points of dimension `dim` from a row-major
/// array of `len * dim` finite values. Returns null on failure (empty
/// data, zero dimension, non-finite coordinates, null pointer).
#[no_mangle]
pub extern "C" fn smote_sample_new(
    values: *const c_double,
    len: usize,
    dim: usize,
) -> *mut SmoteSample {
    let outcome = catch_unwind(|| {
        if values.is_null() {
            set_error("values must not be null");
            return std::ptr::null_mut();
        }
        if dim == 0 {
            set_error("dimension must be at least 1");
            return std::ptr::null_mut();
        }
        if len == 0 {
            set_error("sample must contain at least one point");
            return std::ptr::null_mut();
        }
        let Some(total) = len.checked_mul(dim) else {
            set_error("len * dim overflows");
            return std::ptr::null_mut();
        };
        let data = unsafe { std::slice::from_raw_parts(values, total) };
        match Sample::new(data.to_vec(), dim) {
            Ok(inner) => {
                clear_error();
                Box::into_raw(Box::new(SmoteSample { inner }))
            }
            Err(e) => {
                set_error(&e.to_string());
                std::ptr::null_mut()
            }
        }
    });
    match outcome {
        Ok(ptr) => ptr,
        Err(_) => {
            set_error("internal panic");
            std::ptr::null_mut()
        }
    }
}

/// Releases a sample. Null is accepted and ignored.
#[no_mangle]
pub extern "C" fn smote_sample_free(sample: *mut SmoteSample) {
    if !sample.is_null() {
        drop(unsafe { Box::from_raw(sample) });
    }
}

/// Number of points, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn smote_sample_len(sample: *const SmoteSample) -> usize {
    unsafe { sample.as_ref() }.map_or(0, |s| s.inner.len())
}

/// Dimension per point, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn smote_sample_dim(sample: *const SmoteSample) -> usize {
    unsafe { sample.as_ref() }.map_or(0, |s| s.inner.dim())
}

/// Copies the sample's values row major into `out`. `capacity` is the
/// number of doubles the buffer holds; it must be at least len * dim.
#[no_mangle]
pub extern "C" fn smote_sample_copy_values(
    sample: *const SmoteSample,
    out: *mut c_double,
    capacity: usize,
) -> c_int {
    guard(|| {
        let sample = require!(sample, "sample");
        if out.is_null() {
            set_error("out must not be null");
            return SMOTE_ERR_ARGUMENT;
        }
        let flat = sample.inner.flat();
        if capacity < flat.len() {
            set_error("out buffer is smaller than len * dim");
            return SMOTE_ERR_ARGUMENT;
        }
        unsafe { std::ptr::copy_nonoverlapping(flat.as_ptr(), out, flat.len()) };
        clear_error();
        SMOTE_OK
    })
}

/// Generates `count` synthetic points by seeded neighbor interpolation.
///
/// `rank` is the neighbor rank (fixed-rank variant) or the pool size
/// (random-from-pool variant); it must satisfy `1 <= rank < len`. The
/// result is a pure function of (base, rank, variant, seed, count) and
/// is identical at any thread count. Returns null on failure.
#[no_mangle]
pub extern "C" fn smote_generate_batch(
    base: *const SmoteSample,
    rank: usize,
    variant: c_int,
    seed: u64,
    count: usize,
) -> *mut SmoteSample {
    let outcome = catch_unwind(|| {
        let Some(base) = (unsafe { base.as_ref() }) else {
            set_error("base must not be null");
            return std::ptr::null_mut();
        };
        let variant = match variant {
            SMOTE_VARIANT_FIXED_RANK => SmoteVariant::FixedRank,
            SMOTE_VARIANT_RANDOM_FROM_POOL => SmoteVariant::RandomFromPool,
            other => {
                set_error(&format!("unknown variant {other}"));
                return std::ptr::null_mut();
            }
        };
        let config = SmoteConfig {
            rank,
            variant,
            seed,
        };
        match generate_batch(&base.inner, &config, count) {
            Ok(inner) => {
                clear_error();
                Box::into_raw(Box::new(SmoteSample { inner }))
            }
            Err(e) => {
                set_error(&e.to_string());
                std::ptr::null_mut()
            }
        }
    });
    match outcome {
        Ok(ptr) => ptr,
        Err(_) => {
            set_error("internal panic");
            std::ptr::null_mut()
        }
    }
}

/// Two-sample Kolmogorov-Smirnov distance between 1-D samples.
#[no_mangle]
pub extern "C" fn smote_ks_two_sample(
    a: *const SmoteSample,
    b: *const SmoteSample,
    out_value: *mut c_double,
) -> c_int {
    guard(|| {
        let a = require!(a, "a");
        let b = require!(b, "b");
        if out_value.is_null() {
            set_error("out_value must not be null");
            return SMOTE_ERR_ARGUMENT;
        }
        match ks_two_sample(&a.inner, &b.inner) {
            Ok(r) => {
                unsafe { *out_value = r.value };
                clear_error();
                SMOTE_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                SMOTE_ERR_COMPUTE
            }
        }
    })
}

/// One-sample Kolmogorov-Smirnov distance against an analytic
/// distribution chosen by `kind` (see the SMOTE_DIST constants).
#[no_mangle]
pub extern "C" fn smote_ks_one_sample(
    sample: *const SmoteSample,
    kind: c_int,
    param0: c_double,
    param1: c_double,
    out_value: *mut c_double,
) -> c_int {
    guard(|| {
        let sample = require!(sample, "sample");
        if out_value.is_null() {
            set_error("out_value must not be null");
            return SMOTE_ERR_ARGUMENT;
        }
        let spec = match spec_from(kind, param0, param1) {
            Ok(spec) => spec,
            Err(message) => {
                set_error(&message);
                return SMOTE_ERR_COMPUTE;
            }
        };
        match ks_one_sample(&sample.inner, &spec) {
            Ok(r) => {
                unsafe { *out_value = r.value };
                clear_error();
                SMOTE_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                SMOTE_ERR_COMPUTE
            }
        }
    })
}

/// First Wasserstein distance between 1-D samples.
#[no_mangle]
pub extern "C" fn smote_wasserstein1(
    a: *const SmoteSample,
    b: *const SmoteSample,
    out_value: *mut c_double,
) -> c_int {
    guard(|| {
        let a = require!(a, "a");
        let b = require!(b, "b");
        if out_value.is_null() {
            set_error("out_value must not be null");
            return SMOTE_ERR_ARGUMENT;
        }
        match wasserstein1(&a.inner, &b.inner) {
            Ok(r) => {
                unsafe { *out_value = r.value };
                clear_error();
                SMOTE_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                SMOTE_ERR_COMPUTE
            }
        }
    })
}

/// Histogram KL divergence of a 1-D sample from an analytic reference,
/// on `n_bins` shared equal-width bins (at least 2).
#[no_mangle]
pub extern "C" fn smote_kl_histogram(
    sample: *const SmoteSample,
    kind: c_int,
    param0: c_double,
    param1: c_double,
    n_bins: usize,
    out_value: *mut c_double,
) -> c_int {
    guard(|| {
        let sample = require!(sample, "sample");
        if out_value.is_null() {
            set_error("out_value must not be null");
            return SMOTE_ERR_ARGUMENT;
        }
        let spec = match spec_from(kind, param0, param1) {
            Ok(spec) => spec,
            Err(message) => {
                set_error(&message);
                return SMOTE_ERR_COMPUTE;
            }
        };
        match kl_histogram(&sample.inner, &spec, n_bins) {
            Ok(r) => {
                unsafe { *out_value = r.value };
                clear_error();
                SMOTE_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                SMOTE_ERR_COMPUTE
            }
        }
    })
}
