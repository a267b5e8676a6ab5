//! C ABI for the splitting toolkit.
//!
//! Conventions: every function returns an [`MsStatus`] code and writes its
//! result through out-pointers; datasets travel as opaque handles; strings
//! returned by the library are UTF-8, NUL-terminated, and must be released
//! with [`ms_string_free`]. On any non-OK status, [`ms_last_error`] holds a
//! thread-local description valid until the next failing call on the same
//! thread. Pointer arguments must be valid for the duration of the call;
//! null pointers are reported as `MS_STATUS_NULL_POINTER`, never
//! dereferenced.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use molsplit_core::hi_split::{self, HiParams, HiSplitError};
use molsplit_core::kcut::SolveError;
use molsplit_core::lo_split::{self, LoParams};
use molsplit_core::metrics;
use molsplit_core::molio::{load_dataset, Dataset, DatasetFormat, FingerprintConfig};

/// Status codes shared with the command line's exit codes where possible.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsStatus {
    MsStatusOk = 0,
    MsStatusInputError = 1,
    MsStatusInfeasible = 2,
    MsStatusTimeBudget = 3,
    MsStatusNullPointer = 4,
    MsStatusPanic = 5,
}

/// Dataset input formats accepted by [`ms_dataset_load`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsDatasetFormat {
    MsDatasetSmilesCsv = 0,
    MsDatasetFingerprintCsv = 1,
}

/// Opaque dataset handle; create with [`ms_dataset_load`], release with
/// [`ms_dataset_free`].
pub struct MsDataset {
    inner: Dataset,
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

fn fail(status: MsStatus, message: &str) -> MsStatus {
    set_last_error(message);
    status
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn ms_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Description of the most recent failure on this thread; valid until the
/// next failing call on the same thread. Do not free.
#[no_mangle]
pub extern "C" fn ms_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a string returned through an out-pointer by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not yet
/// freed; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ms_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn path_from(ptr: *const c_char) -> Result<String, MsStatus> {
    if ptr.is_null() {
        return Err(fail(MsStatus::MsStatusNullPointer, "null path pointer"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| fail(MsStatus::MsStatusInputError, "path is not valid UTF-8"))
}

fn guard(f: impl FnOnce() -> MsStatus) -> MsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in library call".to_string());
            fail(MsStatus::MsStatusPanic, &msg)
        }
    }
}

fn export_string(out: *mut *mut c_char, value: String) -> MsStatus {
    let c = match CString::new(value) {
        Ok(c) => c,
        Err(_) => return fail(MsStatus::MsStatusInputError, "output contains NUL"),
    };
    unsafe { *out = c.into_raw() };
    MsStatus::MsStatusOk
}

/// Load a dataset from a CSV file. `radius`/`nbits` configure fingerprint
/// generation for SMILES inputs (use 2/1024 for the defaults). On success
/// `*out` owns the new handle.
///
/// # Safety
/// `path` must point to a NUL-terminated string and `out` to writable
/// pointer-sized memory.
#[no_mangle]
pub unsafe extern "C" fn ms_dataset_load(
    path: *const c_char,
    format: MsDatasetFormat,
    radius: u32,
    nbits: u32,
    out: *mut *mut MsDataset,
) -> MsStatus {
    if out.is_null() {
        return fail(MsStatus::MsStatusNullPointer, "null out pointer");
    }
    let path = match path_from(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    guard(|| {
        let format = match format {
            MsDatasetFormat::MsDatasetSmilesCsv => DatasetFormat::SmilesCsv,
            MsDatasetFormat::MsDatasetFingerprintCsv => DatasetFormat::FingerprintCsv,
        };
        let config = FingerprintConfig { radius, nbits };
        match load_dataset(&path, format, &config) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MsDataset { inner }));
                MsStatus::MsStatusOk
            }
            Err(e) => fail(MsStatus::MsStatusInputError, &e.to_string()),
        }
    })
}

/// Release a dataset handle; null is a no-op.
///
/// # Safety
/// `ds` must be a handle from [`ms_dataset_load`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_dataset_free(ds: *mut MsDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of records in the dataset.
///
/// # Safety
/// `ds` must be a live dataset handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_dataset_size(ds: *const MsDataset, out: *mut u64) -> MsStatus {
    if ds.is_null() || out.is_null() {
        return fail(MsStatus::MsStatusNullPointer, "null pointer");
    }
    *out = (*ds).inner.len() as u64;
    MsStatus::MsStatusOk
}

fn hi_status(e: &HiSplitError) -> MsStatus {
    match e {
        HiSplitError::Infeasible(_) => MsStatus::MsStatusInfeasible,
        HiSplitError::TimeBudgetExceeded => MsStatus::MsStatusTimeBudget,
        _ => MsStatus::MsStatusInputError,
    }
}

/// Dissimilarity-constrained split into `k` rotated folds. `bounds` may be
/// null, in which case equal fractions with slack 0.9 apply.
/// `time_budget_secs <= 0` means unlimited. On success `*out_manifest_json`
/// owns the manifest JSON (free with [`ms_string_free`]).
///
/// # Safety
/// `ds` must be a live handle; `bounds`, when non-null, must point to
/// `bounds_len` readable `uint64_t`s; `out_manifest_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_hi_split(
    ds: *const MsDataset,
    threshold: f64,
    k: u32,
    bounds: *const u64,
    bounds_len: usize,
    time_budget_secs: f64,
    seed: u64,
    out_manifest_json: *mut *mut c_char,
) -> MsStatus {
    if ds.is_null() || out_manifest_json.is_null() {
        return fail(MsStatus::MsStatusNullPointer, "null pointer");
    }
    let dataset = &(*ds).inner;
    let bounds = if bounds.is_null() {
        let fractions = vec![1.0 / f64::from(k.max(1)); k as usize];
        hi_split::default_bounds(dataset.len(), &fractions, 0.9)
    } else {
        std::slice::from_raw_parts(bounds, bounds_len).to_vec()
    };
    guard(|| {
        if k < 2 {
            return fail(MsStatus::MsStatusInputError, "k must be at least 2");
        }
        if bounds.len() != k as usize {
            return fail(MsStatus::MsStatusInputError, "bounds length must equal k");
        }
        let params = HiParams {
            threshold,
            k: k as usize,
            bounds: bounds.clone(),
            time_budget: (time_budget_secs > 0.0).then(|| Duration::from_secs_f64(time_budget_secs)),
            seed,
        };
        match hi_split::hi_split(dataset, &params) {
            Ok(manifest) => export_string(out_manifest_json, manifest.to_json()),
            Err(e) => fail(hi_status(&e), &e.to_string()),
        }
    })
}

/// Random-baseline split that discards leaky test molecules; manifest JSON
/// through `out_manifest_json` as in [`ms_hi_split`].
///
/// # Safety
/// `ds` must be a live handle and `out_manifest_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_greedy_split(
    ds: *const MsDataset,
    threshold: f64,
    test_fraction: f64,
    seed: u64,
    out_manifest_json: *mut *mut c_char,
) -> MsStatus {
    if ds.is_null() || out_manifest_json.is_null() {
        return fail(MsStatus::MsStatusNullPointer, "null pointer");
    }
    let dataset = &(*ds).inner;
    guard(|| {
        if dataset.is_empty() {
            return fail(MsStatus::MsStatusInputError, "dataset is empty");
        }
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return fail(
                MsStatus::MsStatusInputError,
                "test_fraction must be in (0, 1)",
            );
        }
        let manifest = hi_split::greedy_split(dataset, threshold, test_fraction, seed);
        export_string(out_manifest_json, manifest.to_json())
    })
}

/// Similar-molecule cluster extraction. `max_clusters == 0` means
/// unlimited; `folds` re-runs with shifted seeds. Manifest JSON through
/// `out_manifest_json`.
///
/// # Safety
/// `ds` must be a live handle and `out_manifest_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_lo_split(
    ds: *const MsDataset,
    threshold: f64,
    min_cluster_size: u32,
    max_clusters: u64,
    std_threshold: f64,
    folds: u32,
    seed: u64,
    out_manifest_json: *mut *mut c_char,
) -> MsStatus {
    if ds.is_null() || out_manifest_json.is_null() {
        return fail(MsStatus::MsStatusNullPointer, "null pointer");
    }
    let dataset = &(*ds).inner;
    guard(|| {
        if dataset.is_empty() {
            return fail(MsStatus::MsStatusInputError, "dataset is empty");
        }
        if dataset.records.iter().any(|r| r.value.is_none()) {
            return fail(
                MsStatus::MsStatusInputError,
                "lo split needs a value on every record",
            );
        }
        if folds == 0 {
            return fail(MsStatus::MsStatusInputError, "folds must be at least 1");
        }
        let params = LoParams {
            threshold,
            min_cluster_size: min_cluster_size as usize,
            max_clusters: if max_clusters == 0 {
                usize::MAX
            } else {
                max_clusters as usize
            },
            std_threshold,
            seed,
        };
        let manifest = lo_split::lo_split_folds(dataset, &params, folds as usize);
        export_string(out_manifest_json, manifest.to_json())
    })
}

/// Leakage audit between two datasets; report JSON through `out_json`.
///
/// # Safety
/// `train` and `test` must be live handles and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_audit(
    train: *const MsDataset,
    test: *const MsDataset,
    threshold: f64,
    out_json: *mut *mut c_char,
) -> MsStatus {
    if train.is_null() || test.is_null() || out_json.is_null() {
        return fail(MsStatus::MsStatusNullPointer, "null pointer");
    }
    let train = &(*train).inner;
    let test = &(*test).inner;
    guard(
        || match metrics::audit_split(&train.fingerprints(), &test.fingerprints(), threshold) {
            Ok(report) => export_string(out_json, report.to_json()),
            Err(e) => fail(MsStatus::MsStatusInputError, &e.to_string()),
        },
    )
}

/// Greedy count of mutually dissimilar molecules at the threshold.
///
/// # Safety
/// `ds` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_n_circles(
    ds: *const MsDataset,
    threshold: f64,
    out: *mut u64,
) -> MsStatus {
    if ds.is_null() || out.is_null() {
        return fail(MsStatus::MsStatusNullPointer, "null pointer");
    }
    let dataset = &(*ds).inner;
    guard(|| {
        if dataset.is_empty() {
            return fail(MsStatus::MsStatusInputError, "dataset is empty");
        }
        if !(threshold > 0.0 && threshold <= 1.0) {
            return fail(MsStatus::MsStatusInputError, "threshold must be in (0, 1]");
        }
        *out = metrics::n_circles(&dataset.fingerprints(), threshold) as u64;
        MsStatus::MsStatusOk
    })
}

/// Exact solve of a balanced vertex k-cut described as problem JSON
/// (`weights`, `edges`, `k`, `bounds`, optional `time_budget_secs`);
/// solution JSON through `out_json`.
///
/// # Safety
/// `problem_json` must be NUL-terminated and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_kcut_solve(
    problem_json: *const c_char,
    out_json: *mut *mut c_char,
) -> MsStatus {
    if problem_json.is_null() || out_json.is_null() {
        return fail(MsStatus::MsStatusNullPointer, "null pointer");
    }
    let text = match CStr::from_ptr(problem_json).to_str() {
        Ok(t) => t.to_owned(),
        Err(_) => return fail(MsStatus::MsStatusInputError, "problem JSON is not UTF-8"),
    };
    guard(|| {
        let spec: molsplit_core::kcut::ProblemSpec = match serde_json::from_str(&text) {
            Ok(spec) => spec,
            Err(e) => {
                return fail(
                    MsStatus::MsStatusInputError,
                    &format!("invalid problem JSON: {e}"),
                )
            }
        };
        let problem = match spec.into_problem() {
            Ok(p) => p,
            Err(e) => return fail(MsStatus::MsStatusInputError, &e.to_string()),
        };
        match molsplit_core::kcut::solve_balanced_kcut(&problem) {
            Ok(solution) => {
                let json = serde_json::to_string_pretty(&solution).expect("solution serializes");
                export_string(out_json, json)
            }
            Err(e @ SolveError::Infeasible(_)) => {
                fail(MsStatus::MsStatusInfeasible, &e.to_string())
            }
            Err(e @ SolveError::TimeBudgetExceeded) => {
                fail(MsStatus::MsStatusTimeBudget, &e.to_string())
            }
            Err(e) => fail(MsStatus::MsStatusInputError, &e.to_string()),
        }
    })
}
