/* C interface for the molsplit toolkit. */

#ifndef MOLSPLIT_H
#define MOLSPLIT_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared with the command line's exit codes where possible.
 */
typedef enum {
  MS_STATUS_OK = 0,
  MS_STATUS_INPUT_ERROR = 1,
  MS_STATUS_INFEASIBLE = 2,
  MS_STATUS_TIME_BUDGET = 3,
  MS_STATUS_NULL_POINTER = 4,
  MS_STATUS_PANIC = 5,
} MsStatus;

/**
 * Dataset input formats accepted by [`ms_dataset_load`].
 */
typedef enum {
  MS_DATASET_SMILES_CSV = 0,
  MS_DATASET_FINGERPRINT_CSV = 1,
} MsDatasetFormat;

/**
 * Opaque dataset handle; create with [`ms_dataset_load`], release with
 * [`ms_dataset_free`].
 */
typedef struct MsDataset MsDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *ms_version(void);

/**
 * Description of the most recent failure on this thread; valid until the
 * next failing call on the same thread. Do not free.
 */
const char *ms_last_error(void);

/**
 * Release a string returned through an out-pointer by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library and not yet
 * freed; null is a no-op.
 */
void ms_string_free(char *s);

/**
 * Load a dataset from a CSV file. `radius`/`nbits` configure fingerprint
 * generation for SMILES inputs (use 2/1024 for the defaults). On success
 * `*out` owns the new handle.
 *
 * # Safety
 * `path` must point to a NUL-terminated string and `out` to writable
 * pointer-sized memory.
 */
MsStatus ms_dataset_load(const char *path,
                         MsDatasetFormat format,
                         uint32_t radius,
                         uint32_t nbits,
                         MsDataset **out);

/**
 * Release a dataset handle; null is a no-op.
 *
 * # Safety
 * `ds` must be a handle from [`ms_dataset_load`], not yet freed.
 */
void ms_dataset_free(MsDataset *ds);

/**
 * Number of records in the dataset.
 *
 * # Safety
 * `ds` must be a live dataset handle, `out` writable.
 */
MsStatus ms_dataset_size(const MsDataset *ds, uint64_t *out);

/**
 * Dissimilarity-constrained split into `k` rotated folds. `bounds` may be
 * null, in which case equal fractions with slack 0.9 apply.
 * `time_budget_secs <= 0` means unlimited. On success `*out_manifest_json`
 * owns the manifest JSON (free with [`ms_string_free`]).
 *
 * # Safety
 * `ds` must be a live handle; `bounds`, when non-null, must point to
 * `bounds_len` readable `uint64_t`s; `out_manifest_json` must be writable.
 */
MsStatus ms_hi_split(const MsDataset *ds,
                     double threshold,
                     uint32_t k,
                     const uint64_t *bounds,
                     size_t bounds_len,
                     double time_budget_secs,
                     uint64_t seed,
                     char **out_manifest_json);

/**
 * Random-baseline split that discards leaky test molecules; manifest JSON
 * through `out_manifest_json` as in [`ms_hi_split`].
 *
 * # Safety
 * `ds` must be a live handle and `out_manifest_json` writable.
 */
MsStatus ms_greedy_split(const MsDataset *ds,
                         double threshold,
                         double test_fraction,
                         uint64_t seed,
                         char **out_manifest_json);

/**
 * Similar-molecule cluster extraction. `max_clusters == 0` means
 * unlimited; `folds` re-runs with shifted seeds. Manifest JSON through
 * `out_manifest_json`.
 *
 * # Safety
 * `ds` must be a live handle and `out_manifest_json` writable.
 */
MsStatus ms_lo_split(const MsDataset *ds,
                     double threshold,
                     uint32_t min_cluster_size,
                     uint64_t max_clusters,
                     double std_threshold,
                     uint32_t folds,
                     uint64_t seed,
                     char **out_manifest_json);

/**
 * Leakage audit between two datasets; report JSON through `out_json`.
 *
 * # Safety
 * `train` and `test` must be live handles and `out_json` writable.
 */
MsStatus ms_audit(const MsDataset *train, const MsDataset *test, double threshold, char **out_json);

/**
 * Greedy count of mutually dissimilar molecules at the threshold.
 *
 * # Safety
 * `ds` must be a live handle and `out` writable.
 */
MsStatus ms_n_circles(const MsDataset *ds, double threshold, uint64_t *out);

/**
 * Exact solve of a balanced vertex k-cut described as problem JSON
 * (`weights`, `edges`, `k`, `bounds`, optional `time_budget_secs`);
 * solution JSON through `out_json`.
 *
 * # Safety
 * `problem_json` must be NUL-terminated and `out_json` writable.
 */
MsStatus ms_kcut_solve(const char *problem_json, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOLSPLIT_H */
