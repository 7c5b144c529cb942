#ifndef MRCLUSTER_H
#define MRCLUSTER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MRC_ALGORITHM_PARALLEL_LLOYD 0

#define MRC_ALGORITHM_DIVIDE_LLOYD 1

#define MRC_ALGORITHM_DIVIDE_LOCALSEARCH 2

#define MRC_ALGORITHM_SAMPLING_LLOYD 3

#define MRC_ALGORITHM_SAMPLING_LOCALSEARCH 4

#define MRC_ALGORITHM_LOCALSEARCH 5

#define MRC_ALGORITHM_GONZALEZ 6

#define MRC_ALGORITHM_MR_KCENTER 7

typedef enum MrcStatus {
  MRC_STATUS_OK = 0,
  /**
   * Null pointer, out-of-range value or unsupported combination.
   */
  MRC_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Explicit matrix that is not a metric.
   */
  MRC_STATUS_INVALID_METRIC = 2,
  /**
   * A machine exceeded its memory cap.
   */
  MRC_STATUS_MEMORY_VIOLATION = 3,
  /**
   * Sampling stopped making progress.
   */
  MRC_STATUS_STALL = 4,
  /**
   * Malformed dataset file.
   */
  MRC_STATUS_PARSE = 5,
  MRC_STATUS_IO = 6,
  /**
   * Internal error; the library caught a panic.
   */
  MRC_STATUS_INTERNAL = 7,
} MrcStatus;

/**
 * Opaque dataset handle.
 */
typedef struct MrcDataset MrcDataset;

/**
 * Opaque result handle.
 */
typedef struct MrcResult MrcResult;

typedef struct MrcGenerateOptions {
  size_t n;
  size_t k_true;
  double zipf_alpha;
  /**
   * Non-zero weights cluster i by i^-alpha instead of i^alpha.
   */
  int32_t zipf_decreasing;
  double sigma;
  size_t dim;
  uint64_t seed;
} MrcGenerateOptions;

typedef struct MrcRunOptions {
  /**
   * One of the `MRC_ALGORITHM_*` constants.
   */
  uint32_t algorithm;
  size_t k;
  double epsilon;
  size_t machines;
  /**
   * Zero means no cap.
   */
  uint64_t memory_cap_words;
  uint64_t seed;
  /**
   * Non-zero charges simulated time by words instead of wall time.
   */
  int32_t deterministic_time;
  size_t lloyd_max_iterations;
  double lloyd_tolerance;
  double local_search_factor;
} MrcRunOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *mrc_last_error(void);

/**
 * Loads a dataset file (euclidean `n d` header or explicit `n` header).
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum MrcStatus mrc_dataset_load(const char *path, struct MrcDataset **out);

/**
 * Euclidean dataset from `n * dim` row-major coordinates.
 *
 * # Safety
 * `coords` must point to `n * dim` doubles and `out` must be valid.
 */
enum MrcStatus mrc_dataset_from_points(const double *coords,
                                       size_t n,
                                       size_t dim,
                                       struct MrcDataset **out);

/**
 * Explicit-metric dataset from an `n * n` row-major distance matrix.
 *
 * # Safety
 * `matrix` must point to `n * n` doubles and `out` must be valid.
 */
enum MrcStatus mrc_dataset_from_matrix(const double *matrix, size_t n, struct MrcDataset **out);

/**
 * Default generator options: 10000 points, 25 clusters, alpha 0,
 * sigma 0.1, three dimensions, seed 0.
 */
struct MrcGenerateOptions mrc_generate_options_default(void);

/**
 * Synthetic clustered dataset.
 *
 * # Safety
 * `options` and `out` must be valid pointers.
 */
enum MrcStatus mrc_dataset_generate(const struct MrcGenerateOptions *options,
                                    struct MrcDataset **out);

/**
 * Number of points; zero for a null handle.
 *
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t mrc_dataset_len(const struct MrcDataset *dataset);

/**
 * Writes the dataset in its file format.
 *
 * # Safety
 * `dataset` must be a live handle and `path` a nul-terminated string.
 */
enum MrcStatus mrc_dataset_save(const struct MrcDataset *dataset, const char *path);

/**
 * # Safety
 * `dataset` must be null or a handle not yet freed.
 */
void mrc_dataset_free(struct MrcDataset *dataset);

/**
 * Distance between points `a` and `b`.
 *
 * # Safety
 * `dataset` must be a live handle and `out` a valid pointer.
 */
enum MrcStatus mrc_dataset_distance(const struct MrcDataset *dataset,
                                    uint32_t a,
                                    uint32_t b,
                                    double *out);

/**
 * Defaults: sampling local search, k 25, epsilon 0.1, 100 machines, no
 * memory cap, seed 0, wall-clock time.
 */
struct MrcRunOptions mrc_run_options_default(void);

/**
 * Runs an algorithm. The seed drives the cluster, the sampling coins and
 * the inner clusterer.
 *
 * # Safety
 * `dataset` must be a live handle; `options` and `out` valid pointers.
 */
enum MrcStatus mrc_run(const struct MrcDataset *dataset,
                       const struct MrcRunOptions *options,
                       struct MrcResult **out);

/**
 * Objective over all points; NaN for a null handle.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double mrc_result_objective(const struct MrcResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t mrc_result_center_count(const struct MrcResult *result);

/**
 * Copies the center ids, sorted ascending, into `out`.
 *
 * # Safety
 * `result` must be a live handle and `out` must hold `capacity` ids.
 */
enum MrcStatus mrc_result_centers(const struct MrcResult *result, uint32_t *out, size_t capacity);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t mrc_result_rounds(const struct MrcResult *result);

/**
 * Largest per-machine memory over all rounds, in words.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
uint64_t mrc_result_peak_words(const struct MrcResult *result);

/**
 * Simulated time: per round the slowest machine, summed over rounds.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double mrc_result_sim_time(const struct MrcResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t mrc_result_sample_size(const struct MrcResult *result);

/**
 * Per-machine trace as CSV; free with [`mrc_string_free`]. Null on a null
 * handle.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
char *mrc_result_trace_csv(const struct MrcResult *result);

/**
 * # Safety
 * `result` must be null or a handle not yet freed.
 */
void mrc_result_free(struct MrcResult *result);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void mrc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MRCLUSTER_H */
