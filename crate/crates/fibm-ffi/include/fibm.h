/* C interface for the fair influence blocking maximization toolkit. */

#ifndef FIBM_H
#define FIBM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Seed selection strategy.
typedef enum FibmSelector {
  FibmSelector_CelfR = 0,
  FibmSelector_Celf = 1,
  FibmSelector_Fc = 2,
} FibmSelector;

// Status code of every fallible call.
typedef enum FibmStatus {
  FibmStatus_Ok = 0,
  FibmStatus_NullArgument = 1,
  FibmStatus_InvalidUtf8 = 2,
  FibmStatus_ParseError = 3,
  FibmStatus_InvalidInput = 4,
  FibmStatus_IoError = 5,
  FibmStatus_BufferTooSmall = 6,
  FibmStatus_ValidationFailed = 7,
} FibmStatus;

typedef struct FibmGraph FibmGraph;

typedef struct FibmIndex FibmIndex;

typedef struct FibmPartition FibmPartition;

// Summary metrics of a selection run.
typedef struct FibmMetrics {
  // Blocking effectiveness F of the final seed set.
  double effectiveness;
  // Fairness objective W of the final seed set.
  double fairness;
  // Scalarized objective K = beta*W + (1-beta)*F.
  double objective;
  // Demographic parity gap (max - min blocked ratio).
  double dp_gap;
  // Empirical approximation-degradation bound psi_k.
  double psi;
  // Largest observed submodularity violation.
  double eps_max;
  // Total marginal-gain evaluations.
  uint64_t evaluations;
  // True when selection stopped before reaching the budget.
  bool stopped_early;
} FibmMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message for this thread, valid until the next failing call.
const char *fibm_last_error_message(void);

// Crate version as a static NUL-terminated string.
const char *fibm_version(void);

// Load an edge list (`u v [w]` lines). With `uniform_weights` every arc into
// `v` gets weight `1/in-degree(v)`; otherwise the third column is required.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer. On
// success `*out` owns a graph that must be released with `fibm_graph_free`.
enum FibmStatus fibm_graph_load(const char *path,
                                bool directed,
                                bool uniform_weights,
                                struct FibmGraph **out);

// # Safety
// `graph` must come from `fibm_graph_load` and not already be freed.
void fibm_graph_free(struct FibmGraph *graph);

// # Safety
// `graph` must be a live handle (or null, which yields 0).
uint64_t fibm_graph_node_count(const struct FibmGraph *graph);

// # Safety
// `graph` must be a live handle (or null, which yields 0).
uint64_t fibm_graph_arc_count(const struct FibmGraph *graph);

// Load a community file (`node_id label` lines) covering every graph node.
//
// # Safety
// `path` must be NUL-terminated, `graph` a live handle, `out` valid. On
// success `*out` must be released with `fibm_partition_free`.
enum FibmStatus fibm_partition_load(const char *path,
                                    const struct FibmGraph *graph,
                                    struct FibmPartition **out);

// # Safety
// `partition` must come from `fibm_partition_load` and not already be freed.
void fibm_partition_free(struct FibmPartition *partition);

// # Safety
// `partition` must be a live handle (or null, which yields 0).
uint64_t fibm_partition_community_count(const struct FibmPartition *partition);

// The `size` highest-total-degree nodes (ties to the lower id), written as
// external ids into `out_ids`.
//
// # Safety
// `graph` must be live and `out_ids` must point to at least `capacity`
// writable u64 slots; `written` receives the count when non-null.
enum FibmStatus fibm_top_degree_seeds(const struct FibmGraph *graph,
                                      uint64_t size,
                                      uint64_t *out_ids,
                                      size_t capacity,
                                      size_t *written);

// Sample the VRR path index for the given negative seeds (external ids).
//
// # Safety
// `graph` and `partition` must be live handles built from the same inputs,
// `negative_ids` must point to `negative_count` readable u64 values, and
// `out` must be valid. On success `*out` must be released with
// `fibm_index_free`.
enum FibmStatus fibm_index_build(const struct FibmGraph *graph,
                                 const struct FibmPartition *partition,
                                 const uint64_t *negative_ids,
                                 size_t negative_count,
                                 uint64_t samples_per_root,
                                 uint64_t rng_seed,
                                 struct FibmIndex **out);

// # Safety
// `index` must come from `fibm_index_build` and not already be freed.
void fibm_index_free(struct FibmIndex *index);

// Estimated negative spread σ̂(S_N, G) of the sampled index.
//
// # Safety
// `index` must be live; `out_total` receives the estimate when non-null.
enum FibmStatus fibm_index_negative_spread(const struct FibmIndex *index, double *out_total);

// Select up to `budget` positive seeds maximizing K = beta*W + (1-beta)*F.
// The index state is snapshotted and restored, so the handle can be reused
// across calls (one sampling, many selections). Seeds are written as
// external ids.
//
// # Safety
// `index` must be live and not used concurrently from other threads;
// `out_seeds` must point to at least `capacity` writable u64 slots;
// `out_len` and `out_metrics` receive results when non-null.
enum FibmStatus fibm_select(struct FibmIndex *index,
                            uint64_t budget,
                            double alpha,
                            double beta,
                            enum FibmSelector selector,
                            uint64_t *out_seeds,
                            size_t capacity,
                            size_t *out_len,
                            struct FibmMetrics *out_metrics);

// Monte Carlo blocked spread σ⁻(S_P) with common random numbers; also
// reports the unblocked baseline σ(S_N, G).
//
// # Safety
// `graph` and `partition` must be live and consistent; the id arrays must
// point to the stated numbers of readable u64 values; output pointers
// receive results when non-null.
enum FibmStatus fibm_blocked_spread_mc(const struct FibmGraph *graph,
                                       const struct FibmPartition *partition,
                                       const uint64_t *negative_ids,
                                       size_t negative_count,
                                       const uint64_t *positive_ids,
                                       size_t positive_count,
                                       uint64_t runs,
                                       uint64_t rng_seed,
                                       double *out_blocked,
                                       double *out_baseline);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FIBM_H */
