#ifndef ANGLEMIN_H
#define ANGLEMIN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum AmStatus {
  AM_STATUS_OK = 0,
  AM_STATUS_NULL_POINTER = 1,
  AM_STATUS_INVALID_INPUT = 2,
  AM_STATUS_MISSING_LABELED_COMMUNITY = 3,
  AM_STATUS_ZERO_VECTOR = 4,
  AM_STATUS_SPECTRAL_FAILURE = 5,
  AM_STATUS_PANIC = 99,
} AmStatus;

/**
 * Classifier family.
 */
typedef enum AmMethod {
  /**
   * Angles between raw edge vectors.
   */
  AM_METHOD_ANGLE_MIN = 0,
  /**
   * Angles after projecting onto labeled sums and an unlabeled projector.
   */
  AM_METHOD_ANGLE_MIN_PLUS = 1,
  /**
   * Angles using only edges among labeled nodes.
   */
  AM_METHOD_ANGLE_MIN_PLUS_SUBNETWORK = 2,
} AmMethod;

/**
 * Projector used by `AngleMinPlus`.
 */
typedef enum AmProjector {
  AM_PROJECTOR_PARTITION_INDICATOR = 0,
  AM_PROJECTOR_DEGREE_WEIGHTED_PARTITION = 1,
  AM_PROJECTOR_SPECTRAL_EMBEDDING = 2,
} AmProjector;

/**
 * Classifier fitted to a network.
 */
typedef struct AmClassifier AmClassifier;

/**
 * Observed network with partial labels.
 */
typedef struct AmNetwork AmNetwork;

/**
 * Outcome of one classification besides the angles.
 */
typedef struct AmClassification {
  size_t label;
  /**
   * Nonzero when several communities share the smallest angle.
   */
  uint8_t tie;
  /**
   * Nonzero when the majority label of labeled neighbors was used.
   */
  uint8_t fallback;
} AmClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *am_last_error_message(void);

/**
 * Library version as a NUL-terminated string.
 */
const char *am_version(void);

/**
 * Builds a network on `n` nodes from `n_edges` undirected edges
 * `(edges_u[i], edges_v[i])` and `n_labeled` labeled nodes
 * `labeled_nodes[i]` with communities `labeled_communities[i] < k`.
 * Self-loops and repeated edges are ignored.
 *
 * # Safety
 * Array arguments must be valid for the stated lengths; `out` must be a
 * valid pointer. Release the result with [`am_network_free`].
 */
enum AmStatus am_network_new(size_t n,
                             const size_t *edges_u,
                             const size_t *edges_v,
                             size_t n_edges,
                             size_t k,
                             const size_t *labeled_nodes,
                             const size_t *labeled_communities,
                             size_t n_labeled,
                             struct AmNetwork **out);

/**
 * # Safety
 * `net` must be null or a handle from [`am_network_new`] not yet freed.
 */
void am_network_free(struct AmNetwork *net);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t am_network_num_nodes(const struct AmNetwork *net);

/**
 * Fits a classifier. `projector` and `seed` only matter for
 * `AngleMinPlus`.
 *
 * # Safety
 * `net` must be a live handle and `out` a valid pointer. Release the result
 * with [`am_classifier_free`].
 */
enum AmStatus am_classifier_fit(const struct AmNetwork *net,
                                enum AmMethod method,
                                enum AmProjector projector,
                                uint64_t seed,
                                struct AmClassifier **out);

/**
 * Number of communities of a fitted classifier, or 0 for a null handle.
 *
 * # Safety
 * `clf` must be null or a live handle.
 */
size_t am_classifier_num_communities(const struct AmClassifier *clf);

/**
 * Classifies a new node linked to the existing nodes `neighbors`. Writes
 * the result to `out` and, when `angles` is non-null, the angle to each
 * community (NaN where undefined) to `angles[0..K]`.
 *
 * # Safety
 * `clf` must be a live handle, `neighbors` valid for `n_neighbors` reads,
 * `out` valid, and `angles` null or valid for K writes.
 */
enum AmStatus am_classifier_classify(const struct AmClassifier *clf,
                                     const size_t *neighbors,
                                     size_t n_neighbors,
                                     struct AmClassification *out,
                                     double *angles);

/**
 * # Safety
 * `clf` must be null or a handle from [`am_classifier_fit`] not yet freed.
 */
void am_classifier_free(struct AmClassifier *clf);

/**
 * Angle in radians between two nonzero vectors of length `len`.
 *
 * # Safety
 * `u` and `v` must be valid for `len` reads and `out` for one write.
 */
enum AmStatus am_angle(const double *u, const double *v, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANGLEMIN_H */
