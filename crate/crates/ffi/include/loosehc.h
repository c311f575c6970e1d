#ifndef LOOSEHC_H
#define LOOSEHC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum LhcStatus {
  LHC_STATUS_OK = 0,
  LHC_STATUS_NULL_POINTER = 1,
  LHC_STATUS_INVALID_ARGUMENT = 2,
  LHC_STATUS_DIVISIBILITY = 3,
  LHC_STATUS_OUTSIDE_DOMAIN = 4,
  LHC_STATUS_REJECTION_CAP_EXCEEDED = 5,
  LHC_STATUS_BUFFER_TOO_SMALL = 6,
  LHC_STATUS_OUT_OF_RANGE = 7,
  LHC_STATUS_INTERNAL = 8,
} LhcStatus;

/**
 * Opaque k-uniform hypergraph.
 */
typedef struct LhcHypergraph LhcHypergraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length
 * including the terminator.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t lhc_last_error_message(char *buf, size_t len);

/**
 * Samples `H(n, p; k)` with the given seed.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LhcStatus lhc_hypergraph_generate(size_t n,
                                       size_t k,
                                       double p,
                                       uint64_t seed,
                                       struct LhcHypergraph **out);

/**
 * The complete k-uniform hypergraph on `n` vertices.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LhcStatus lhc_hypergraph_complete(size_t n, size_t k, struct LhcHypergraph **out);

/**
 * Builds a hypergraph from `edge_count` edges stored row-major in
 * `vertices` (`edge_count * k` one-based labels).
 *
 * # Safety
 * `vertices` must be valid for `edge_count * k` reads; `out` for writes.
 */
enum LhcStatus lhc_hypergraph_from_edges(size_t n,
                                         size_t k,
                                         const uint32_t *vertices,
                                         size_t edge_count,
                                         struct LhcHypergraph **out);

/**
 * Releases a hypergraph handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle returned by this library, not yet freed.
 */
void lhc_hypergraph_free(struct LhcHypergraph *h);

/**
 * Vertex count, uniformity and edge count of a hypergraph.
 *
 * # Safety
 * `h` must be a live handle; the out pointers must be valid for writes.
 */
enum LhcStatus lhc_hypergraph_shape(const struct LhcHypergraph *h,
                                    size_t *n,
                                    size_t *k,
                                    size_t *edge_count);

/**
 * Copies the `index`-th edge (in sorted order) into `vertices`, which must
 * hold at least `k` entries.
 *
 * # Safety
 * `h` must be a live handle; `vertices` valid for `len` writes.
 */
enum LhcStatus lhc_hypergraph_edge(const struct LhcHypergraph *h,
                                   size_t index,
                                   uint32_t *vertices,
                                   size_t len);

/**
 * Searches for a loose Hamilton cycle. On success `*found` tells whether
 * one exists and, if so, its cyclic vertex order is written to `order`
 * (which must hold `n` entries).
 *
 * # Safety
 * `h` must be a live handle; `order` valid for `len` writes; `found` for a
 * write.
 */
enum LhcStatus lhc_find_loose_hamilton(const struct LhcHypergraph *h,
                                       uint32_t *order,
                                       size_t len,
                                       bool *found);

/**
 * Number of distinct loose Hamilton cycles.
 *
 * # Safety
 * `h` must be a live handle; `count` valid for a write.
 */
enum LhcStatus lhc_count_loose_hamilton(const struct LhcHypergraph *h, uint64_t *count);

/**
 * Samples `Λ_d` and returns it as a simple hypergraph on `2m + 2κm`
 * vertices, with the number of rejected configurations.
 *
 * # Safety
 * `out` must be valid for writes; `rejections` may be null.
 */
enum LhcStatus lhc_lambda_sample(size_t m,
                                 size_t d,
                                 size_t kappa,
                                 uint64_t seed,
                                 struct LhcHypergraph **out,
                                 uint64_t *rejections);

/**
 * `g(x, y)` on the closed domain `0 ≤ x ≤ y ≤ 1−x`.
 *
 * # Safety
 * `value` must be valid for a write.
 */
enum LhcStatus lhc_g(double x, double y, uint32_t d, uint32_t kappa, double *value);

/**
 * Gradient of `g` on the open domain.
 *
 * # Safety
 * `gx` and `gy` must be valid for writes.
 */
enum LhcStatus lhc_grad_g(double x, double y, uint32_t d, uint32_t kappa, double *gx, double *gy);

/**
 * Hessian of `g`, written row-major into `out[0..4]`.
 *
 * # Safety
 * `out` must be valid for 4 writes.
 */
enum LhcStatus lhc_hessian_g(double x, double y, uint32_t d, uint32_t kappa, double *out);

/**
 * `q = 1 − (1−p)^{1/exponent}`.
 *
 * # Safety
 * `q` must be valid for a write.
 */
enum LhcStatus lhc_split_probability(double p, uint64_t exponent, double *q);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lhc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOOSEHC_H */
