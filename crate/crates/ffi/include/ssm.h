#ifndef SSM_H
#define SSM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. `SSM_STATUS_OK` is zero; everything else has a message.
typedef enum SsmStatus {
  SSM_STATUS_OK = 0,
  SSM_STATUS_NULL_POINTER = 1,
  SSM_STATUS_INVALID_UTF8 = 2,
  SSM_STATUS_PARSE = 3,
  SSM_STATUS_INVALID_ARGUMENT = 4,
  SSM_STATUS_TOO_LARGE = 5,
  SSM_STATUS_NEAR_ZERO_DENOMINATOR = 6,
  SSM_STATUS_ZERO_REGION_VIOLATION = 7,
  SSM_STATUS_DEPTH_EXCEEDED = 8,
  SSM_STATUS_HYPOTHESIS = 9,
  SSM_STATUS_BUFFER_TOO_SMALL = 10,
  SSM_STATUS_OVERFLOW = 11,
  SSM_STATUS_PANIC = 12,
} SsmStatus;

// Opaque graph handle.
typedef struct SsmGraph SsmGraph;

// Result of [`ssm_approx_cond_prob`].
typedef struct SsmApprox {
  double value;
  double error_bound;
  double m;
  double radius;
  size_t depth;
} SsmApprox;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string. The pointer stays
// valid until the next call into this library on the same thread.
const char *ssm_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ssm_version(void);

// Parses the edge-list format (vertex count, then one `u v` pair per line).
//
// # Safety
// `text` must be a NUL-terminated string and `out_graph` a valid pointer.
enum SsmStatus ssm_graph_from_edge_list(const char *text, struct SsmGraph **out_graph);

// Releases a handle. Null is accepted and ignored.
//
// # Safety
// `g` must come from [`ssm_graph_from_edge_list`] and not be used afterwards.
void ssm_graph_free(struct SsmGraph *g);

// # Safety
// `g` must be a live handle and `out_n` a valid pointer.
enum SsmStatus ssm_graph_vertex_count(const struct SsmGraph *g, size_t *out_n);

// # Safety
// `g` must be a live handle and `out_m` a valid pointer.
enum SsmStatus ssm_graph_edge_count(const struct SsmGraph *g, size_t *out_m);

// Coefficients of the independence polynomial, constant term first. `out_len` always gets
// the full length; if it exceeds `capacity`, nothing is written and `BufferTooSmall` is returned.
//
// # Safety
// `coeffs` must have room for `capacity` values (it may be null when `capacity` is 0).
enum SsmStatus ssm_ind_poly(const struct SsmGraph *g,
                            uint64_t *coeffs,
                            size_t capacity,
                            size_t *out_len);

// `Z_G(lambda)` at the complex activity `re + i im`.
//
// # Safety
// `g` must be a live handle and the out-pointers valid.
enum SsmStatus ssm_eval_z(const struct SsmGraph *g,
                          double re,
                          double im,
                          double *out_re,
                          double *out_im);

// `P_{G,v}(lambda) = lambda Z_{G - N[v]} / Z_G`.
//
// # Safety
// `g` must be a live handle and the out-pointers valid.
enum SsmStatus ssm_ratio_p(const struct SsmGraph *g,
                           size_t v,
                           double re,
                           double im,
                           double *out_re,
                           double *out_im);

// Taylor coefficients `0..=order` of `P_{G,v}`. `method` is 0 for the cluster expansion and
// 1 for polynomial division. Both arrays need room for `order + 1` values.
//
// # Safety
// `g` must be a live handle; `out_re` and `out_im` must hold `capacity` values.
enum SsmStatus ssm_ratio_series(const struct SsmGraph *g,
                                size_t v,
                                size_t order,
                                uint32_t method,
                                double *out_re,
                                double *out_im,
                                size_t capacity);

// Exact `Pr[v in I | sigma]`. `boundary` uses the "vertex value" line format; null means
// no boundary.
//
// # Safety
// `g` must be a live handle, `boundary` null or NUL-terminated, `out_p` valid.
enum SsmStatus ssm_cond_prob(const struct SsmGraph *g,
                             size_t v,
                             const char *boundary,
                             double lambda,
                             double *out_p);

// Interpolated `Pr[v in I | sigma]` to within `eps_target`, through a strip of width
// `eps_region` around `[0, lambda]`.
//
// # Safety
// `g` must be a live handle, `boundary` null or NUL-terminated, `out_result` valid.
enum SsmStatus ssm_approx_cond_prob(const struct SsmGraph *g,
                                    size_t v,
                                    const char *boundary,
                                    double lambda,
                                    double eps_target,
                                    double eps_region,
                                    struct SsmApprox *out_result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSM_H */
