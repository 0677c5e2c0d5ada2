#ifndef KACFUSION_H
#define KACFUSION_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KfStatus {
  KF_STATUS_OK = 0,
  KF_STATUS_NULL_POINTER = 1,
  KF_STATUS_INVALID_ARGUMENT = 2,
  KF_STATUS_OUT_OF_RANGE = 3,
  KF_STATUS_COMPUTATION_ERROR = 4,
  KF_STATUS_HYPOTHESIS_VIOLATED = 5,
  KF_STATUS_PANIC = 6,
} KfStatus;

typedef struct KfFusion KfFusion;

typedef struct KfRootSystem KfRootSystem;

typedef struct KfSMatrix KfSMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *kf_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library.
void kf_string_free(char *s);

// # Safety
// `type_name` must be a NUL-terminated string; `out` must be writable.
enum KfStatus kf_rootsys_new(const char *type_name, struct KfRootSystem **out);

// # Safety
// `h` must be null or a live handle from `kf_rootsys_new`.
void kf_rootsys_free(struct KfRootSystem *h);

// Rank, or 0 for a null handle.
//
// # Safety
// `h` must be null or a live handle.
size_t kf_rootsys_dim(const struct KfRootSystem *h);

// # Safety
// `h` must be a live handle; `out` must be writable.
enum KfStatus kf_rootsys_dual_coxeter(const struct KfRootSystem *h, int64_t *out);

// # Safety
// `h` must be a live handle; `out` receives a string for `kf_string_free`.
enum KfStatus kf_rootsys_to_json(const struct KfRootSystem *h, char **out);

// Admissible S-matrix at `k + h∨ = p/q`.
//
// # Safety
// `rs` must be a live handle; `out` must be writable.
enum KfStatus kf_smatrix_new(const struct KfRootSystem *rs,
                             int64_t p,
                             int64_t q,
                             struct KfSMatrix **out);

// W-algebra S-matrix on `I_{p,q}`.
//
// # Safety
// `rs` must be a live handle; `out` must be writable.
enum KfStatus kf_wsmatrix_new(const struct KfRootSystem *rs,
                              int64_t p,
                              int64_t q,
                              struct KfSMatrix **out);

// # Safety
// `h` must be null or a live handle.
void kf_smatrix_free(struct KfSMatrix *h);

// Number of labels, or 0 for a null handle.
//
// # Safety
// `h` must be null or a live handle.
size_t kf_smatrix_dim(const struct KfSMatrix *h);

// # Safety
// `h` must be a live handle; `re` and `im` must be writable.
enum KfStatus kf_smatrix_entry(const struct KfSMatrix *h,
                               size_t i,
                               size_t j,
                               double *re,
                               double *im);

// # Safety
// `h` must be a live handle; `out` receives a string for `kf_string_free`.
enum KfStatus kf_smatrix_label(const struct KfSMatrix *h, size_t i, char **out);

// # Safety
// `h` must be a live handle; `out` receives a string for `kf_string_free`.
enum KfStatus kf_smatrix_to_json(const struct KfSMatrix *h, char **out);

// Verlinde fusion of the W-algebra at `k + h∨ = p/q`.
//
// # Safety
// `rs` must be a live handle; `out` must be writable.
enum KfStatus kf_fusion_new(const struct KfRootSystem *rs,
                            int64_t p,
                            int64_t q,
                            struct KfFusion **out);

// Verlinde fusion at a nonnegative integrable level.
//
// # Safety
// `rs` must be a live handle; `out` must be writable.
enum KfStatus kf_fusion_integrable_new(const struct KfRootSystem *rs,
                                       int64_t level,
                                       struct KfFusion **out);

// # Safety
// `h` must be null or a live handle.
void kf_fusion_free(struct KfFusion *h);

// Number of labels, or 0 for a null handle.
//
// # Safety
// `h` must be null or a live handle.
size_t kf_fusion_dim(const struct KfFusion *h);

// `N_{a,b}^c`.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum KfStatus kf_fusion_entry(const struct KfFusion *h, size_t a, size_t b, size_t c, int64_t *out);

// # Safety
// `h` must be a live handle; `out` receives a string for `kf_string_free`.
enum KfStatus kf_fusion_to_json(const struct KfFusion *h, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KACFUSION_H */
