#ifndef HDX_H
#define HDX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HdxMode {
  HDX_MODE_COBOUNDARY = 0,
  HDX_MODE_COSYSTOLIC = 1,
} HdxMode;

typedef enum HdxStatus {
  HDX_STATUS_OK = 0,
  HDX_STATUS_NULL_POINTER = 1,
  HDX_STATUS_INVALID_ARGUMENT = 2,
  HDX_STATUS_PARSE = 3,
  HDX_STATUS_TOO_LARGE = 4,
  HDX_STATUS_FAILED = 5,
  HDX_STATUS_PANIC = 6,
} HdxStatus;

/*
 Opaque handle to a weighted pure complex.
 */
typedef struct HdxComplex HdxComplex;

/*
 Exact h^1 value. `defined` is false when no cochain constrains the constant.
 */
typedef struct HdxRational {
  int64_t numerator;
  int64_t denominator;
  bool defined;
} HdxRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *hdx_version(void);

/*
 Message of the last failed call on this thread, empty after a success.
 Valid until the next call into the library on the same thread.
 */
const char *hdx_last_error(void);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void hdx_string_free(char *s);

/*
 The `d`-skeleton of the simplex on `n` vertices with uniform weights.

 # Safety
 `out` must be a valid pointer.
 */
enum HdxStatus hdx_complex_complete(size_t n, size_t d, struct HdxComplex **out);

/*
 Parses a complex from its JSON form.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HdxStatus hdx_complex_from_json(const char *json, struct HdxComplex **out);

/*
 Serializes a complex; release the string with [`hdx_string_free`].

 # Safety
 `c` must be a live handle and `out` a valid pointer.
 */
enum HdxStatus hdx_complex_to_json(const struct HdxComplex *c, char **out);

/*
 # Safety
 `c` must be null or a handle from this library, not yet freed.
 */
void hdx_complex_free(struct HdxComplex *c);

/*
 # Safety
 `c` must be a live handle; returns 0 for null.
 */
size_t hdx_complex_vertex_count(const struct HdxComplex *c);

/*
 # Safety
 `c` must be a live handle; returns 0 for null.
 */
size_t hdx_complex_dimension(const struct HdxComplex *c);

/*
 Second largest eigenvalue of the random walk on the underlying graph.

 # Safety
 `c` must be a live handle and `out` a valid pointer.
 */
enum HdxStatus hdx_complex_lambda2(const struct HdxComplex *c, double *out);

/*
 Exact h^1 of the 2-skeleton by exhaustive search. `group` is `z2`, `z:m` or `sym:l`.

 # Safety
 `c` must be a live handle, `group` a NUL-terminated string and `out` a valid pointer.
 */
enum HdxStatus hdx_complex_h1(const struct HdxComplex *c,
                              const char *group,
                              enum HdxMode mode,
                              struct HdxRational *out);

/*
 Runs a named experiment suite and hands back its JSON report. `passed`
 receives whether every asserted check held.

 # Safety
 `name` must be a NUL-terminated string; `out` and `passed` valid pointers.
 */
enum HdxStatus hdx_suite_run(const char *name, uint64_t seed, char **out, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HDX_H */
