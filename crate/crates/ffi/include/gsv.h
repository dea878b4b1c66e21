#ifndef GSV_H
#define GSV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  GSV_CATEGORY_EXP_ERROR = 0,
  GSV_CATEGORY_POLY_ERROR = 1,
  GSV_CATEGORY_NON_EXTRACTABLE = 2,
} GsvCategory;

typedef enum {
  GSV_STATUS_OK = 0,
  GSV_STATUS_NULL_POINTER = 1,
  GSV_STATUS_INVALID_UTF8 = 2,
  GSV_STATUS_PARSE = 3,
  GSV_STATUS_INVALID_SOURCE = 4,
  GSV_STATUS_PARAMETER = 5,
  GSV_STATUS_NOT_EXTRACTABLE = 6,
  GSV_STATUS_NOT_NK_PLUS = 7,
  GSV_STATUS_EPSILON_TOO_LARGE = 8,
  GSV_STATUS_TREE_LIMIT = 9,
  GSV_STATUS_LIMIT = 10,
  GSV_STATUS_PANIC = 11,
} GsvStatus;

// Opaque source handle.
typedef struct GsvSource GsvSource;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; empty after a
// successful call. Valid until the next call on the same thread.
const char *gsv_last_error_message(void);

// Parses a source from JSON (`{"faces": [...], "dice": [[...], ...]}` with
// probabilities as `"p/q"` strings or integers).
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
GsvStatus gsv_source_from_json(const char *json, GsvSource **out);

// Builds one of the bundled sources: `e1`, `e2`, `fair-coin`, `two-dice`,
// `sv` or `sv:<delta>`.
//
// # Safety
// `name` must be a valid NUL-terminated string and `out` a valid pointer.
GsvStatus gsv_source_preset(const char *name, GsvSource **out);

// # Safety
// `source` must be null or a handle not yet freed.
void gsv_source_free(GsvSource *source);

// # Safety
// `source` must be null or a live handle.
size_t gsv_source_num_faces(const GsvSource *source);

// # Safety
// `source` must be null or a live handle.
size_t gsv_source_num_dice(const GsvSource *source);

// Classifies the source. `report_json` may be null; otherwise it receives
// the full report as JSON, to be released with [`gsv_string_free`].
//
// # Safety
// `source` must be a live handle, `category` a valid pointer and
// `report_json` null or a valid pointer.
GsvStatus gsv_classify(const GsvSource *source, GsvCategory *category, char **report_json);

// Samples `n` faces with the adversary always rolling `die`.
//
// # Safety
// `source` must be a live handle and `faces_out` point to `n` writable
// `size_t` slots.
GsvStatus gsv_sample_constant(const GsvSource *source,
                              size_t die,
                              size_t n,
                              uint64_t seed,
                              size_t *faces_out);

// Runs a named extractor (`threshold`, `bit-exp`, `multibit-naive`,
// `multibit-fast`) on `len` faces. `epsilon` is required for `threshold`
// and may be null otherwise; `m` is the output length of the multi-bit
// extractors. Bit outputs are written as 0 (for -1) or 1 (for +1).
//
// # Safety
// `source` must be a live handle, `extractor` a NUL-terminated string,
// `epsilon` null or a NUL-terminated string, `faces` point to `len`
// readable `size_t` values and `out_index` be a valid pointer.
GsvStatus gsv_extract(const GsvSource *source,
                      const char *extractor,
                      const char *epsilon,
                      uint32_t m,
                      const size_t *faces,
                      size_t len,
                      uint64_t *out_index);

// Exact worst-case bias of a named bit extractor on `n` samples (for the
// multi-bit extractors, the worst-case distance to uniform). `bias_text`
// may be null; otherwise it receives the exact value as `"p/q"`.
//
// # Safety
// `source` must be a live handle, `extractor` a NUL-terminated string,
// `epsilon` null or a NUL-terminated string, `bias` a valid pointer and
// `bias_text` null or a valid pointer.
GsvStatus gsv_worst_case_bias(const GsvSource *source,
                              const char *extractor,
                              const char *epsilon,
                              uint32_t m,
                              size_t n,
                              double *bias,
                              char **bias_text);

// Releases a string returned by this library.
//
// # Safety
// `text` must be null or a string returned through an out-parameter of this
// library and not yet freed.
void gsv_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GSV_H */
