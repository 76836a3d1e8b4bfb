/* C interface for the twobridge decision procedures. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every C entry point.
 */
typedef enum TbStatus {
  /**
   * Success.
   */
  TB_STATUS_OK = 0,
  /**
   * The text or pair did not describe a slope.
   */
  TB_STATUS_INVALID_SLOPE = 1,
  /**
   * A precondition of the question was violated.
   */
  TB_STATUS_PRECONDITION = 2,
  /**
   * Root finding or series evaluation failed numerically.
   */
  TB_STATUS_NUMERICAL = 3,
  /**
   * A required pointer argument was NULL.
   */
  TB_STATUS_NULL_POINTER = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  TB_STATUS_INVALID_UTF8 = 5,
  /**
   * Unexpected internal failure.
   */
  TB_STATUS_INTERNAL = 6,
} TbStatus;

/**
 * Opaque parabolic-representation handle.
 */
typedef struct TbRep TbRep;

/**
 * Opaque rational slope handle.
 */
typedef struct TbSlope TbSlope;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Frees a string returned by this library.  NULL is allowed.
 */
void tb_string_free(char *s);

/**
 * Copies the message of the last error on this thread into `*out`, or sets
 * `*out` to NULL when no error has occurred.  Caller frees the string.
 */
enum TbStatus tb_last_error(char **out);

/**
 * Parses `text` as "q/p", an integer, or "inf" into a new slope handle.
 */
enum TbStatus tb_slope_parse(const char *text, struct TbSlope **out);

/**
 * Builds the slope `num/den`; `den` may be 0 for the point at infinity.
 */
enum TbStatus tb_slope_from_fraction(int64_t num, int64_t den, struct TbSlope **out);

/**
 * Frees a slope handle.  NULL is allowed.
 */
void tb_slope_free(struct TbSlope *s);

/**
 * Writes the canonical "q/p" form of a slope.  Caller frees the string.
 */
enum TbStatus tb_slope_to_string(const struct TbSlope *s, char **out);

/**
 * Writes the relator word of `r` in the letters a, a', b, b'.  Caller frees
 * the string.
 */
enum TbStatus tb_relator_word(const struct TbSlope *r, char **out);

/**
 * Normalizes `s` under the reflection group of `r` into a new handle.
 */
enum TbStatus tb_normalize(const struct TbSlope *r, const struct TbSlope *s, struct TbSlope **out);

/**
 * Is the loop of slope `s` null-homotopic in the link group of `r`?
 */
enum TbStatus tb_is_null_homotopic(const struct TbSlope *r, const struct TbSlope *s, bool *out);

/**
 * Are the loops of slopes `s` and `t` freely homotopic in the link group of
 * `r`?  `allow_mirror` permits deciding `r > 1/2` through the mirror.
 */
enum TbStatus tb_are_homotopic(const struct TbSlope *r,
                               const struct TbSlope *s,
                               const struct TbSlope *t,
                               bool allow_mirror,
                               bool *out);

/**
 * Is the loop of slope `s` peripheral in the link group of `r`?
 */
enum TbStatus tb_is_peripheral(const struct TbSlope *r,
                               const struct TbSlope *s,
                               bool allow_mirror,
                               bool *out);

/**
 * Writes 1 when the loop of slope `s` is primitive, otherwise the exponent
 * k for which it is the k-th power of a primitive element.
 */
enum TbStatus tb_primitive_power(const struct TbSlope *r,
                                 const struct TbSlope *s,
                                 bool allow_mirror,
                                 uint8_t *out);

/**
 * Does `s` or `s+1` witness the standard epimorphism for `r`?
 */
enum TbStatus tb_has_epimorphism(const struct TbSlope *r, const struct TbSlope *s, bool *out);

/**
 * Builds the geometric parabolic representation for `r`.
 */
enum TbStatus tb_rep_geometric(const struct TbSlope *r, struct TbRep **out);

/**
 * Builds the representation for `r` at the defining-polynomial root nearest
 * to `re + im*i`.
 */
enum TbStatus tb_rep_with_omega(const struct TbSlope *r, double re, double im, struct TbRep **out);

/**
 * Frees a representation handle.  NULL is allowed.
 */
void tb_rep_free(struct TbRep *rep);

/**
 * Writes the representation parameter.
 */
enum TbStatus tb_rep_omega(const struct TbRep *rep, double *re, double *im);

/**
 * Writes the trace of the image of the loop of slope `s`.
 */
enum TbStatus tb_trace(const struct TbRep *rep, const struct TbSlope *s, double *re, double *im);

/**
 * Evaluates the boundary weight series up to denominator `max_den`, pruning
 * subtrees whose weight bound falls below `prune_eps`.  Writes the partial
 * sum and the accumulated tail bound.
 */
enum TbStatus tb_mcshane_sum(const struct TbRep *rep,
                             double prune_eps,
                             uint64_t max_den,
                             double *sum_re,
                             double *sum_im,
                             double *tail);

/**
 * Evaluates the cusp modulus over the lower interval up to denominator
 * `max_den`.  Writes the complex modulus.
 */
enum TbStatus tb_cusp_modulus(const struct TbRep *rep,
                              double prune_eps,
                              uint64_t max_den,
                              double *lambda_re,
                              double *lambda_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
