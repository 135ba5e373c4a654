/* C interface to the defekt valued-field library. */

#ifndef DEFEKT_H
#define DEFEKT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum DefektStatus {
  DEFEKT_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  DEFEKT_STATUS_NULL_POINTER = 1,
  /**
   * An input string was not valid UTF-8.
   */
  DEFEKT_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed input: parse error, unknown example id, parameter range.
   */
  DEFEKT_STATUS_USAGE_ERROR = 3,
  /**
   * A mathematical precondition failed (division by zero, indeterminate
   * valuation, hypothesis violation, ...).
   */
  DEFEKT_STATUS_MATH_ERROR = 4,
  /**
   * The requested catalog example ran but at least one check failed.
   */
  DEFEKT_STATUS_CHECK_FAILED = 5,
} DefektStatus;

/**
 * Opaque handle to an evaluated value in one of the two domains.
 */
typedef struct DefektValue DefektValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for the current thread, or NULL when the previous call
 * succeeded. The caller owns the returned string.
 */
char *defekt_last_error_message(void);

/**
 * Release a string allocated by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer previously returned by a defekt function
 * that hands ownership to the caller, not yet freed.
 */
void defekt_string_free(char *s);

/**
 * Evaluate an expression (series or p-adic domain) into a value handle.
 *
 * `prec` is a rational string such as "8" or "-1/64"; pass NULL for the
 * default of 8. Valuation queries `v(...)` are not values; use
 * [`defekt_value_valuation`] instead.
 *
 * # Safety
 * `expr` and (when non-NULL) `prec` must point to NUL-terminated strings;
 * `out` must be a valid pointer to a pointer slot.
 */
enum DefektStatus defekt_value_eval(const char *expr,
                                    uint64_t prime,
                                    const char *prec,
                                    struct DefektValue **out);

/**
 * Canonical text form of a value.
 *
 * # Safety
 * `value` must be a live handle from this library; `out` must be valid.
 */
enum DefektStatus defekt_value_format(const struct DefektValue *value, char **out);

/**
 * Valuation of a value, rendered as "q", ">= q" or "infinite".
 *
 * # Safety
 * `value` must be a live handle from this library; `out` must be valid.
 */
enum DefektStatus defekt_value_valuation(const struct DefektValue *value, char **out);

/**
 * Sum of two values from the same domain.
 *
 * # Safety
 * All handles must be live handles from this library; `out` must be valid.
 */
enum DefektStatus defekt_value_add(const struct DefektValue *a,
                                   const struct DefektValue *b,
                                   struct DefektValue **out);

/**
 * Product of two values from the same domain.
 *
 * # Safety
 * All handles must be live handles from this library; `out` must be valid.
 */
enum DefektStatus defekt_value_mul(const struct DefektValue *a,
                                   const struct DefektValue *b,
                                   struct DefektValue **out);

/**
 * Release a value handle.
 *
 * # Safety
 * `value` must be NULL or a live handle from this library, not yet freed.
 */
void defekt_value_free(struct DefektValue *value);

/**
 * Run a catalog example; `out_json` receives the full report (sorted keys).
 * Returns `CheckFailed` when the report ran but did not pass.
 *
 * # Safety
 * `id` must be a NUL-terminated string, `prec` NULL or the same, and
 * `out_json` a valid pointer slot.
 */
enum DefektStatus defekt_example_run_json(const char *id,
                                          uint64_t prime,
                                          uint32_t depth,
                                          const char *prec,
                                          uint64_t seed,
                                          char **out_json);

/**
 * JSON array describing the example registry.
 *
 * # Safety
 * `out_json` must be a valid pointer slot.
 */
enum DefektStatus defekt_example_list_json(char **out_json);

/**
 * Classify a cut literal ("empty" | "lt:q" | "le:q" | "all") over the dense
 * group Z[1/p]; the verdict string is "Independent" or "Dependent".
 *
 * # Safety
 * `literal` must be a NUL-terminated string and `out_verdict` a valid slot.
 */
enum DefektStatus defekt_classify(const char *literal, uint64_t prime, char **out_verdict);

/**
 * Newton polygon of a polynomial source (see the CLI grammar); the result
 * is the same JSON the `defekt np --json` command prints.
 *
 * # Safety
 * `poly` must be a NUL-terminated string, `prec` NULL or the same, and
 * `out_json` a valid pointer slot.
 */
enum DefektStatus defekt_newton_polygon_json(const char *poly,
                                             uint64_t prime,
                                             const char *prec,
                                             char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEFEKT_H */
