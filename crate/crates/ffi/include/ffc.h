#ifndef FFC_CAPI_H
#define FFC_CAPI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of an FFI call.
 */
typedef enum FfcStatus {
  /**
   * Success; the output pointer holds a JSON document.
   */
  FfcStatus_Ok = 0,
  /**
   * A domain error (non-unit inverse, unstable curve, ...); the output
   * pointer holds a JSON error object.
   */
  FfcStatus_DomainError = 1,
  /**
   * A parse or type error in the program text.
   */
  FfcStatus_ParseError = 2,
  /**
   * Null pointer, non-UTF8 text, or an invalid ring description.
   */
  FfcStatus_InvalidArgument = 3,
  /**
   * A property suite reported failures.
   */
  FfcStatus_SuiteFailed = 4,
} FfcStatus;

/**
 * Opaque evaluation context: a coefficient ring choice.
 */
typedef struct FfcContext FfcContext;

/**
 * Create a context over `Q[e1..e_vars]/m^(order+1)` with `generics`
 * invertible parameters adjoined. Returns null when `order` is zero.
 */
struct FfcContext *ffc_context_new(uint32_t vars, uint32_t order, uint32_t generics);

/**
 * Release a context created by [`ffc_context_new`].
 *
 * # Safety
 * `ctx` must be a pointer previously returned by [`ffc_context_new`] and
 * not yet freed; null is ignored.
 */
void ffc_context_free(struct FfcContext *ctx);

/**
 * Evaluate a DSL program. On success `*out_json` receives the result
 * document; on failure it receives a JSON object with an `error` field.
 * The caller owns the string either way.
 *
 * # Safety
 * `ctx` must be a live context, `source` a NUL-terminated UTF-8 string,
 * and `out_json` a valid pointer to writable storage.
 */
enum FfcStatus ffc_eval(const struct FfcContext *ctx, const char *source, char **out_json);

/**
 * Run a named property suite (`artin`, `witt`, `annuli`, `corolla`,
 * `fld`) in the context's ring. `*out_json` receives a summary document.
 *
 * # Safety
 * Same contract as [`ffc_eval`].
 */
enum FfcStatus ffc_check(const struct FfcContext *ctx,
                         const char *suite,
                         uint64_t seed,
                         uintptr_t iterations,
                         char **out_json);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must originate from this library and not have been freed; null is
 * ignored.
 */
void ffc_string_free(char *s);

#endif /* FFC_CAPI_H */
