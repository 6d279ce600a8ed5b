#ifndef PPCEM_H
#define PPCEM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PpcemStatus {
  PPCEM_STATUS_OK = 0,
  PPCEM_STATUS_NULL_POINTER = 1,
  PPCEM_STATUS_INVALID_UTF8 = 2,
  PPCEM_STATUS_PARSE_ERROR = 3,
  PPCEM_STATUS_UNKNOWN_STRATEGY = 4,
  // The step budget ran out; the partial result is still written.
  PPCEM_STATUS_BUDGET_EXHAUSTED = 5,
  PPCEM_STATUS_PANIC = 6,
} PpcemStatus;

// Opaque term handle.
typedef struct PpcemTerm PpcemTerm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parse `src` into a new term written to `*out`.
//
// # Safety
// `src` must be a nul-terminated string and `out` a valid pointer.
enum PpcemStatus ppcem_parse(const char *src, struct PpcemTerm **out);

// Release a term. Null is ignored.
//
// # Safety
// `t` must come from this library and not be used afterwards.
void ppcem_term_free(struct PpcemTerm *t);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void ppcem_string_free(char *s);

// Print a term in source syntax; null on a null handle.
//
// # Safety
// `t` must be a live handle or null.
char *ppcem_term_print(const struct PpcemTerm *t);

// Write whether `a` and `b` are equal up to renaming of bound names.
//
// # Safety
// `a`, `b` must be live handles and `out` a valid pointer.
enum PpcemStatus ppcem_alpha_equiv(const struct PpcemTerm *a, const struct PpcemTerm *b, bool *out);

// Reduce with the named strategy (`full`, `df-lr`, `df-reordered`,
// `matching-driven`) for at most `max_steps` steps. The result is written
// to `*out` and the number of steps to `*steps` (if non-null), also when
// the budget runs out.
//
// # Safety
// `t` must be a live handle, `strategy` a nul-terminated string, `out` a
// valid pointer and `steps` valid or null.
enum PpcemStatus ppcem_reduce(const struct PpcemTerm *t,
                              const char *strategy,
                              uintptr_t max_steps,
                              struct PpcemTerm **out,
                              uintptr_t *steps);

// Like [`ppcem_reduce`], but writes the trace as a JSON array of
// `{step, path, rule, term}` objects to `*out`.
//
// # Safety
// As for [`ppcem_reduce`]; `*out` must be freed with [`ppcem_string_free`].
enum PpcemStatus ppcem_trace_json(const struct PpcemTerm *t,
                                  const char *strategy,
                                  uintptr_t max_steps,
                                  char **out);

// Purification: `→p` normal form, then forget. `*pure` tells whether the
// result has no matchings left.
//
// # Safety
// `t` must be a live handle, `out` and `pure` valid pointers.
enum PpcemStatus ppcem_purify(const struct PpcemTerm *t, struct PpcemTerm **out, bool *pure);

// Message for the last failed call on this thread, or null. Valid until
// the next call into the library on the same thread.
const char *ppcem_last_error(void);

// Library version, static.
const char *ppcem_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PPCEM_H */
