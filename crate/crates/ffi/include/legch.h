#ifndef LEGCH_H
#define LEGCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LegchStatus {
  LEGCH_STATUS_OK = 0,
  LEGCH_STATUS_NULL_POINTER = 1,
  LEGCH_STATUS_INVALID_UTF8 = 2,
  // Malformed text, JSON or names.
  LEGCH_STATUS_PARSE = 3,
  // Well-formed input rejected by the algebra.
  LEGCH_STATUS_DOMAIN = 4,
  // Exact answer too large to compute.
  LEGCH_STATUS_INTRACTABLE = 5,
  LEGCH_STATUS_PANIC = 6,
} LegchStatus;

typedef struct LegchDga LegchDga;

// An algebra endomorphism.
typedef struct LegchMap LegchMap;

// A Z2 polynomial in the free algebra.
typedef struct LegchPoly LegchPoly;

typedef struct LegchTangle LegchTangle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next call into the library on the same thread.
const char *legch_last_error(void);

// Library version as a static string.
const char *legch_version(void);

// # Safety
// `s` is null or a string returned by this library, not yet freed.
void legch_string_free(char *s);

// Parses text such as `"1 + b1 b2"`.
//
// # Safety
// `text` is a NUL-terminated string; `out` is writable.
enum LegchStatus legch_poly_parse(const char *text, struct LegchPoly **out);

// Canonical text of a polynomial.
//
// # Safety
// `poly` is a live handle; `out` is writable.
enum LegchStatus legch_poly_to_string(const struct LegchPoly *poly, char **out);

// # Safety
// `a`, `b` are live handles; `out` is writable.
enum LegchStatus legch_poly_add(const struct LegchPoly *a,
                                const struct LegchPoly *b,
                                struct LegchPoly **out);

// # Safety
// `a`, `b` are live handles; `out` is writable.
enum LegchStatus legch_poly_mul(const struct LegchPoly *a,
                                const struct LegchPoly *b,
                                struct LegchPoly **out);

// Number of words, not expanding abbreviations.
//
// # Safety
// `poly` is a live handle; `out` is writable.
enum LegchStatus legch_poly_length(const struct LegchPoly *poly, uint64_t *out);

// # Safety
// `poly` is null or a live handle.
void legch_poly_free(struct LegchPoly *poly);

// DGA of the (n, 2) torus knot.
//
// # Safety
// `out` is writable.
enum LegchStatus legch_dga_torus_knot(uint32_t n, struct LegchDga **out);

// Reads a `dga.v1` document.
//
// # Safety
// `json` is a NUL-terminated string; `out` is writable.
enum LegchStatus legch_dga_from_json(const char *json, struct LegchDga **out);

// # Safety
// `dga` is a live handle; `out` is writable.
enum LegchStatus legch_dga_to_json(const struct LegchDga *dga, char **out);

// ∂ of one generator.
//
// # Safety
// `dga` is a live handle; `generator` is a NUL-terminated string; `out` is writable.
enum LegchStatus legch_dga_differential(const struct LegchDga *dga,
                                        const char *generator,
                                        struct LegchPoly **out);

// Writes whether d² = 0, degrees drop by one and the action decreases.
//
// # Safety
// `dga` is a live handle; `valid` is writable.
enum LegchStatus legch_dga_check(const struct LegchDga *dga, bool *valid);

// # Safety
// `dga` is a live handle; `even` is writable.
enum LegchStatus legch_dga_is_even_class(const struct LegchDga *dga, bool *even);

// # Safety
// `dga` is null or a live handle.
void legch_dga_free(struct LegchDga *dga);

// Cuts a knot open at the degree-1 crossing `closure`, renaming the rest
// under `prefix` (may be empty).
//
// # Safety
// `dga` is a live handle; the strings are NUL-terminated; `out` is writable.
enum LegchStatus legch_tangle_from_knot(const struct LegchDga *dga,
                                        const char *closure,
                                        const char *prefix,
                                        struct LegchTangle **out);

// Reads a `tangle.v1` document.
//
// # Safety
// `json` is a NUL-terminated string; `out` is writable.
enum LegchStatus legch_tangle_from_json(const char *json, struct LegchTangle **out);

// # Safety
// `tangle` is a live handle; `out` is writable.
enum LegchStatus legch_tangle_to_json(const struct LegchTangle *tangle, char **out);

// ℓ of the tangle's word.
//
// # Safety
// `tangle` is a live handle; `out` is writable.
enum LegchStatus legch_tangle_word_length(const struct LegchTangle *tangle, uint64_t *out);

// # Safety
// `tangle` is null or a live handle.
void legch_tangle_free(struct LegchTangle *tangle);

// Closes `count` tangles, in order, into one knot with closure crossing `closure`.
//
// # Safety
// `tangles` points to `count` live handles; `closure` is NUL-terminated; `out` is writable.
enum LegchStatus legch_connect_sum(const struct LegchTangle *const *tangles,
                                   size_t count,
                                   const char *closure,
                                   struct LegchDga **out);

// Monodromy of the j-th power of the Kálmán loop carrying `fly`.
//
// # Safety
// `fly` is a live handle; `out` is writable.
enum LegchStatus legch_map_kalman(const struct LegchPoly *fly, uint32_t j, struct LegchMap **out);

// # Safety
// `map`, `poly` are live handles; `out` is writable.
enum LegchStatus legch_map_apply(const struct LegchMap *map,
                                 const struct LegchPoly *poly,
                                 struct LegchPoly **out);

// The map `outer ∘ inner`.
//
// # Safety
// `outer`, `inner` are live handles; `out` is writable.
enum LegchStatus legch_map_compose(const struct LegchMap *outer,
                                   const struct LegchMap *inner,
                                   struct LegchMap **out);

// # Safety
// `map` is null or a live handle.
void legch_map_free(struct LegchMap *map);

// Runs a `script.v1` document and writes the `monodromy.v1` result.
//
// # Safety
// `json` is a NUL-terminated string; `out` is writable.
enum LegchStatus legch_script_run_json(const char *json, char **out);

// Verdicts for a fly of (nᵢ, 2) torus knots under the given loop powers,
// written as a `verdict.v1` document.
//
// # Safety
// `summands` points to `summand_count` values and `powers` to `power_count`
// values (either may be null when its count is zero); `out` is writable.
enum LegchStatus legch_verdicts_json(const uint32_t *summands,
                                     size_t summand_count,
                                     const uint32_t *powers,
                                     size_t power_count,
                                     char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEGCH_H */
