#ifndef CLUSTERALG_H
#define CLUSTERALG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum {
  CA_STATUS_OK = 0,
  /**
   * A CM3 check found a counterexample; the report is still returned.
   */
  CA_STATUS_VERIFICATION_FAILED = 1,
  /**
   * Malformed JSON or a value out of range.
   */
  CA_STATUS_INVALID_INPUT = 2,
  CA_STATUS_NULL_POINTER = 3,
  CA_STATUS_INVALID_UTF8 = 4,
  /**
   * The seed was rejected or an operation on it failed.
   */
  CA_STATUS_SEED_ERROR = 5,
  /**
   * The morphism was rejected or an operation on it failed.
   */
  CA_STATUS_MORPHISM_ERROR = 6,
  /**
   * An internal panic was caught at the boundary.
   */
  CA_STATUS_INTERNAL = 7,
} CaStatus;

/**
 * Opaque morphism handle.
 */
typedef struct CaMorphism CaMorphism;

/**
 * Opaque seed handle.
 */
typedef struct CaSeed CaSeed;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on this thread.
 */
const char *ca_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ca_string_free(char *s);

/**
 * Parses `{"variables", "exchangeable", "matrix"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` a valid pointer.
 */
CaStatus ca_seed_from_json(const char *json, CaSeed **out);

/**
 * Serialises the seed's matrix and labels (not the expansions).
 *
 * # Safety
 * `seed` must be a live handle; `out` a valid pointer.
 */
CaStatus ca_seed_to_json(const CaSeed *seed, char **out);

/**
 * Number of variables, or 0 for a null handle.
 *
 * # Safety
 * `seed` must be null or a live handle.
 */
size_t ca_seed_len(const CaSeed *seed);

/**
 * Current label of variable `i`.
 *
 * # Safety
 * `seed` must be a live handle; `out` a valid pointer.
 */
CaStatus ca_seed_label(const CaSeed *seed, size_t i, char **out);

/**
 * Variable `i` as a fraction in the root variables, e.g.
 * `(1 + x2 + x1*x3)/(x1*x2)`.
 *
 * # Safety
 * `seed` must be a live handle; `out` a valid pointer.
 */
CaStatus ca_seed_variable(const CaSeed *seed, size_t i, char **out);

/**
 * Mutates at the variable named `label` into a new handle; the input is
 * left untouched.
 *
 * # Safety
 * `seed` must be a live handle, `label` NUL-terminated, `out` valid.
 */
CaStatus ca_seed_mutate(const CaSeed *seed, const char *label, CaSeed **out);

/**
 * DOT rendering of the quiver.
 *
 * # Safety
 * `seed` must be a live handle; `out` a valid pointer.
 */
CaStatus ca_seed_to_dot(const CaSeed *seed, char **out);

/**
 * Seed of the fan triangulation of the m-gon.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
CaStatus ca_polygon_fan_seed(uint32_t m, CaSeed **out);

/**
 * # Safety
 * `seed` must be null or a live handle, not used afterwards.
 */
void ca_seed_free(CaSeed *seed);

/**
 * Parses `{"source", "target", "map"}`; CM1 and CM2 are enforced.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` a valid pointer.
 */
CaStatus ca_morphism_from_json(const char *json, CaMorphism **out);

/**
 * # Safety
 * `m` must be a live handle; `out` a valid pointer.
 */
CaStatus ca_morphism_to_json(const CaMorphism *m, char **out);

/**
 * CM3 on all biadmissible sequences up to `depth`. Writes the JSON report
 * to `report` (if non-null) and returns `Ok` or `VerificationFailed`.
 *
 * # Safety
 * `m` must be a live handle; `report` null or a valid pointer.
 */
CaStatus ca_morphism_verify(const CaMorphism *m, size_t depth, char **report);

/**
 * `g ∘ f` into a new handle.
 *
 * # Safety
 * `g`, `f` must be live handles; `out` a valid pointer.
 */
CaStatus ca_morphism_compose(const CaMorphism *g, const CaMorphism *f, CaMorphism **out);

/**
 * # Safety
 * `m` must be null or a live handle, not used afterwards.
 */
void ca_morphism_free(CaMorphism *m);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CLUSTERALG_H */
